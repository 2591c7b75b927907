#include "fvbs/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "fvbs/errors.hpp"

namespace fvbs {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << text;
}

json manifest_json(const RunConfig& config) {
    json m;
    m["tool"] = "fvbs";
    m["version"] = kVersion;
    m["seed"] = config.degiorgi.seed;
    m["config"] = serialize_config(config);
    return m;
}

void write_solution_csv(const fs::path& path, const Mesh& mesh, std::span<const double> v) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "cell_id,x,y,measure,v\n" << std::setprecision(17);
    for (const auto& c : mesh.cells)
        out << c.id << "," << c.center.x << "," << c.center.y << "," << c.measure << ","
            << v[c.id] << "\n";
}

json mmatrix_json(const MMatrixReport& rep) {
    json j;
    j["offdiag_nonpositive"] = rep.offdiag_nonpositive;
    j["diag_positive"] = rep.diag_positive;
    j["rowsum_nonnegative"] = rep.rowsum_nonnegative;
    j["strictly_dominant_rows"] = rep.strictly_dominant_rows.size();
    return j;
}

json energy_report_json(const EnergyReport& r) {
    json j;
    j["m"] = r.m;
    j["C_m"] = r.threshold;
    j["E_m"] = r.e_m;
    j["F_m"] = r.f_m;
    j["level_set_measure"] = r.level_set_measure;
    j["rhs_bound"] = r.rhs_bound;
    j["holds"] = r.holds;
    j["applicable"] = r.applicable;
    return j;
}

struct Materialized {
    Mesh mesh;
    ProblemSpec spec;
    DiscreteData data;
    BFunction b;
};

Materialized materialize(const RunConfig& config) {
    Materialized m{build_mesh(config.mesh), build_problem(config.problem), {}, {}};
    switch (config.scheme.b) {
        case BKind::Upwind: m.b = BFunction::upwind(); break;
        case BKind::ScharfetterGummel: m.b = BFunction::scharfetter_gummel(); break;
        case BKind::Centered: m.b = BFunction::centered(); break;
        case BKind::Custom: throw ConfigError("custom B requires programmatic use");
    }
    m.data = discretize_data(m.mesh, m.spec, config.scheme.quadrature_order);
    m.spec.norms = compute_norms(m.mesh, m.spec, m.data);
    return m;
}

}  // namespace

ProblemSpec random_compliant_problem(std::mt19937_64& rng, double u_max) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::uniform_real_distribution<double> uni01(0.0, 1.0);

    double a0 = uni(rng), a1 = uni(rng), a2 = uni(rng), a3 = uni(rng);
    double bound = std::hypot(std::abs(a0) + std::abs(a1), std::abs(a2) + std::abs(a3));
    double scale = bound > 0.0 ? u_max * (0.2 + 0.8 * uni01(rng)) / bound : 0.0;
    a0 *= scale;
    a1 *= scale;
    a2 *= scale;
    a3 *= scale;

    double c1 = 0.5 * uni(rng);
    double c0 = std::abs(c1) + uni01(rng) * (1.0 - 2.0 * std::abs(c1));
    double b0 = 0.5 * uni01(rng);
    double d = 0.5 * uni01(rng);
    double ph = 2.0 * M_PI * uni01(rng);

    ProblemSpec spec;
    spec.velocity.x = [a0, a1](double x, double y) {
        return a0 + a1 * std::sin(2 * M_PI * x) * std::sin(2 * M_PI * y);
    };
    spec.velocity.y = [a2, a3](double x, double y) {
        return a2 + a3 * std::cos(2 * M_PI * x) * std::cos(2 * M_PI * y);
    };
    spec.reaction = constant_field(b0);
    spec.source = [c0, c1](double x, double y) {
        return c0 + c1 * std::sin(2 * M_PI * x) * std::cos(2 * M_PI * y);
    };
    spec.dirichlet_value = [d, ph](double x, double y) {
        return 0.5 + d * std::sin(2 * M_PI * x + 3.0 * y + ph);
    };
    return spec;
}

ProblemSpec random_mixed_problem(std::mt19937_64& rng) {
    ProblemSpec spec = random_compliant_problem(rng, 3.0);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double c = uni(rng), c2 = uni(rng), d = uni(rng);
    spec.source = [c, c2](double x, double y) {
        return c * std::sin(2 * M_PI * x) * std::sin(2 * M_PI * y) + c2 * (x - 0.5);
    };
    spec.dirichlet_value = [d](double x, double y) {
        return d * std::sin(2 * M_PI * (x + y));
    };
    return spec;
}

int run_solve(const RunConfig& config, std::ostream& log) {
    Materialized m = materialize(config);
    LinearSystem sys = assemble(m.mesh, m.data, m.b);
    MMatrixReport mrep = check_m_matrix(sys);
    std::vector<double> v = solve(sys, config.scheme.solver_tol);

    fs::create_directories(config.output.dir);
    fs::path dir(config.output.dir);
    write_solution_csv(dir / "solution.csv", m.mesh, v);
    write_text(dir / "mmatrix.json", mmatrix_json(mrep).dump(2) + "\n");
    if (config.output.dump_system) {
        write_matrix_market((dir / "system.mtx").string(), sys.matrix);
        write_vector((dir / "rhs.txt").string(), sys.rhs);
    }

    json man = manifest_json(config);
    double vmax = -1e300, vmin = 1e300;
    for (double x : v) {
        vmax = std::max(vmax, x);
        vmin = std::min(vmin, x);
    }
    man["v_max"] = vmax;
    man["v_min"] = vmin;
    if (config.problem.preset == "laplace-linear") {
        double err = 0.0;
        for (const auto& c : m.mesh.cells) err = std::max(err, std::abs(v[c.id] - c.center.x));
        man["laplace_linear_error"] = err;
    }
    write_text(dir / "manifest.json", man.dump(2) + "\n");
    if (!config.quiet)
        log << "solved " << m.mesh.cells.size() << " cells, v in [" << vmin << ", " << vmax
            << "]\n";
    return kExitOk;
}

int run_verify(const RunConfig& config, std::ostream& log) {
    Materialized m = materialize(config);
    bool audit_ok = true;

    json report;
    report["constants"] = {
        {"eta", config.degiorgi.eta},
        {"poincare_c", config.degiorgi.poincare_c},
        {"boundm_c", config.degiorgi.boundm_c},
        {"m_max", config.degiorgi.m_max},
        {"seed", config.degiorgi.seed},
        {"trials", config.degiorgi.trials},
    };

    // Randomized compliant suite: M-matrix structure, positivity, and the
    // fundamental energy estimate at every level.
    std::mt19937_64 rng(config.degiorgi.seed);
    json trials = json::array();
    std::ostringstream levels_csv;
    levels_csv << "trial,m,C_m,E_m,F_m,level_set_measure,rhs_bound,holds\n"
               << std::setprecision(17);
    for (int t = 0; t < config.degiorgi.trials; ++t) {
        ProblemSpec spec = random_compliant_problem(rng);
        BFunction B = (t % 2 == 0) ? BFunction::upwind() : BFunction::scharfetter_gummel();
        DiscreteData data = discretize_data(m.mesh, spec, config.scheme.quadrature_order);
        spec.norms = compute_norms(m.mesh, spec, data);
        LinearSystem sys = assemble(m.mesh, data, B);
        MMatrixReport mrep = check_m_matrix(sys);
        std::vector<double> v = solve(sys, config.scheme.solver_tol);
        double vmin = 1e300;
        for (double x : v) vmin = std::min(vmin, x);
        bool positive_ok = vmin >= -1e-10;
        bool trial_ok = mrep.offdiag_nonpositive && mrep.diag_positive &&
                        mrep.rowsum_nonnegative && positive_ok;
        json jt;
        jt["trial"] = t;
        jt["scheme"] = to_string(B.kind);
        jt["m_matrix"] = mmatrix_json(mrep);
        jt["v_min"] = vmin;
        jt["positivity_ok"] = positive_ok;
        json jlevels = json::array();
        for (int lvl = 1; lvl <= config.degiorgi.m_max; ++lvl) {
            EnergyReport er = check_fundamental_estimate(m.mesh, v, data, spec.norms, B, lvl);
            trial_ok = trial_ok && (er.holds || !er.applicable);
            jlevels.push_back(energy_report_json(er));
            levels_csv << t << "," << er.m << "," << er.threshold << "," << er.e_m << ","
                       << er.f_m << "," << er.level_set_measure << "," << er.rhs_bound << ","
                       << (er.holds ? 1 : 0) << "\n";
        }
        jt["levels"] = jlevels;
        jt["ok"] = trial_ok;
        audit_ok = audit_ok && trial_ok;
        trials.push_back(jt);
    }
    report["trials"] = trials;

    // Sign decomposition on a seeded mixed-sign problem.
    {
        ProblemSpec spec = random_mixed_problem(rng);
        BFunction B = BFunction::upwind();
        SignDecomposition dec =
            decompose_signed(m.mesh, spec, B, config.scheme.quadrature_order,
                             config.scheme.solver_tol);
        double pmin = 1e300, nmin = 1e300;
        for (double x : dec.positive_part) pmin = std::min(pmin, x);
        for (double x : dec.negative_part) nmin = std::min(nmin, x);
        bool ok = dec.residual <= 10.0 * config.scheme.solver_tol &&
                  pmin >= -config.scheme.solver_tol && nmin >= -config.scheme.solver_tol;
        report["decomposition"] = {
            {"residual", dec.residual},
            {"P_min", pmin},
            {"N_min", nmin},
            {"ok", ok},
        };
        audit_ok = audit_ok && ok;
    }

    // Uniform-bound study on the configured problem across refinements.
    {
        BoundConstants constants;
        constants.eta = config.degiorgi.eta;
        constants.poincare_c = config.degiorgi.poincare_c;
        constants.boundm_c = config.degiorgi.boundm_c;
        auto mesh_for = [&](int nx, int ny) {
            MeshConfig mc = config.mesh;
            mc.file.clear();
            mc.nx = nx;
            mc.ny = ny;
            return build_mesh(mc);
        };
        UniformBoundReport ub =
            verify_uniform_bound(m.spec, m.b, mesh_for, config.degiorgi.refinements, constants,
                                 config.scheme.quadrature_order, config.scheme.solver_tol);
        json jl = json::array();
        for (const auto& lev : ub.levels) {
            json j;
            j["nx"] = lev.nx;
            j["ny"] = lev.ny;
            j["h"] = lev.size_h;
            j["solved"] = lev.solved;
            if (lev.solved) {
                j["v_max"] = lev.v_max;
                j["v_min"] = lev.v_min;
            } else {
                j["error"] = lev.error;
            }
            jl.push_back(j);
        }
        report["uniform_bound"] = {
            {"levels", jl},
            {"M_bar", ub.m_bar},
            {"M_underbar", ub.m_underbar},
            {"bounded", ub.bounded},
            {"h_independent", ub.h_independent},
        };
        audit_ok = audit_ok && ub.bounded;
    }

    report["audit_ok"] = audit_ok;

    fs::create_directories(config.output.dir);
    fs::path dir(config.output.dir);
    write_text(dir / "report.json", report.dump(2) + "\n");
    write_text(dir / "levels.csv", levels_csv.str());
    write_text(dir / "manifest.json", manifest_json(config).dump(2) + "\n");
    if (!config.quiet)
        log << "verify: " << config.degiorgi.trials << " trials, audit "
            << (audit_ok ? "passed" : "FAILED") << "\n";
    return audit_ok ? kExitOk : kExitAudit;
}

int run_calibrate(const RunConfig& config, std::ostream& log) {
    if (config.degiorgi.refinements.empty())
        throw ConfigError("calibrate requires a non-empty refinement list");
    ProblemSpec base = build_problem(config.problem);
    BFunction B;
    switch (config.scheme.b) {
        case BKind::ScharfetterGummel: B = BFunction::scharfetter_gummel(); break;
        case BKind::Centered: B = BFunction::centered(); break;
        default: B = BFunction::upwind(); break;
    }

    json levels = json::array();
    double worst_poincare = 0.0, worst_recursion = 0.0;
    std::vector<double> per_level_poincare;
    for (auto [nx, ny] : config.degiorgi.refinements) {
        MeshConfig mc = config.mesh;
        mc.file.clear();
        mc.nx = nx;
        mc.ny = ny;
        Mesh mesh = build_mesh(mc);
        DiscreteData data = discretize_data(mesh, base, config.scheme.quadrature_order);
        ProblemSpec spec = base;
        spec.norms = compute_norms(mesh, spec, data);
        std::vector<double> v = solve(assemble(mesh, data, B), config.scheme.solver_tol);

        BoundConstants constants;
        constants.eta = config.degiorgi.eta;
        constants.poincare_c = config.degiorgi.poincare_c;
        constants.boundm_c = config.degiorgi.boundm_c;
        constants.xi = mesh.xi;
        constants.p = mesh.dim;
        CascadeReport cas = verify_energy_cascade(mesh, v, data, spec.norms, B,
                                                  config.degiorgi.m_max, constants);
        json j;
        j["nx"] = nx;
        j["ny"] = ny;
        j["calibrated_poincare_c"] = cas.calibrated_poincare_c;
        j["calibrated_recursion_c"] = cas.calibrated_recursion_c;
        int active = 0;
        for (const auto& lev : cas.levels)
            if (!lev.trivial && lev.m >= 2) ++active;
        j["active_levels"] = active;
        j["unconstrained"] = active == 0;
        levels.push_back(j);
        worst_poincare = std::max(worst_poincare, cas.calibrated_poincare_c);
        worst_recursion = std::max(worst_recursion, cas.calibrated_recursion_c);
        per_level_poincare.push_back(cas.calibrated_poincare_c);
    }

    json report;
    report["levels"] = levels;
    report["poincare_c"] =
        worst_poincare > 0.0 ? json(worst_poincare) : json("unconstrained");
    report["recursion_c"] =
        worst_recursion > 0.0 ? json(worst_recursion) : json("unconstrained");
    double ratio = 0.0;
    if (per_level_poincare.size() >= 2) {
        double a = per_level_poincare[per_level_poincare.size() - 2];
        double b = per_level_poincare.back();
        if (a > 0.0 && b > 0.0) ratio = std::max(a / b, b / a);
    }
    report["poincare_c_refinement_ratio"] = ratio;

    fs::create_directories(config.output.dir);
    fs::path dir(config.output.dir);
    write_text(dir / "calibration.json", report.dump(2) + "\n");
    write_text(dir / "manifest.json", manifest_json(config).dump(2) + "\n");
    if (!config.quiet) log << "calibrate: " << report["poincare_c"].dump() << "\n";
    return kExitOk;
}

int run_mesh_check(const RunConfig& config, std::ostream& log) {
    Mesh mesh = build_mesh(config.mesh);
    AdmissibilityReport rep = check_admissibility(mesh);
    json j;
    j["cells"] = mesh.cells.size();
    j["edges"] = mesh.edges.size();
    j["h"] = mesh.size_h;
    j["domain_measure"] = mesh.domain_measure;
    j["domain_diameter"] = mesh.domain_diameter;
    j["xi_measured"] = rep.xi_measured;
    j["inegvol_ok"] = rep.inegvol_ok;
    j["orthogonality_ok"] = rep.orthogonality_ok;
    j["worst_cell"] = rep.worst_cell;
    log << j.dump(2) << "\n";
    return kExitOk;
}

int dispatch(const std::string& verb, const RunConfig& config, std::ostream& log) {
    try {
        if (verb == "solve") return run_solve(config, log);
        if (verb == "verify") return run_verify(config, log);
        if (verb == "calibrate") return run_calibrate(config, log);
        if (verb == "mesh-check") return run_mesh_check(config, log);
        log << "unknown verb: " << verb << "\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const MeshError& e) {
        log << "mesh error: " << e.what() << "\n";
        return kExitMesh;
    } catch (const SolverError& e) {
        log << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const AssemblyError& e) {
        log << "assembly error: " << e.what() << "\n";
        return kExitAssembly;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace fvbs
