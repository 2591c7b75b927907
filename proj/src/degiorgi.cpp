#include "fvbs/degiorgi.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fvbs/errors.hpp"

namespace fvbs {

double truncation_threshold(int m) {
    if (m < 1) throw std::invalid_argument("truncation_threshold: m >= 1 required");
    return 2.0 - std::ldexp(1.0, 1 - m);  // 2(1 - 2^{-m}), exact in binary
}

namespace {

inline double pos(double s) { return s > 0.0 ? s : 0.0; }
inline double phi(double s) { return s >= 0.0 ? s / (1.0 + s) : 0.0; }

}  // namespace

EnergyPair energy(const Mesh& mesh, std::span<const double> v, std::span<const double> vd_edge,
                  int m, bool reverse_interior) {
    const double cm = truncation_threshold(m);
    EnergyPair out;
    for (const auto& e : mesh.edges) {
        if (e.kind == EdgeKind::Neumann) continue;
        double wk, wks;
        if (e.kind == EdgeKind::Interior) {
            int K = reverse_interior ? e.cell_b : e.cell_a;
            int L = reverse_interior ? e.cell_a : e.cell_b;
            wk = v[K] - cm;
            wks = v[L] - cm;
        } else {
            wk = v[e.cell_a] - cm;
            wks = vd_edge[e.id] - cm;
        }
        double de = std::log1p(pos(wks)) - std::log1p(pos(wk));
        out.e += e.tau * de * de;
        out.f += e.tau * (pos(wks) - pos(wk)) * (phi(wks) - phi(wk));
    }
    return out;
}

double beta_u(const BFunction& B, double norm_u_inf, double diameter) {
    if (norm_u_inf < 0.0 || !(diameter > 0.0))
        throw std::invalid_argument("beta_u: bad norm or diameter");
    double smax = diameter * norm_u_inf;
    double inf = 1.0;
    switch (B.kind) {
        case BKind::Upwind:
            inf = 1.0;  // B(s) = 1 + s^- >= 1, attained at s >= 0
            break;
        case BKind::ScharfetterGummel:
        case BKind::Centered:
            // both are decreasing: inf at the right endpoint
            inf = b_eval_raw(B, smax);
            break;
        case BKind::Custom: {
            // dense sampling plus golden-section refinement around the minimum
            const int n = 4096;
            inf = b_eval_raw(B, -smax);
            double sbest = -smax;
            for (int i = 1; i <= n; ++i) {
                double s = -smax + 2.0 * smax * i / n;
                double val = b_eval_raw(B, s);
                if (val < inf) {
                    inf = val;
                    sbest = s;
                }
            }
            double step = 2.0 * smax / n;
            double a = std::max(-smax, sbest - step), b = std::min(smax, sbest + step);
            const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
            double c = b - gr * (b - a), d = a + gr * (b - a);
            for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, smax); ++it) {
                if (b_eval_raw(B, c) < b_eval_raw(B, d)) {
                    b = d;
                } else {
                    a = c;
                }
                c = b - gr * (b - a);
                d = a + gr * (b - a);
            }
            inf = std::min(inf, b_eval_raw(B, (a + b) / 2));
            break;
        }
    }
    if (!(inf > 0.0))
        throw AssemblyError("beta_u: infimum of B is nonpositive on the sampled range");
    return std::min(inf, 1.0);
}

EnergyReport check_fundamental_estimate(const Mesh& mesh, std::span<const double> v,
                                        const DiscreteData& data, const Norms& norms,
                                        const BFunction& B, int m) {
    EnergyReport rep;
    rep.m = m;
    rep.threshold = truncation_threshold(m);

    for (double f : data.f_cell)
        if (f < -1e-12) rep.applicable = false;
    for (const auto& e : mesh.edges)
        if (e.kind == EdgeKind::Dirichlet) {
            double vd = data.vd_edge[e.id];
            if (vd < -1e-12 || vd > 1.0 + 1e-12) rep.applicable = false;
        }
    if (!rep.applicable) return rep;

    EnergyPair en = energy(mesh, v, data.vd_edge, m);
    rep.e_m = en.e;
    rep.f_m = en.f;
    for (const auto& c : mesh.cells)
        if (v[c.id] > rep.threshold) rep.level_set_measure += c.measure;

    double beta = beta_u(B, norms.u_inf, mesh.domain_diameter);
    double p = static_cast<double>(mesh.dim);
    rep.rhs_bound = (4.0 * p / (beta * beta)) * (norms.u_inf * norms.u_inf + norms.f_inf) *
                    rep.level_set_measure;
    rep.holds = rep.e_m <= rep.rhs_bound * (1.0 + 1e-10);
    return rep;
}

SequenceBound sequence_bound(double u0, double Kconst, double rho, double alpha, int n) {
    if (!(alpha > 1.0)) throw std::invalid_argument("sequence_bound: alpha > 1 required");
    if (!(Kconst > 0.0) || !(rho > 0.0))
        throw std::invalid_argument("sequence_bound: K, rho > 0 required");
    if (u0 < 0.0 || n < 0) throw std::invalid_argument("sequence_bound: u0 >= 0, n >= 0");

    const double am1 = alpha - 1.0;
    SequenceBound out;
    out.smallness_threshold =
        std::pow(rho, -1.0 / (am1 * am1)) * std::pow(Kconst, -1.0 / am1);
    if (u0 == 0.0) {
        out.bound_n = 0.0;
        return out;
    }
    double base = u0 * std::pow(rho, 1.0 / (am1 * am1)) * std::pow(Kconst, 1.0 / am1);
    double an = std::pow(alpha, n);
    double tail_log = -((n * am1 + 1.0) / (am1 * am1)) * std::log(rho) -
                      std::log(Kconst) / am1;
    double log_bound = an * std::log(base) + tail_log;
    if (std::abs(an * std::log(base)) < 700.0 && std::abs(tail_log) < 700.0) {
        // direct evaluation is safe and keeps exact powers exact
        out.bound_n = std::pow(base, an) * std::exp(tail_log);
    } else {
        out.bound_n = std::exp(log_bound);  // may round to 0 or inf at the extremes
    }
    return out;
}

namespace {

// Per-level needed constant c in  lhs <= c * rest; 0 when unconstrained.
double needed_constant(double lhs, double rest) {
    if (lhs <= 0.0) return 0.0;
    if (rest <= 0.0) return std::numeric_limits<double>::infinity();
    return lhs / rest;
}

}  // namespace

CascadeReport verify_energy_cascade(const Mesh& mesh, std::span<const double> v,
                                    const DiscreteData& data, const Norms& norms,
                                    const BFunction& B, int m_max,
                                    const BoundConstants& constants) {
    CascadeReport rep;
    double beta = beta_u(B, norms.u_inf, mesh.domain_diameter);
    double p = static_cast<double>(mesh.dim);
    double xi32 = std::pow(constants.xi, 1.5);
    double prev_e = 0.0;

    for (int m = 1; m <= m_max; ++m) {
        CascadeLevel lev;
        lev.m = m;
        lev.threshold = truncation_threshold(m);
        EnergyPair en = energy(mesh, v, data.vd_edge, m);
        lev.e_m = en.e;
        lev.f_m = en.f;
        for (const auto& c : mesh.cells)
            if (v[c.id] > lev.threshold) lev.level_set_measure += c.measure;
        lev.trivial = lev.level_set_measure == 0.0;

        lev.fundamental_rhs = (4.0 * p / (beta * beta)) *
                              (norms.u_inf * norms.u_inf + norms.f_inf) * lev.level_set_measure;
        lev.fundamental_holds = lev.e_m <= lev.fundamental_rhs * (1.0 + 1e-10);

        if (m >= 2) {
            double log3 = std::pow(std::log1p(std::ldexp(1.0, 1 - m)), 3.0);
            double rest_meas = std::pow(prev_e, 1.5) / (xi32 * log3);
            lev.measure_bound = constants.poincare_c * rest_meas;
            lev.measure_holds = lev.level_set_measure <= lev.measure_bound * (1.0 + 1e-10);
            double rest_rec = (4.0 / (beta * beta)) *
                              (norms.u_inf * norms.u_inf + norms.f_inf) / xi32 *
                              std::pow(8.0, m - 1) * std::pow(prev_e, 1.5);
            lev.recursion_bound = constants.eta * rest_rec;
            lev.recursion_holds = lev.e_m <= lev.recursion_bound * (1.0 + 1e-10);

            if (!lev.trivial) {
                rep.calibrated_poincare_c =
                    std::max(rep.calibrated_poincare_c,
                             needed_constant(lev.level_set_measure, rest_meas));
                rep.calibrated_recursion_c =
                    std::max(rep.calibrated_recursion_c, needed_constant(lev.e_m, rest_rec));
            }
        } else {
            lev.measure_holds = true;
            lev.recursion_holds = true;
        }
        prev_e = lev.e_m;
        rep.levels.push_back(lev);
    }
    return rep;
}

SignDecomposition decompose_signed(const Mesh& mesh, const ProblemSpec& spec, const BFunction& B,
                                   int quadrature_order, double tol) {
    auto part = [](const ScalarField& f, double sign) -> ScalarField {
        return [f, sign](double x, double y) { return std::max(sign * f(x, y), 0.0); };
    };

    ProblemSpec plus = spec;
    plus.source = part(spec.source, 1.0);
    plus.dirichlet_value = part(spec.dirichlet_value, 1.0);
    ProblemSpec minus = spec;
    minus.source = part(spec.source, -1.0);
    minus.dirichlet_value = part(spec.dirichlet_value, -1.0);

    SignDecomposition out;
    DiscreteData d0 = discretize_data(mesh, spec, quadrature_order);
    DiscreteData dp = discretize_data(mesh, plus, quadrature_order);
    DiscreteData dn = discretize_data(mesh, minus, quadrature_order);
    // same matrix for all three; only the data differ
    out.solution = solve(assemble(mesh, d0, B), tol);
    out.positive_part = solve(assemble(mesh, dp, B), tol);
    out.negative_part = solve(assemble(mesh, dn, B), tol);
    for (size_t i = 0; i < out.solution.size(); ++i)
        out.residual = std::max(out.residual, std::abs(out.solution[i] - (out.positive_part[i] -
                                                                          out.negative_part[i])));
    return out;
}

double a_priori_bound(const Norms& norms, const BoundConstants& constants, BoundSign sign) {
    if (!(constants.boundm_c > 0.0))
        throw std::invalid_argument("a_priori_bound: boundm_c > 0 required");
    const double u2 = norms.u_inf * norms.u_inf;
    const double f = sign == BoundSign::Plus ? norms.f_plus_inf : norms.f_minus_inf;
    const double vd = sign == BoundSign::Plus ? norms.vd_plus_inf : norms.vd_minus_inf;
    const double V = std::max(vd, 1.0);
    const double beta = constants.beta_u;
    const double rhs_c = constants.boundm_c * beta * beta * beta * beta;

    // Work with L = log(M/V) so huge bounds do not overflow.
    auto feasible = [&](double L) {
        double f_over_m = (f / V) * std::exp(-L);
        double lhs = (u2 * (u2 + f / V) + f_over_m * L * L);
        double t = u2 + f_over_m;
        lhs *= t * t;
        return lhs <= rhs_c * L * L;
    };

    const double ln2 = std::log(2.0);
    double hi = ln2;  // M = 2 V
    int doublings = 0;
    while (!feasible(hi)) {
        hi += ln2;
        if (++doublings > 5000)
            throw SolverError("a_priori_bound: no feasible M found (pathological constants)");
    }
    double lo = hi - ln2 > 0.0 ? hi - ln2 : 0.0;  // infeasible (or M = V boundary)
    for (int it = 0; it < 200 && (hi - lo) > 1e-7; ++it) {
        double mid = (lo + hi) / 2;
        if (mid <= 0.0) break;
        if (feasible(mid))
            hi = mid;
        else
            lo = mid;
    }
    return V * std::exp(hi);
}

UniformBoundReport verify_uniform_bound(const ProblemSpec& spec, const BFunction& B,
                                        const std::function<Mesh(int, int)>& mesh_for,
                                        const std::vector<std::pair<int, int>>& refinements,
                                        BoundConstants constants, int quadrature_order,
                                        double tol) {
    UniformBoundReport rep;
    Norms norms;
    for (auto [nx, ny] : refinements) {
        RefinementLevel lev;
        lev.nx = nx;
        lev.ny = ny;
        try {
            Mesh mesh = mesh_for(nx, ny);
            lev.size_h = mesh.size_h;
            DiscreteData data = discretize_data(mesh, spec, quadrature_order);
            ProblemSpec s = spec;
            s.norms = compute_norms(mesh, s, data);
            norms = s.norms;
            constants.beta_u = beta_u(B, norms.u_inf, mesh.domain_diameter);
            constants.xi = mesh.xi;
            constants.p = mesh.dim;
            constants.norm_u_inf = norms.u_inf;
            constants.norm_f_inf = norms.f_inf;
            std::vector<double> v = solve(assemble(mesh, data, B), tol);
            lev.v_max = -1e300;
            lev.v_min = 1e300;
            for (double x : v) {
                lev.v_max = std::max(lev.v_max, x);
                lev.v_min = std::min(lev.v_min, x);
            }
            lev.solved = true;
        } catch (const std::exception& e) {
            lev.error = e.what();
        }
        rep.levels.push_back(lev);
    }

    rep.m_bar = a_priori_bound(norms, constants, BoundSign::Plus);
    rep.m_underbar = a_priori_bound(norms, constants, BoundSign::Minus);
    rep.bounded = true;
    for (const auto& lev : rep.levels) {
        if (!lev.solved) continue;
        if (lev.v_max > rep.m_bar + tol || lev.v_min < -rep.m_underbar - tol) rep.bounded = false;
    }
    // h-independence across the two finest solved levels
    std::vector<const RefinementLevel*> solved;
    for (const auto& lev : rep.levels)
        if (lev.solved) solved.push_back(&lev);
    if (solved.size() >= 2) {
        double a = std::max(std::abs(solved[solved.size() - 2]->v_max),
                            std::abs(solved[solved.size() - 2]->v_min));
        double b = std::max(std::abs(solved.back()->v_max), std::abs(solved.back()->v_min));
        double scale = std::max(std::abs(b), 1e-300);
        rep.h_independent = std::abs(a - b) / scale < 0.10;
    }
    return rep;
}

}  // namespace fvbs
