#include "fvbs/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "fvbs/errors.hpp"
#include "fvbs/expr.hpp"

namespace fvbs {

std::vector<std::string> known_presets() {
    return {"single-cell", "laplace-linear", "sg-exponential", "noncoercive-swirl",
            "mixed-sign-source"};
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct KeyValues {
    // section.key -> value, plus which keys were set explicitly
    std::map<std::string, std::string> values;
    bool has(const std::string& k) const { return values.count(k) > 0; }
    void set_default(const std::string& k, const std::string& v) {
        values.emplace(k, v);
    }
};

const std::vector<std::string> kKnownKeys = {
    "mesh.file", "mesh.nx", "mesh.ny", "mesh.x0", "mesh.y0", "mesh.x1", "mesh.y1",
    "mesh.boundary",
    "scheme.b", "scheme.quadrature_order", "scheme.solver_tol",
    "problem.preset", "problem.ux", "problem.uy", "problem.b", "problem.f", "problem.vd",
    "degiorgi.m_max", "degiorgi.eta", "degiorgi.poincare_c", "degiorgi.boundm_c",
    "degiorgi.seed", "degiorgi.trials", "degiorgi.refinements",
    "output.dir", "output.dump_system",
};

void apply_preset(KeyValues& kv, const std::string& preset) {
    auto d = [&](const char* k, const char* v) { kv.set_default(k, v); };
    if (preset == "single-cell") {
        d("mesh.nx", "1");
        d("mesh.ny", "1");
        d("mesh.boundary", "all-dirichlet");
        d("scheme.b", "upwind");
        d("problem.ux", "0");
        d("problem.uy", "0");
        d("problem.b", "0");
        d("problem.f", "0");
        d("problem.vd", "1");
    } else if (preset == "laplace-linear") {
        d("mesh.boundary", "all-dirichlet");
        d("scheme.b", "upwind");
        d("problem.ux", "0");
        d("problem.uy", "0");
        d("problem.b", "0");
        d("problem.f", "0");
        d("problem.vd", "x");
    } else if (preset == "sg-exponential") {
        d("mesh.nx", "64");
        d("mesh.ny", "1");
        d("mesh.x0", "0");
        d("mesh.y0", "0");
        d("mesh.x1", "1");
        d("mesh.y1", "0.015625");
        d("mesh.boundary", "left-right");
        d("scheme.b", "sg");
        d("problem.ux", "5");
        d("problem.uy", "0");
        d("problem.b", "0");
        d("problem.f", "0");
        d("problem.vd", "x");
    } else if (preset == "noncoercive-swirl") {
        d("mesh.boundary", "west");
        d("scheme.b", "upwind");
        d("problem.ux", "-6*(y-0.5)");
        d("problem.uy", "6*(x-0.5)");
        d("problem.b", "0");
        d("problem.f", "1");
        d("problem.vd", "0");
    } else if (preset == "mixed-sign-source") {
        d("mesh.boundary", "all-dirichlet");
        d("scheme.b", "sg");
        d("problem.ux", "1");
        d("problem.uy", "-1");
        d("problem.b", "0.1");
        d("problem.f", "sin(2*pi*x)*sin(2*pi*y)");
        d("problem.vd", "0.4*sin(2*pi*(x+y))");
    } else {
        throw ConfigError("unknown preset '" + preset + "'");
    }
}

int to_int(const std::string& k, const std::string& v) {
    try {
        size_t used;
        int r = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return r;
    } catch (...) {
        throw ConfigError("config key " + k + ": invalid integer '" + v + "'");
    }
}

double to_double(const std::string& k, const std::string& v) {
    try {
        size_t used;
        double r = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return r;
    } catch (...) {
        throw ConfigError("config key " + k + ": invalid number '" + v + "'");
    }
}

bool to_bool(const std::string& k, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key " + k + ": invalid boolean '" + v + "'");
}

std::uint64_t to_u64(const std::string& k, const std::string& v) {
    try {
        size_t used;
        std::uint64_t r = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return r;
    } catch (...) {
        throw ConfigError("config key " + k + ": invalid seed '" + v + "'");
    }
}

std::vector<std::pair<int, int>> to_refinements(const std::string& k, const std::string& v) {
    std::vector<std::pair<int, int>> out;
    std::istringstream ss(v);
    std::string tok;
    while (ss >> tok) {
        auto x = tok.find('x');
        if (x == std::string::npos)
            throw ConfigError("config key " + k + ": expected NXxNY tokens, got '" + tok + "'");
        out.emplace_back(to_int(k, tok.substr(0, x)), to_int(k, tok.substr(x + 1)));
    }
    if (out.empty()) throw ConfigError("config key " + k + ": empty refinement list");
    return out;
}

}  // namespace

BFunction bfunction_by_name(const std::string& name) {
    if (name == "upwind") return BFunction::upwind();
    if (name == "sg" || name == "scharfetter-gummel") return BFunction::scharfetter_gummel();
    if (name == "centered") return BFunction::centered();
    throw ConfigError("unknown scheme '" + name + "' (expected upwind, sg, centered)");
}

BoundaryRule boundary_rule_by_name(const std::string& name) {
    if (name == "all-dirichlet") return all_dirichlet();
    if (name == "left-right") return dirichlet_left_right();
    if (name == "west") return dirichlet_west_only();
    throw ConfigError("unknown boundary rule '" + name +
                      "' (expected all-dirichlet, left-right, west)");
}

RunConfig parse_config_text(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = section + "." + trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end())
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key +
                              "'");
        if (kv.has(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key +
                              "'");
        kv.values[key] = value;
    }

    if (kv.has("problem.preset")) apply_preset(kv, kv.values["problem.preset"]);

    RunConfig c;
    auto get = [&](const char* k) -> const std::string* {
        auto it = kv.values.find(k);
        return it == kv.values.end() ? nullptr : &it->second;
    };
    if (auto* v = get("mesh.file")) c.mesh.file = *v;
    if (auto* v = get("mesh.nx")) c.mesh.nx = to_int("mesh.nx", *v);
    if (auto* v = get("mesh.ny")) c.mesh.ny = to_int("mesh.ny", *v);
    if (auto* v = get("mesh.x0")) c.mesh.rect.x0 = to_double("mesh.x0", *v);
    if (auto* v = get("mesh.y0")) c.mesh.rect.y0 = to_double("mesh.y0", *v);
    if (auto* v = get("mesh.x1")) c.mesh.rect.x1 = to_double("mesh.x1", *v);
    if (auto* v = get("mesh.y1")) c.mesh.rect.y1 = to_double("mesh.y1", *v);
    if (auto* v = get("mesh.boundary")) c.mesh.boundary = *v;
    if (auto* v = get("scheme.b")) bfunction_by_name(*v), c.scheme.b = bfunction_by_name(*v).kind;
    if (auto* v = get("scheme.quadrature_order")) {
        c.scheme.quadrature_order = to_int("scheme.quadrature_order", *v);
        if (c.scheme.quadrature_order < 1 || c.scheme.quadrature_order > 9)
            throw ConfigError("scheme.quadrature_order must be in 1..9");
    }
    if (auto* v = get("scheme.solver_tol")) {
        c.scheme.solver_tol = to_double("scheme.solver_tol", *v);
        if (!(c.scheme.solver_tol > 0.0)) throw ConfigError("scheme.solver_tol must be positive");
    }
    if (auto* v = get("problem.preset")) c.problem.preset = *v;
    if (auto* v = get("problem.ux")) c.problem.ux = *v;
    if (auto* v = get("problem.uy")) c.problem.uy = *v;
    if (auto* v = get("problem.b")) c.problem.b = *v;
    if (auto* v = get("problem.f")) c.problem.f = *v;
    if (auto* v = get("problem.vd")) c.problem.vd = *v;
    if (auto* v = get("degiorgi.m_max")) {
        c.degiorgi.m_max = to_int("degiorgi.m_max", *v);
        if (c.degiorgi.m_max < 1) throw ConfigError("degiorgi.m_max must be >= 1");
    }
    if (auto* v = get("degiorgi.eta")) c.degiorgi.eta = to_double("degiorgi.eta", *v);
    if (auto* v = get("degiorgi.poincare_c"))
        c.degiorgi.poincare_c = to_double("degiorgi.poincare_c", *v);
    if (auto* v = get("degiorgi.boundm_c"))
        c.degiorgi.boundm_c = to_double("degiorgi.boundm_c", *v);
    if (auto* v = get("degiorgi.seed")) c.degiorgi.seed = to_u64("degiorgi.seed", *v);
    if (auto* v = get("degiorgi.trials")) {
        c.degiorgi.trials = to_int("degiorgi.trials", *v);
        if (c.degiorgi.trials < 0) throw ConfigError("degiorgi.trials must be >= 0");
    }
    if (auto* v = get("degiorgi.refinements"))
        c.degiorgi.refinements = to_refinements("degiorgi.refinements", *v);
    if (auto* v = get("output.dir")) c.output.dir = *v;
    if (auto* v = get("output.dump_system"))
        c.output.dump_system = to_bool("output.dump_system", *v);

    if (c.degiorgi.eta <= 0.0 || c.degiorgi.poincare_c <= 0.0 || c.degiorgi.boundm_c <= 0.0)
        throw ConfigError("degiorgi constants must be strictly positive");
    if (c.mesh.file.empty()) {
        if (c.mesh.nx < 1 || c.mesh.ny < 1) throw ConfigError("mesh.nx, mesh.ny must be >= 1");
        if (!(c.mesh.rect.x1 > c.mesh.rect.x0) || !(c.mesh.rect.y1 > c.mesh.rect.y0))
            throw ConfigError("mesh rectangle is degenerate");
    }
    boundary_rule_by_name(c.mesh.boundary);  // validate
    if (c.problem.preset.empty()) {
        for (const auto* field : {&c.problem.ux, &c.problem.uy, &c.problem.b, &c.problem.f,
                                  &c.problem.vd})
            if (field->empty())
                throw ConfigError("problem requires a preset or all of ux, uy, b, f, vd");
    }
    // validate expressions eagerly
    build_problem(c.problem);
    return c;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream out;
    out.precision(17);
    out << "[mesh]\n";
    if (!c.mesh.file.empty()) out << "file = " << c.mesh.file << "\n";
    out << "nx = " << c.mesh.nx << "\nny = " << c.mesh.ny << "\n";
    out << "x0 = " << c.mesh.rect.x0 << "\ny0 = " << c.mesh.rect.y0 << "\nx1 = " << c.mesh.rect.x1
        << "\ny1 = " << c.mesh.rect.y1 << "\n";
    out << "boundary = " << c.mesh.boundary << "\n";
    out << "[scheme]\n";
    out << "b = " << (c.scheme.b == BKind::Upwind
                          ? "upwind"
                          : c.scheme.b == BKind::ScharfetterGummel ? "sg" : "centered")
        << "\n";
    out << "quadrature_order = " << c.scheme.quadrature_order << "\n";
    out << "solver_tol = " << c.scheme.solver_tol << "\n";
    out << "[problem]\n";
    if (!c.problem.preset.empty()) out << "preset = " << c.problem.preset << "\n";
    if (!c.problem.ux.empty()) out << "ux = " << c.problem.ux << "\n";
    if (!c.problem.uy.empty()) out << "uy = " << c.problem.uy << "\n";
    if (!c.problem.b.empty()) out << "b = " << c.problem.b << "\n";
    if (!c.problem.f.empty()) out << "f = " << c.problem.f << "\n";
    if (!c.problem.vd.empty()) out << "vd = " << c.problem.vd << "\n";
    out << "[degiorgi]\n";
    out << "m_max = " << c.degiorgi.m_max << "\n";
    out << "eta = " << c.degiorgi.eta << "\n";
    out << "poincare_c = " << c.degiorgi.poincare_c << "\n";
    out << "boundm_c = " << c.degiorgi.boundm_c << "\n";
    out << "seed = " << c.degiorgi.seed << "\n";
    out << "trials = " << c.degiorgi.trials << "\n";
    out << "refinements =";
    for (auto [nx, ny] : c.degiorgi.refinements) out << " " << nx << "x" << ny;
    out << "\n";
    out << "[output]\n";
    out << "dir = " << c.output.dir << "\n";
    out << "dump_system = " << (c.output.dump_system ? "true" : "false") << "\n";
    return out.str();
}

Mesh build_mesh(const MeshConfig& config) {
    if (!config.file.empty()) return load_mesh(config.file);
    return build_rectangular_mesh(config.nx, config.ny, config.rect,
                                  boundary_rule_by_name(config.boundary));
}

ProblemSpec build_problem(const ProblemConfig& config) {
    ProblemConfig c = config;
    if (!c.preset.empty() && c.ux.empty()) {
        // preset invoked programmatically without going through the parser
        KeyValues kv;
        apply_preset(kv, c.preset);
        c.ux = kv.values["problem.ux"];
        c.uy = kv.values["problem.uy"];
        c.b = kv.values["problem.b"];
        c.f = kv.values["problem.f"];
        c.vd = kv.values["problem.vd"];
    }
    ProblemSpec spec;
    spec.velocity.x = parse_field_expression(c.ux);
    spec.velocity.y = parse_field_expression(c.uy);
    spec.reaction = parse_field_expression(c.b);
    spec.source = parse_field_expression(c.f);
    spec.dirichlet_value = parse_field_expression(c.vd);
    return spec;
}

}  // namespace fvbs
