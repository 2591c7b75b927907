#ifndef FVBS_CONFIG_HPP
#define FVBS_CONFIG_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fvbs/bfunction.hpp"
#include "fvbs/mesh.hpp"
#include "fvbs/problem.hpp"

namespace fvbs {

struct MeshConfig {
    std::string file;  // load from file when nonempty
    int nx = 16, ny = 16;
    Rect rect{0.0, 0.0, 1.0, 1.0};
    std::string boundary = "all-dirichlet";  // all-dirichlet | left-right | west
};

struct SchemeConfig {
    BKind b = BKind::Upwind;
    int quadrature_order = 3;
    double solver_tol = 1e-12;
};

struct ProblemConfig {
    std::string preset;
    std::string ux, uy, b, f, vd;  // field expressions over x, y
};

struct DeGiorgiConfig {
    int m_max = 12;
    double eta = 1.0;
    double poincare_c = 1.0;
    double boundm_c = 1.0;
    std::uint64_t seed = 42;
    int trials = 50;
    std::vector<std::pair<int, int>> refinements = {{8, 8}, {16, 16}, {32, 32}};
};

struct OutputConfig {
    std::string dir = "out";
    bool dump_system = false;
};

struct RunConfig {
    MeshConfig mesh;
    SchemeConfig scheme;
    ProblemConfig problem;
    DeGiorgiConfig degiorgi;
    OutputConfig output;
    bool quiet = false;
};

/// Parses the sectioned key-value config format; unknown sections or keys
/// are rejected. Preset names expand into field expressions and mesh
/// defaults for keys the file does not set explicitly.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Round-trips a config back into its text form (used by the manifest).
std::string serialize_config(const RunConfig& config);

/// Known preset names: single-cell, laplace-linear, sg-exponential,
/// noncoercive-swirl, mixed-sign-source.
std::vector<std::string> known_presets();

Mesh build_mesh(const MeshConfig& config);
BoundaryRule boundary_rule_by_name(const std::string& name);
ProblemSpec build_problem(const ProblemConfig& config);
BFunction bfunction_by_name(const std::string& name);

}  // namespace fvbs

#endif
