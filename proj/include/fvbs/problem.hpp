#ifndef FVBS_PROBLEM_HPP
#define FVBS_PROBLEM_HPP

#include <functional>
#include <vector>

#include "fvbs/mesh.hpp"

namespace fvbs {

using ScalarField = std::function<double(double, double)>;

struct VectorField {
    ScalarField x, y;
};

/// Sup norms of the data. Computed as the max over a sampling lattice and
/// every quadrature node used in discretization, so they dominate all
/// discrete averages (a sampled lower estimate of the true sup).
struct Norms {
    double u_inf = 0.0;
    double f_inf = 0.0;
    double f_plus_inf = 0.0;
    double f_minus_inf = 0.0;
    double vd_plus_inf = 0.0;
    double vd_minus_inf = 0.0;
};

/// Continuous problem data: div(-grad v + U v) + b v = f, v = v^D on
/// Gamma^D, zero total flux on Gamma^N.
struct ProblemSpec {
    VectorField velocity;        // U
    ScalarField reaction;        // b >= 0
    ScalarField source;          // f
    ScalarField dirichlet_value; // v^D
    Norms norms;
};

ProblemSpec zero_velocity_problem(ScalarField reaction, ScalarField source,
                                  ScalarField dirichlet_value);

inline ScalarField constant_field(double c) {
    return [c](double, double) { return c; };
}

/// Cell and edge averages of the problem data.
struct DiscreteData {
    std::vector<double> f_cell;   // f_K
    std::vector<double> b_cell;   // b_K >= 0
    std::vector<double> u_edge;   // U_{K,sigma} in the owner orientation
    std::vector<double> vd_edge;  // v^D_sigma on Dirichlet edges, NaN elsewhere
};

/// Gauss quadrature averages: tensor rule on rectangular cells (midpoint
/// value on general cells), Gauss-Legendre on edges. Exact for constants;
/// for tensor cells exact up to the polynomial degree of the order.
DiscreteData discretize_data(const Mesh& mesh, const ProblemSpec& spec, int quadrature_order = 3);

/// Fills spec.norms from a lattice sample plus the discrete averages.
Norms compute_norms(const Mesh& mesh, const ProblemSpec& spec, const DiscreteData& data,
                    int lattice_n = 64);

}  // namespace fvbs

#endif
