#include "fvbs/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fvbs/errors.hpp"

namespace fvbs {

ProblemSpec zero_velocity_problem(ScalarField reaction, ScalarField source,
                                  ScalarField dirichlet_value) {
    ProblemSpec spec;
    spec.velocity = {constant_field(0.0), constant_field(0.0)};
    spec.reaction = std::move(reaction);
    spec.source = std::move(source);
    spec.dirichlet_value = std::move(dirichlet_value);
    return spec;
}

namespace {

// Gauss-Legendre nodes/weights on [-1,1], n = 1..5.
struct GaussRule {
    std::vector<double> nodes, weights;
};

GaussRule gauss_rule(int npts) {
    switch (npts) {
        case 1: return {{0.0}, {2.0}};
        case 2: {
            double a = 1.0 / std::sqrt(3.0);
            return {{-a, a}, {1.0, 1.0}};
        }
        case 3: {
            double a = std::sqrt(3.0 / 5.0);
            return {{-a, 0.0, a}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
        }
        case 4: {
            double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
            double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
            double wa = (18.0 + std::sqrt(30.0)) / 36.0;
            double wb = (18.0 - std::sqrt(30.0)) / 36.0;
            return {{-b, -a, a, b}, {wb, wa, wa, wb}};
        }
        default: {
            double a = 1.0 / 3.0 * std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0));
            double b = 1.0 / 3.0 * std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0));
            double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
            double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
            return {{-b, -a, 0.0, a, b}, {wb, wa, 128.0 / 225.0, wa, wb}};
        }
    }
}

double eval_or_throw(const ScalarField& f, double x, double y, const char* what,
                     const std::string& where) {
    double v;
    try {
        v = f(x, y);
    } catch (const std::exception& e) {
        throw AssemblyError(std::string("field evaluation failed for ") + what + " at " + where +
                            ": " + e.what());
    }
    if (!std::isfinite(v))
        throw AssemblyError(std::string("non-finite ") + what + " at " + where);
    return v;
}

}  // namespace

DiscreteData discretize_data(const Mesh& mesh, const ProblemSpec& spec, int quadrature_order) {
    int npts = std::clamp((quadrature_order + 2) / 2, 1, 5);
    GaussRule g = gauss_rule(npts);

    DiscreteData data;
    data.f_cell.resize(mesh.cells.size());
    data.b_cell.resize(mesh.cells.size());
    data.u_edge.assign(mesh.edges.size(), 0.0);
    data.vd_edge.assign(mesh.edges.size(), std::numeric_limits<double>::quiet_NaN());

    for (const auto& c : mesh.cells) {
        std::string where = "cell " + std::to_string(c.id);
        double fint = 0.0, bint = 0.0;
        if (mesh.has_rect_cells) {
            const auto& rb = mesh.rect_bounds[c.id];
            double cx = (rb[0] + rb[2]) / 2, cy = (rb[1] + rb[3]) / 2;
            double sx = (rb[2] - rb[0]) / 2, sy = (rb[3] - rb[1]) / 2;
            for (int i = 0; i < npts; ++i)
                for (int j = 0; j < npts; ++j) {
                    double w = g.weights[i] * g.weights[j] / 4.0;  // average on the cell
                    double x = cx + sx * g.nodes[i], y = cy + sy * g.nodes[j];
                    fint += w * eval_or_throw(spec.source, x, y, "f", where);
                    bint += w * eval_or_throw(spec.reaction, x, y, "b", where);
                }
        } else {
            fint = eval_or_throw(spec.source, c.center.x, c.center.y, "f", where);
            bint = eval_or_throw(spec.reaction, c.center.x, c.center.y, "b", where);
        }
        if (bint < 0.0)
            throw AssemblyError("negative reaction average b_K at " + where);
        data.f_cell[c.id] = fint;
        data.b_cell[c.id] = bint;
    }

    for (const auto& e : mesh.edges) {
        std::string where = "edge " + std::to_string(e.id);
        // tangent direction of the edge in 2D
        double tx = -e.normal.y, ty = e.normal.x;
        double uint_ = 0.0, vdint = 0.0;
        for (int i = 0; i < npts; ++i) {
            double w = g.weights[i] / 2.0;  // average on the edge
            double x = e.midpoint.x + tx * (e.measure / 2) * g.nodes[i];
            double y = e.midpoint.y + ty * (e.measure / 2) * g.nodes[i];
            double ux = eval_or_throw(spec.velocity.x, x, y, "U.x", where);
            double uy = eval_or_throw(spec.velocity.y, x, y, "U.y", where);
            uint_ += w * (ux * e.normal.x + uy * e.normal.y);
            if (e.kind == EdgeKind::Dirichlet)
                vdint += w * eval_or_throw(spec.dirichlet_value, x, y, "v^D", where);
        }
        data.u_edge[e.id] = uint_;
        if (e.kind == EdgeKind::Dirichlet) data.vd_edge[e.id] = vdint;
    }
    return data;
}

Norms compute_norms(const Mesh& mesh, const ProblemSpec& spec, const DiscreteData& data,
                    int lattice_n) {
    Norms n;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& e : mesh.edges) {
        xmin = std::min(xmin, e.midpoint.x);
        xmax = std::max(xmax, e.midpoint.x);
        ymin = std::min(ymin, e.midpoint.y);
        ymax = std::max(ymax, e.midpoint.y);
    }
    for (int i = 0; i <= lattice_n; ++i)
        for (int j = 0; j <= lattice_n; ++j) {
            double x = xmin + (xmax - xmin) * i / lattice_n;
            double y = ymin + (ymax - ymin) * j / lattice_n;
            double ux = spec.velocity.x(x, y), uy = spec.velocity.y(x, y);
            n.u_inf = std::max(n.u_inf, std::hypot(ux, uy));
            double f = spec.source(x, y);
            n.f_inf = std::max(n.f_inf, std::abs(f));
            n.f_plus_inf = std::max(n.f_plus_inf, std::max(f, 0.0));
            n.f_minus_inf = std::max(n.f_minus_inf, std::max(-f, 0.0));
        }
    // Discrete averages must be dominated by the cached norms.
    for (double f : data.f_cell) {
        n.f_inf = std::max(n.f_inf, std::abs(f));
        n.f_plus_inf = std::max(n.f_plus_inf, f);
        n.f_minus_inf = std::max(n.f_minus_inf, -f);
    }
    for (const auto& e : mesh.edges) {
        n.u_inf = std::max(n.u_inf, std::abs(data.u_edge[e.id]));
        if (e.kind == EdgeKind::Dirichlet) {
            double vd = data.vd_edge[e.id];
            n.vd_plus_inf = std::max(n.vd_plus_inf, vd);
            n.vd_minus_inf = std::max(n.vd_minus_inf, -vd);
            // boundary samples of v^D itself
            double tx = -e.normal.y, ty = e.normal.x;
            for (int k = -2; k <= 2; ++k) {
                double x = e.midpoint.x + tx * e.measure * k / 4.0;
                double y = e.midpoint.y + ty * e.measure * k / 4.0;
                double v = spec.dirichlet_value(x, y);
                n.vd_plus_inf = std::max(n.vd_plus_inf, std::max(v, 0.0));
                n.vd_minus_inf = std::max(n.vd_minus_inf, std::max(-v, 0.0));
            }
        }
    }
    return n;
}

}  // namespace fvbs
