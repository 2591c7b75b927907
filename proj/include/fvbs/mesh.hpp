#ifndef FVBS_MESH_HPP
#define FVBS_MESH_HPP

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace fvbs {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double dist(const Point& a, const Point& b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

enum class EdgeKind { Interior, Dirichlet, Neumann };

struct Cell {
    int id = -1;
    Point center;         // x_K
    double measure = 0.0;  // m(K)
    std::vector<int> edge_ids;
};

struct Edge {
    int id = -1;
    EdgeKind kind = EdgeKind::Interior;
    int cell_a = -1;        // owner K_sigma
    int cell_b = -1;        // second cell for interior edges, -1 otherwise
    double measure = 0.0;   // m(sigma)
    double d_sigma = 0.0;   // d(x_K,x_L) or d(x_K,sigma)
    double tau = 0.0;       // m(sigma)/d(sigma)
    Point midpoint;
    Point normal;           // unit, outward from owner cell_a

    bool is_boundary() const { return kind != EdgeKind::Interior; }
    /// +1 if `cell` is the owner, -1 for the opposite interior cell.
    double orientation(int cell) const { return cell == cell_a ? 1.0 : -1.0; }
    int neighbor(int cell) const { return cell == cell_a ? cell_b : cell_a; }
};

struct Mesh {
    int dim = 2;  // p
    std::vector<Cell> cells;
    std::vector<Edge> edges;
    double size_h = 0.0;
    double domain_diameter = 0.0;
    double domain_measure = 0.0;
    double xi = 0.0;  // measured regularity constant of reg-mesh

    // Tensor-product cells carry their bounding box so cell quadrature can
    // be exact; loaded general meshes fall back to midpoint evaluation.
    bool has_rect_cells = false;
    std::vector<std::array<double, 4>> rect_bounds;  // x0, y0, x1, y1
};

struct Rect {
    double x0, y0, x1, y1;
};

/// Classifies a boundary edge given its midpoint and outward normal.
using BoundaryRule = std::function<EdgeKind(const Point& mid, const Point& normal)>;

BoundaryRule all_dirichlet();
/// Dirichlet where the predicate holds, Neumann elsewhere.
BoundaryRule dirichlet_where(std::function<bool(const Point& mid, const Point& normal)> pred);
/// Dirichlet on x == x0 and x == x1 faces, Neumann on y faces (1D-like strips).
BoundaryRule dirichlet_left_right();
BoundaryRule dirichlet_west_only();

Mesh build_rectangular_mesh(int nx, int ny, const Rect& rect, const BoundaryRule& rule);

Mesh load_mesh(const std::string& path);
void save_mesh(const std::string& path, const Mesh& mesh);

struct AdmissibilityReport {
    double xi_measured = 0.0;
    bool inegvol_ok = false;
    bool orthogonality_ok = false;
    int worst_cell = -1;  // cell attaining the minimum d(x_K,sigma)/d_sigma
};

AdmissibilityReport check_admissibility(const Mesh& mesh);

/// Distance from a cell center to the line supporting an edge.
double center_edge_distance(const Cell& cell, const Edge& edge);

}  // namespace fvbs

#endif
