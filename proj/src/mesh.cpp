#include "fvbs/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "fvbs/errors.hpp"

namespace fvbs {

namespace {
constexpr double kOrthoTol = 1e-10;  // radians
}

BoundaryRule all_dirichlet() {
    return [](const Point&, const Point&) { return EdgeKind::Dirichlet; };
}

BoundaryRule dirichlet_where(std::function<bool(const Point&, const Point&)> pred) {
    return [pred = std::move(pred)](const Point& mid, const Point& n) {
        return pred(mid, n) ? EdgeKind::Dirichlet : EdgeKind::Neumann;
    };
}

BoundaryRule dirichlet_left_right() {
    return dirichlet_where([](const Point&, const Point& n) { return std::abs(n.x) > 0.5; });
}

BoundaryRule dirichlet_west_only() {
    return dirichlet_where([](const Point&, const Point& n) { return n.x < -0.5; });
}

double center_edge_distance(const Cell& cell, const Edge& edge) {
    // The edge lies in the line through its midpoint orthogonal to its normal.
    double dx = edge.midpoint.x - cell.center.x;
    double dy = edge.midpoint.y - cell.center.y;
    return std::abs(dx * edge.normal.x + dy * edge.normal.y);
}

namespace {

void finalize_metrics(Mesh& mesh) {
    double total = 0.0;
    for (const auto& c : mesh.cells) total += c.measure;
    mesh.domain_measure = total;

    // Bounding box of all geometric points; its diagonal dominates the
    // true diameter, which keeps beta_U conservative.
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto grow = [&](const Point& p) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    };
    for (const auto& c : mesh.cells) grow(c.center);
    for (const auto& e : mesh.edges) grow(e.midpoint);
    mesh.domain_diameter = std::hypot(xmax - xmin, ymax - ymin);

    // Cell diameter estimated from its edge midpoints (exact bounds are
    // substituted for tensor cells below).
    double h = 0.0;
    for (const auto& c : mesh.cells) {
        double d = 0.0;
        for (size_t a = 0; a < c.edge_ids.size(); ++a)
            for (size_t b = a + 1; b < c.edge_ids.size(); ++b)
                d = std::max(d, dist(mesh.edges[c.edge_ids[a]].midpoint,
                                     mesh.edges[c.edge_ids[b]].midpoint));
        h = std::max(h, d);
    }
    if (mesh.has_rect_cells) {
        h = 0.0;
        for (const auto& rb : mesh.rect_bounds)
            h = std::max(h, std::hypot(rb[2] - rb[0], rb[3] - rb[1]));
    }
    mesh.size_h = h;

    mesh.xi = check_admissibility(mesh).xi_measured;
}

void structural_checks(const Mesh& mesh) {
    const int nc = static_cast<int>(mesh.cells.size());
    for (const auto& c : mesh.cells) {
        if (!(c.measure > 0.0))
            throw MeshError("cell " + std::to_string(c.id) + ": nonpositive measure");
        if (c.edge_ids.empty())
            throw MeshError("cell " + std::to_string(c.id) + ": no edges");
    }
    for (const auto& e : mesh.edges) {
        std::string tag = "edge " + std::to_string(e.id);
        if (!(e.measure > 0.0)) throw MeshError(tag + ": nonpositive measure");
        if (!(e.d_sigma > 0.0)) throw MeshError(tag + ": nonpositive d_sigma");
        double nn = std::hypot(e.normal.x, e.normal.y);
        if (std::abs(nn - 1.0) > 1e-6) throw MeshError(tag + ": normal is not unit length");
        if (e.cell_a < 0 || e.cell_a >= nc) throw MeshError(tag + ": owner out of range");
        if (e.kind == EdgeKind::Interior) {
            if (e.cell_b < 0 || e.cell_b >= nc || e.cell_b == e.cell_a)
                throw MeshError(tag + ": bad interior neighbor");
            double d = dist(mesh.cells[e.cell_a].center, mesh.cells[e.cell_b].center);
            if (std::abs(d - e.d_sigma) > 1e-9 * std::max(1.0, d))
                throw MeshError(tag + ": d_sigma does not match center distance");
        } else {
            if (e.cell_b != -1) throw MeshError(tag + ": boundary edge with two cells");
            double d = center_edge_distance(mesh.cells[e.cell_a], e);
            if (std::abs(d - e.d_sigma) > 1e-9 * std::max(1.0, d))
                throw MeshError(tag + ": d_sigma does not match center-edge distance");
        }
        if (std::abs(e.tau * e.d_sigma - e.measure) >
            4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, e.measure) +
                1e-12 * e.measure)
            throw MeshError(tag + ": tau inconsistent with measure/d_sigma");
    }
    // Interior edges referenced by exactly two cells, boundary by one;
    // closed-boundary check: outward normals weighted by edge measures sum
    // to zero on every cell.
    std::vector<int> refs(mesh.edges.size(), 0);
    for (const auto& c : mesh.cells) {
        double sx = 0.0, sy = 0.0, perim = 0.0;
        for (int eid : c.edge_ids) {
            if (eid < 0 || eid >= static_cast<int>(mesh.edges.size()))
                throw MeshError("cell " + std::to_string(c.id) + ": edge id out of range");
            const Edge& e = mesh.edges[eid];
            ++refs[eid];
            double s = e.orientation(c.id);
            sx += s * e.measure * e.normal.x;
            sy += s * e.measure * e.normal.y;
            perim += e.measure;
        }
        if (std::hypot(sx, sy) > 1e-9 * perim)
            throw MeshError("cell " + std::to_string(c.id) + ": edges do not close the boundary");
    }
    for (const auto& e : mesh.edges) {
        int want = e.kind == EdgeKind::Interior ? 2 : 1;
        if (refs[e.id] != want)
            throw MeshError("edge " + std::to_string(e.id) + ": referenced by " +
                            std::to_string(refs[e.id]) + " cells, expected " +
                            std::to_string(want));
    }
}

}  // namespace

Mesh build_rectangular_mesh(int nx, int ny, const Rect& rect, const BoundaryRule& rule) {
    if (nx < 1 || ny < 1) throw MeshError("build_rectangular_mesh: need nx, ny >= 1");
    double lx = rect.x1 - rect.x0, ly = rect.y1 - rect.y0;
    if (!(lx > 0.0) || !(ly > 0.0)) throw MeshError("build_rectangular_mesh: degenerate rectangle");

    const double hx = lx / nx, hy = ly / ny;
    Mesh mesh;
    mesh.dim = 2;
    mesh.has_rect_cells = true;

    auto cid = [&](int i, int j) { return j * nx + i; };
    mesh.cells.resize(static_cast<size_t>(nx) * ny);
    mesh.rect_bounds.resize(mesh.cells.size());
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            Cell& c = mesh.cells[cid(i, j)];
            c.id = cid(i, j);
            double x0 = rect.x0 + i * hx, y0 = rect.y0 + j * hy;
            c.center = {x0 + hx / 2, y0 + hy / 2};
            c.measure = hx * hy;
            mesh.rect_bounds[c.id] = {x0, y0, x0 + hx, y0 + hy};
        }

    int ndirichlet = 0;
    auto add_edge = [&](EdgeKind kind, int ca, int cb, double measure, double d, Point mid,
                        Point normal) {
        Edge e;
        e.id = static_cast<int>(mesh.edges.size());
        e.kind = kind;
        e.cell_a = ca;
        e.cell_b = cb;
        e.measure = measure;
        e.d_sigma = d;
        e.tau = measure / d;
        e.midpoint = mid;
        e.normal = normal;
        mesh.cells[ca].edge_ids.push_back(e.id);
        if (cb >= 0) mesh.cells[cb].edge_ids.push_back(e.id);
        if (kind == EdgeKind::Dirichlet) ++ndirichlet;
        mesh.edges.push_back(e);
    };
    auto add_boundary = [&](int c, double measure, double d, Point mid, Point normal) {
        EdgeKind kind = rule(mid, normal);
        if (kind == EdgeKind::Interior)
            throw MeshError("boundary rule returned Interior for a boundary edge");
        add_edge(kind, c, -1, measure, d, mid, normal);
    };

    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            double x0 = rect.x0 + i * hx, y0 = rect.y0 + j * hy;
            double xc = x0 + hx / 2, yc = y0 + hy / 2;
            // west / east
            if (i == 0)
                add_boundary(cid(i, j), hy, hx / 2, {x0, yc}, {-1.0, 0.0});
            if (i + 1 < nx)  // interior vertical edge, owner = lower index
                add_edge(EdgeKind::Interior, cid(i, j), cid(i + 1, j), hy, hx, {x0 + hx, yc},
                         {1.0, 0.0});
            else
                add_boundary(cid(i, j), hy, hx / 2, {x0 + hx, yc}, {1.0, 0.0});
            // south / north
            if (j == 0)
                add_boundary(cid(i, j), hx, hy / 2, {xc, y0}, {0.0, -1.0});
            if (j + 1 < ny)
                add_edge(EdgeKind::Interior, cid(i, j), cid(i, j + 1), hx, hy, {xc, y0 + hy},
                         {0.0, 1.0});
            else
                add_boundary(cid(i, j), hx, hy / 2, {xc, y0 + hy}, {0.0, 1.0});
        }

    if (ndirichlet == 0)
        throw MeshError("build_rectangular_mesh: all-Neumann boundary (m(Gamma^D) > 0 required)");

    structural_checks(mesh);
    finalize_metrics(mesh);
    return mesh;
}

AdmissibilityReport check_admissibility(const Mesh& mesh) {
    AdmissibilityReport rep;
    double xi = 1e300;
    for (const auto& c : mesh.cells) {
        for (int eid : c.edge_ids) {
            const Edge& e = mesh.edges[eid];
            double ratio = center_edge_distance(c, e) / e.d_sigma;
            if (ratio < xi) {
                xi = ratio;
                rep.worst_cell = c.id;
            }
        }
    }
    rep.xi_measured = mesh.cells.empty() ? 0.0 : xi;

    rep.inegvol_ok = true;
    const double p = static_cast<double>(mesh.dim);
    for (const auto& c : mesh.cells) {
        double s = 0.0;
        for (int eid : c.edge_ids) s += mesh.edges[eid].measure * mesh.edges[eid].d_sigma;
        if (s > (p / rep.xi_measured) * c.measure * (1.0 + 1e-12)) {
            rep.inegvol_ok = false;
            break;
        }
    }

    rep.orthogonality_ok = true;
    for (const auto& e : mesh.edges) {
        if (e.kind != EdgeKind::Interior) continue;
        const Point& a = mesh.cells[e.cell_a].center;
        const Point& b = mesh.cells[e.cell_b].center;
        double dx = b.x - a.x, dy = b.y - a.y;
        double len = std::hypot(dx, dy);
        // angle between the center segment and the edge normal
        double cross = std::abs(dx * e.normal.y - dy * e.normal.x) / len;
        if (std::asin(std::min(1.0, cross)) > kOrthoTol) {
            rep.orthogonality_ok = false;
            break;
        }
    }
    return rep;
}

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open mesh file: " + path);
    Mesh mesh;
    std::string line;
    int ncells = -1, nedges = -1;
    int lineno = 0;
    bool header_seen = false;
    std::vector<bool> tau_given;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        auto fail = [&](const std::string& msg) -> MeshError {
            return MeshError(path + ":" + std::to_string(lineno) + ": " + msg);
        };
        if (kw == "mesh") {
            int p;
            if (!(ls >> p >> ncells >> nedges)) throw fail("bad header line");
            if (p != 2) throw fail("only p = 2 meshes are supported by this format");
            if (ncells < 1 || nedges < 1) throw fail("bad cell/edge counts");
            mesh.dim = p;
            mesh.cells.resize(ncells);
            mesh.edges.resize(nedges);
            tau_given.assign(nedges, false);
            header_seen = true;
        } else if (kw == "cell") {
            if (!header_seen) throw fail("cell line before header");
            int id;
            double x, y, m;
            if (!(ls >> id >> x >> y >> m)) throw fail("bad cell line");
            if (id < 0 || id >= ncells) throw fail("cell id out of range");
            if (mesh.cells[id].id >= 0) throw fail("duplicate cell " + std::to_string(id));
            mesh.cells[id] = Cell{id, {x, y}, m, {}};
        } else if (kw == "edge") {
            if (!header_seen) throw fail("edge line before header");
            int id, ca, cb;
            std::string kindstr;
            double m, d, mx, my, nx, ny;
            if (!(ls >> id >> kindstr >> ca >> cb >> m >> d >> mx >> my >> nx >> ny))
                throw fail("bad edge line");
            if (id < 0 || id >= nedges) throw fail("edge id out of range");
            if (mesh.edges[id].id >= 0) throw fail("duplicate edge " + std::to_string(id));
            Edge e;
            e.id = id;
            if (kindstr == "I")
                e.kind = EdgeKind::Interior;
            else if (kindstr == "D")
                e.kind = EdgeKind::Dirichlet;
            else if (kindstr == "N")
                e.kind = EdgeKind::Neumann;
            else
                throw fail("unknown edge kind '" + kindstr + "'");
            e.cell_a = ca;
            e.cell_b = cb;
            e.measure = m;
            e.d_sigma = d;
            e.midpoint = {mx, my};
            e.normal = {nx, ny};
            double tau;
            if (ls >> tau) {
                // optional redundant transmissibility, must agree with m/d
                if (!(d > 0.0) || std::abs(tau - m / d) > 1e-9 * std::max(1.0, m / d))
                    throw fail("edge " + std::to_string(id) + ": stored tau " +
                               std::to_string(tau) + " contradicts m(sigma)/d_sigma");
                tau_given[id] = true;
            }
            std::string junk;
            if (ls >> junk)
                throw fail("edge " + std::to_string(id) + ": unexpected trailing field '" + junk +
                           "'");
            e.tau = (d > 0.0) ? m / d : 0.0;
            mesh.edges[id] = e;
        } else {
            throw fail("unknown keyword '" + kw + "'");
        }
    }
    if (!header_seen) throw MeshError(path + ": missing header line");
    for (const auto& c : mesh.cells)
        if (c.id < 0) throw MeshError(path + ": missing cell record");
    for (const auto& e : mesh.edges)
        if (e.id < 0) throw MeshError(path + ": missing edge record");

    for (const auto& e : mesh.edges) {
        if (e.cell_a < 0 || e.cell_a >= static_cast<int>(mesh.cells.size()))
            throw MeshError(path + ": edge " + std::to_string(e.id) + ": owner out of range");
        mesh.cells[e.cell_a].edge_ids.push_back(e.id);
        if (e.kind == EdgeKind::Interior) {
            if (e.cell_b < 0 || e.cell_b >= static_cast<int>(mesh.cells.size()))
                throw MeshError(path + ": edge " + std::to_string(e.id) +
                                ": neighbor out of range");
            mesh.cells[e.cell_b].edge_ids.push_back(e.id);
        }
    }

    structural_checks(mesh);
    finalize_metrics(mesh);
    if (!(mesh.xi > 0.0))
        throw MeshError(path + ": degenerate mesh, reg-mesh fails (xi = 0), worst cell " +
                        std::to_string(check_admissibility(mesh).worst_cell));
    return mesh;
}

void save_mesh(const std::string& path, const Mesh& mesh) {
    std::ofstream out(path);
    if (!out) throw MeshError("cannot open for writing: " + path);
    out << std::setprecision(17);
    out << "mesh " << mesh.dim << " " << mesh.cells.size() << " " << mesh.edges.size() << "\n";
    for (const auto& c : mesh.cells)
        out << "cell " << c.id << " " << c.center.x << " " << c.center.y << " " << c.measure
            << "\n";
    for (const auto& e : mesh.edges) {
        char k = e.kind == EdgeKind::Interior ? 'I' : (e.kind == EdgeKind::Dirichlet ? 'D' : 'N');
        out << "edge " << e.id << " " << k << " " << e.cell_a << " " << e.cell_b << " "
            << e.measure << " " << e.d_sigma << " " << e.midpoint.x << " " << e.midpoint.y << " "
            << e.normal.x << " " << e.normal.y << " " << e.tau << "\n";
    }
}

}  // namespace fvbs
