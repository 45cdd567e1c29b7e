#include "pfb/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pfb {

int GridDomain::tag_of(const std::string& segment) const {
    for (std::size_t k = 0; k < segment_names.size(); ++k)
        if (segment_names[k] == segment) return static_cast<int>(k);
    throw std::invalid_argument("unknown boundary segment: " + segment);
}

double GridDomain::dist_to_boundary(int node) const {
    const double x = pos_x(ix(node)), y = pos_y(iy(node));
    double best = std::numeric_limits<double>::infinity();
    for (int b : boundary_list) {
        const double dx = pos_x(ix(b)) - x;
        const double dy = pos_y(iy(b)) - y;
        best = std::min(best, dx * dx + dy * dy);
    }
    return std::sqrt(best);
}

void GridDomain::finalize() {
    interior_list.clear();
    boundary_list.clear();
    for (int node = 0; node < node_count(); ++node) {
        if (kind[node] == NodeKind::interior)
            interior_list.push_back(node);
        else if (kind[node] == NodeKind::boundary)
            boundary_list.push_back(node);
    }
}

namespace {

// Marks as boundary every non-interior node adjacent to an interior one.
// Adjacency is 8-connected in 2D so that cell corners always carry values,
// 1-connected in 1D.
void detect_boundary(GridDomain& g) {
    g.boundary_tag.assign(g.node_count(), -1);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const int node = g.idx(i, j);
            if (g.kind[node] == NodeKind::interior) continue;
            bool adj = false;
            const int dj_max = g.one_d ? 0 : 1;
            for (int dj = -dj_max; dj <= dj_max && !adj; ++dj)
                for (int di = -1; di <= 1 && !adj; ++di) {
                    if (di == 0 && dj == 0) continue;
                    if (g.in_grid(i + di, j + dj) &&
                        g.kind[g.idx(i + di, j + dj)] == NodeKind::interior)
                        adj = true;
                }
            if (adj) g.kind[node] = NodeKind::boundary;
        }
    }
}

}  // namespace

DomainPtr build_rectangle(int nx, int ny, double h) {
    if (h <= 0.0) throw std::invalid_argument("build_rectangle: h must be positive");
    if (nx < 4 || ny < 1 || (ny != 1 && ny < 4))
        throw std::invalid_argument(
            "build_rectangle: need nx >= 4 and ny >= 4 (or ny == 1 for 1D)");

    auto g = std::make_shared<GridDomain>();
    g->nx = nx;
    g->ny = ny;
    g->h = h;
    g->one_d = (ny == 1);
    g->segment_names = {"left", "right", "bottom", "top"};
    g->kind.assign(nx * ny, NodeKind::interior);
    g->boundary_tag.assign(nx * ny, -1);

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const bool frame =
                (i == 0 || i == nx - 1) || (!g->one_d && (j == 0 || j == ny - 1));
            if (!frame) continue;
            const int node = g->idx(i, j);
            g->kind[node] = NodeKind::boundary;
            int tag;
            if (i == 0)
                tag = 0;
            else if (i == nx - 1)
                tag = 1;
            else if (j == 0)
                tag = 2;
            else
                tag = 3;
            g->boundary_tag[node] = tag;
        }
    }
    g->finalize();
    return g;
}

DomainPtr build_annulus(double inner_radius, double outer_radius, double h) {
    if (h <= 0.0) throw std::invalid_argument("build_annulus: h must be positive");
    if (!(0.0 < inner_radius && inner_radius < outer_radius))
        throw std::invalid_argument("build_annulus: need 0 < inner_radius < outer_radius");

    const int m = static_cast<int>(std::ceil(outer_radius / h)) + 2;
    auto g = std::make_shared<GridDomain>();
    g->nx = g->ny = 2 * m + 1;
    g->h = h;
    g->origin_x = g->origin_y = -m * h;
    g->segment_names = {"inner", "outer"};
    g->kind.assign(g->node_count(), NodeKind::exterior);

    for (int j = 0; j < g->ny; ++j) {
        for (int i = 0; i < g->nx; ++i) {
            const double r = std::hypot(g->pos_x(i), g->pos_y(j));
            if (r > inner_radius && r < outer_radius)
                g->kind[g->idx(i, j)] = NodeKind::interior;
        }
    }
    detect_boundary(*g);
    for (int node = 0; node < g->node_count(); ++node) {
        if (g->kind[node] != NodeKind::boundary) continue;
        const double r = std::hypot(g->pos_x(g->ix(node)), g->pos_y(g->iy(node)));
        g->boundary_tag[node] = (r <= inner_radius) ? 0 : 1;
    }
    g->finalize();
    if (g->interior_list.empty())
        throw std::invalid_argument("build_annulus: no interior nodes at this spacing");
    return g;
}

DomainPtr build_halfdisk(double radius, double h) {
    if (h <= 0.0 || radius <= 0.0)
        throw std::invalid_argument("build_halfdisk: radius and h must be positive");

    const int m = static_cast<int>(std::ceil(radius / h)) + 2;
    auto g = std::make_shared<GridDomain>();
    g->nx = 2 * m + 1;
    g->ny = m + 3;
    g->h = h;
    g->origin_x = -m * h;
    g->origin_y = -h;  // row j = 1 sits exactly on y = 0
    g->segment_names = {"flat", "arc"};
    g->kind.assign(g->node_count(), NodeKind::exterior);

    for (int j = 0; j < g->ny; ++j) {
        for (int i = 0; i < g->nx; ++i) {
            const double x = g->pos_x(i), y = g->pos_y(j);
            if (y > 0.0 && std::hypot(x, y) < radius)
                g->kind[g->idx(i, j)] = NodeKind::interior;
        }
    }
    detect_boundary(*g);
    for (int node = 0; node < g->node_count(); ++node) {
        if (g->kind[node] != NodeKind::boundary) continue;
        g->boundary_tag[node] = (g->pos_y(g->iy(node)) <= 0.0) ? 0 : 1;
    }
    g->finalize();
    if (g->interior_list.empty())
        throw std::invalid_argument("build_halfdisk: no interior nodes at this spacing");
    return g;
}

double BoundaryData::max_value() const {
    double m = 0.0;
    for (int node : owner->boundary_list) m = std::max(m, values[node]);
    return m;
}

void BoundaryData::validate() const {
    if (!owner) throw std::invalid_argument("BoundaryData: no domain");
    if (contact_tag < 0 ||
        contact_tag >= static_cast<int>(owner->segment_names.size()))
        throw std::invalid_argument("BoundaryData: invalid contact tag");
    if (!(c0 > 0.0)) throw std::invalid_argument("BoundaryData: c0 must be positive");
    bool contact_seen = false;
    for (int node : owner->boundary_list) {
        const double v = values[node];
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("BoundaryData: values must be finite and >= 0");
        if (owner->boundary_tag[node] == contact_tag) {
            contact_seen = true;
            if (v < c0)
                throw std::invalid_argument(
                    "BoundaryData: value below c0 on the contact segment");
        }
    }
    if (!contact_seen)
        throw std::invalid_argument("BoundaryData: contact segment has no nodes");
}

ScalarField make_admissible(const BoundaryData& bdata, double fill) {
    ScalarField u(bdata.owner, fill);
    for (int node : bdata.owner->boundary_list) u[node] = bdata.values[node];
    return u;
}

double positivity_measure(const ScalarField& u) {
    return u.dom().cell_measure() * static_cast<double>(positive_node_count(u));
}

long positive_node_count(const ScalarField& u) {
    long count = 0;
    for (int node : u.dom().interior_list)
        if (u[node] > 0.0) ++count;
    return count;
}

double lipschitz_estimate(const ScalarField& u) {
    const GridDomain& g = u.dom();
    double best = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (!g.in_closure(i, j)) continue;
            const double v = u.at(i, j);
            if (g.in_closure(i + 1, j))
                best = std::max(best, std::abs(u.at(i + 1, j) - v));
            if (!g.one_d && g.in_closure(i, j + 1))
                best = std::max(best, std::abs(u.at(i, j + 1) - v));
        }
    }
    return best / g.h;
}

}  // namespace pfb
