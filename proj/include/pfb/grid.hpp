#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace pfb {

enum class NodeKind : std::uint8_t { exterior = 0, interior = 1, boundary = 2 };

/// Rectangular lattice with an interior mask and tagged Dirichlet boundary
/// segments. Nodes live at origin + (i*h, j*h). Boundary nodes are the
/// masked-out nodes adjacent (8-adjacency in 2D, 1-adjacency in 1D) to an
/// interior node; everything else is exterior and carries no value.
struct GridDomain {
    int nx = 0;
    int ny = 0;
    double h = 0.0;
    double origin_x = 0.0;
    double origin_y = 0.0;
    bool one_d = false;

    std::vector<NodeKind> kind;      ///< nx*ny node classification
    std::vector<int> boundary_tag;   ///< segment tag per node, -1 if none
    std::vector<std::string> segment_names;

    std::vector<int> interior_list;  ///< interior node indices, lexicographic
    std::vector<int> boundary_list;  ///< boundary node indices, lexicographic

    int node_count() const { return nx * ny; }
    int idx(int i, int j) const { return j * nx + i; }
    int ix(int node) const { return node % nx; }
    int iy(int node) const { return node / nx; }

    double pos_x(int i) const { return origin_x + i * h; }
    double pos_y(int j) const { return origin_y + j * h; }

    int dim() const { return one_d ? 1 : 2; }
    /// Per-node measure h^N.
    double cell_measure() const { return one_d ? h : h * h; }
    /// Node-counted measure of the closed domain (interior + boundary nodes).
    double measure() const {
        return cell_measure() *
               static_cast<double>(interior_list.size() + boundary_list.size());
    }

    bool in_grid(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }
    bool is_interior(int node) const { return kind[node] == NodeKind::interior; }
    bool is_boundary(int node) const { return kind[node] == NodeKind::boundary; }
    /// True for nodes that carry a value (interior or boundary).
    bool in_closure(int node) const { return kind[node] != NodeKind::exterior; }
    bool in_closure(int i, int j) const { return in_grid(i, j) && in_closure(idx(i, j)); }

    int tag_of(const std::string& segment) const;

    /// Euclidean distance from a node to the nearest boundary node.
    double dist_to_boundary(int node) const;

    /// Fills kind-derived caches. Called by the builders.
    void finalize();
};

using DomainPtr = std::shared_ptr<const GridDomain>;

/// Full rectangle: every node in the outermost ring is a Dirichlet boundary
/// node, the rest are interior. Segments: left, right, bottom, top (corners
/// belong to left/right). ny == 1 builds a 1D interval with segments
/// left/right.
DomainPtr build_rectangle(int nx, int ny, double h);

/// Ring inner_radius < |x - center| < outer_radius on a lattice whose center
/// is a lattice node. Segments: inner, outer.
DomainPtr build_annulus(double inner_radius, double outer_radius, double h);

/// Upper half disk {|x| < radius, y > 0}. Segments: flat (the y = 0 row)
/// and arc.
DomainPtr build_halfdisk(double radius, double h);

/// Nodal values of a candidate u on a lattice.
struct ScalarField {
    DomainPtr owner;
    std::vector<double> data;

    ScalarField() = default;
    explicit ScalarField(DomainPtr dom, double fill = 0.0)
        : owner(std::move(dom)), data(owner->node_count(), fill) {}

    double& operator[](int node) { return data[node]; }
    double operator[](int node) const { return data[node]; }
    double& at(int i, int j) { return data[owner->idx(i, j)]; }
    double at(int i, int j) const { return data[owner->idx(i, j)]; }

    const GridDomain& dom() const { return *owner; }
};

/// Dirichlet datum phi_0 sampled at boundary nodes, with the contact segment
/// on which phi_0 >= c0 > 0.
struct BoundaryData {
    DomainPtr owner;
    std::vector<double> values;  ///< full lattice, meaningful at boundary nodes
    int contact_tag = -1;
    double c0 = 0.0;

    BoundaryData() = default;
    explicit BoundaryData(DomainPtr dom)
        : owner(std::move(dom)), values(owner->node_count(), 0.0) {}

    double max_value() const;
    /// Throws std::invalid_argument on any violated invariant
    /// (phi_0 >= 0 everywhere, phi_0 >= c0 > 0 on the contact segment).
    void validate() const;
};

/// Field equal to the boundary datum on boundary nodes and `fill` elsewhere.
ScalarField make_admissible(const BoundaryData& bdata, double fill = 0.0);

/// h^N times the number of interior nodes with value strictly positive.
double positivity_measure(const ScalarField& u);

/// Number of interior nodes with value strictly positive.
long positive_node_count(const ScalarField& u);

/// Max over adjacent closure node pairs of |du|/h.
double lipschitz_estimate(const ScalarField& u);

}  // namespace pfb
