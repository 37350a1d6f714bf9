#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace fcable {

/// Uniform partition of [0,1]^2 into n x n axis-aligned square cells with
/// bilinear (Q1) nodes at the grid points. Nodes are numbered row-major,
/// x fastest; cells the same way. Immutable after construction.
class Mesh2D {
public:
    explicit Mesh2D(int cells_per_side);

    int cells_per_side() const { return n_; }
    double spacing() const { return 1.0 / n_; }

    std::size_t node_count() const { return static_cast<std::size_t>(n_ + 1) * (n_ + 1); }
    std::size_t cell_count() const { return static_cast<std::size_t>(n_) * n_; }
    std::size_t interior_count() const { return static_cast<std::size_t>(n_ - 1) * (n_ - 1); }

    double node_x(std::size_t node) const { return (node % (n_ + 1)) * spacing(); }
    double node_y(std::size_t node) const { return (node / (n_ + 1)) * spacing(); }

    /// Corner node ids of a cell, counter-clockwise from the lower-left.
    std::array<std::size_t, 4> cell_nodes(std::size_t cell) const;

    /// Lower-left corner coordinates of a cell.
    double cell_x0(std::size_t cell) const { return (cell % n_) * spacing(); }
    double cell_y0(std::size_t cell) const { return (cell / n_) * spacing(); }

    bool is_boundary(std::size_t node) const { return boundary_[node]; }
    const std::vector<bool>& boundary_mask() const { return boundary_; }

    /// Index of a node within the interior block, or -1 on the boundary.
    int interior_index(std::size_t node) const { return interior_index_[node]; }
    const std::vector<std::size_t>& interior_nodes() const { return interior_nodes_; }

private:
    int n_;
    std::vector<bool> boundary_;
    std::vector<int> interior_index_;
    std::vector<std::size_t> interior_nodes_;
};

/// Nodal coefficients of a Q1 function over the full node set of a mesh.
/// Boundary entries are pinned to zero by every producer in this library.
struct FeFunction {
    const Mesh2D* mesh = nullptr;
    std::vector<double> values;
};

FeFunction zero_function(const Mesh2D& mesh);

/// Nodal interpolant of a callable; boundary values are kept as sampled
/// (zero for admissible data).
template <typename F>
FeFunction interpolate(const Mesh2D& mesh, F&& f) {
    FeFunction fn{&mesh, std::vector<double>(mesh.node_count())};
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        fn.values[i] = f(mesh.node_x(i), mesh.node_y(i));
    }
    return fn;
}

/// A nested coarse/fine mesh pair; the fine side count must be an integer
/// multiple of the coarse one so the coarse Q1 space is a subspace of the
/// fine one.
struct Nesting {
    Mesh2D coarse;
    Mesh2D fine;
    int ratio;
};

Mesh2D build_mesh(int cells_per_side);
Nesting make_nesting(int coarse_n, int fine_n);

/// Fine-mesh nodal values of a coarse Q1 function. Exact: every fine node
/// is evaluated by bilinear interpolation inside its coarse cell, and the
/// coarse space is contained in the fine one.
FeFunction prolongate(const Nesting& nest, const FeFunction& coarse_fn);

/// Point value of a Q1 function: bilinear interpolation of the four corner
/// values of the containing cell. Cell lookup is floor(x*n) clamped at the
/// upper edge; values are continuous across edges so ties are harmless.
double evaluate_fe(const Mesh2D& mesh, const FeFunction& fn, double x, double y);

}  // namespace fcable
