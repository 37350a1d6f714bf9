#include "fcable/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fcable {

Mesh2D::Mesh2D(int cells_per_side) : n_(cells_per_side) {
    if (n_ < 2) {
        std::ostringstream msg;
        msg << "mesh needs at least 2 cells per side for interior nodes, got " << n_;
        throw std::invalid_argument(msg.str());
    }
    const std::size_t nodes = node_count();
    boundary_.resize(nodes);
    interior_index_.assign(nodes, -1);
    interior_nodes_.reserve(interior_count());
    for (std::size_t node = 0; node < nodes; ++node) {
        const std::size_t ix = node % (n_ + 1);
        const std::size_t iy = node / (n_ + 1);
        const bool on_edge = ix == 0 || iy == 0 || ix == static_cast<std::size_t>(n_) ||
                             iy == static_cast<std::size_t>(n_);
        boundary_[node] = on_edge;
        if (!on_edge) {
            interior_index_[node] = static_cast<int>(interior_nodes_.size());
            interior_nodes_.push_back(node);
        }
    }
}

std::array<std::size_t, 4> Mesh2D::cell_nodes(std::size_t cell) const {
    const std::size_t cx = cell % n_;
    const std::size_t cy = cell / n_;
    const std::size_t base = cy * (n_ + 1) + cx;
    return {base, base + 1, base + n_ + 2, base + n_ + 1};
}

FeFunction zero_function(const Mesh2D& mesh) {
    return FeFunction{&mesh, std::vector<double>(mesh.node_count(), 0.0)};
}

Mesh2D build_mesh(int cells_per_side) { return Mesh2D(cells_per_side); }

Nesting make_nesting(int coarse_n, int fine_n) {
    Mesh2D coarse(coarse_n);
    Mesh2D fine(fine_n);
    if (fine_n % coarse_n != 0 || fine_n / coarse_n < 2) {
        std::ostringstream msg;
        msg << "fine side count " << fine_n << " is not an integer multiple (>= 2) of coarse "
            << coarse_n;
        throw std::invalid_argument(msg.str());
    }
    return Nesting{std::move(coarse), std::move(fine), fine_n / coarse_n};
}

namespace {

std::array<double, 4> shape_values(double xi, double eta) {
    return {(1.0 - xi) * (1.0 - eta), xi * (1.0 - eta), xi * eta, (1.0 - xi) * eta};
}

}  // namespace

FeFunction prolongate(const Nesting& nest, const FeFunction& coarse_fn) {
    if (coarse_fn.mesh != &nest.coarse ||
        coarse_fn.values.size() != nest.coarse.node_count()) {
        throw std::invalid_argument("coarse function does not live on the nesting's coarse mesh");
    }
    const int cn = nest.coarse.cells_per_side();
    const int fn = nest.fine.cells_per_side();
    const int r = nest.ratio;
    FeFunction out{&nest.fine, std::vector<double>(nest.fine.node_count())};
    for (std::size_t node = 0; node < nest.fine.node_count(); ++node) {
        const int ix = static_cast<int>(node % (fn + 1));
        const int iy = static_cast<int>(node / (fn + 1));
        const int cx = std::min(ix / r, cn - 1);
        const int cy = std::min(iy / r, cn - 1);
        const double xi = static_cast<double>(ix - cx * r) / r;
        const double eta = static_cast<double>(iy - cy * r) / r;
        const auto corners = nest.coarse.cell_nodes(static_cast<std::size_t>(cy) * cn + cx);
        const auto shapes = shape_values(xi, eta);
        double v = 0.0;
        for (int k = 0; k < 4; ++k) {
            v += shapes[k] * coarse_fn.values[corners[k]];
        }
        out.values[node] = v;
    }
    return out;
}

double evaluate_fe(const Mesh2D& mesh, const FeFunction& fn, double x, double y) {
    if (fn.values.size() != mesh.node_count()) {
        throw std::invalid_argument("function does not match the mesh's node count");
    }
    if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0) {
        std::ostringstream msg;
        msg << "point (" << x << ", " << y << ") lies outside [0,1]^2";
        throw std::invalid_argument(msg.str());
    }
    const int n = mesh.cells_per_side();
    const int cx = std::min(static_cast<int>(std::floor(x * n)), n - 1);
    const int cy = std::min(static_cast<int>(std::floor(y * n)), n - 1);
    const double xi = x * n - cx;
    const double eta = y * n - cy;
    const auto corners = mesh.cell_nodes(static_cast<std::size_t>(cy) * n + cx);
    const auto shapes = shape_values(xi, eta);
    double v = 0.0;
    for (int k = 0; k < 4; ++k) {
        v += shapes[k] * fn.values[corners[k]];
    }
    return v;
}

}  // namespace fcable
