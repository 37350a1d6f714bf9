#include "fcable/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fcable {

void SparseMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
    if (x.size() != cols) {
        throw std::invalid_argument("sparse multiply: dimension mismatch");
    }
    y.assign(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (std::size_t k = row_offsets[r]; k < row_offsets[r + 1]; ++k) {
            acc += values[k] * x[col_indices[k]];
        }
        y[r] = acc;
    }
}

std::vector<double> SparseMatrix::multiply(const std::vector<double>& x) const {
    std::vector<double> y;
    multiply(x, y);
    return y;
}

double SparseMatrix::value_at(std::size_t row, std::size_t col) const {
    const auto begin = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[row]);
    const auto end = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[row + 1]);
    const auto it = std::lower_bound(begin, end, col);
    if (it == end || *it != col) {
        return 0.0;
    }
    return values[static_cast<std::size_t>(it - col_indices.begin())];
}

std::vector<double> SparseMatrix::diagonal() const {
    std::vector<double> d(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        d[r] = value_at(r, r);
    }
    return d;
}

void add_scaled(SparseMatrix& target, double c, const SparseMatrix& other) {
    if (target.row_offsets != other.row_offsets || target.col_indices != other.col_indices) {
        throw std::invalid_argument("add_scaled requires identical sparsity patterns");
    }
    for (std::size_t k = 0; k < target.values.size(); ++k) {
        target.values[k] += c * other.values[k];
    }
}

namespace {

QuadratureRule make_gauss(const std::vector<std::pair<double, double>>& pts1d) {
    QuadratureRule rule;
    for (const auto& [x, wx] : pts1d) {
        for (const auto& [y, wy] : pts1d) {
            rule.points.push_back({x, y, wx * wy});
        }
    }
    return rule;
}

}  // namespace

const QuadratureRule& QuadratureRule::gauss3x3() {
    static const QuadratureRule rule = [] {
        const double offset = 0.5 * std::sqrt(3.0 / 5.0);
        return make_gauss({{0.5 - offset, 5.0 / 18.0},
                           {0.5, 8.0 / 18.0},
                           {0.5 + offset, 5.0 / 18.0}});
    }();
    return rule;
}

const QuadratureRule& QuadratureRule::gauss2x2() {
    static const QuadratureRule rule = [] {
        const double offset = 0.5 / std::sqrt(3.0);
        return make_gauss({{0.5 - offset, 0.5}, {0.5 + offset, 0.5}});
    }();
    return rule;
}

std::array<double, 4> q1_shape_values(double xi, double eta) {
    return {(1.0 - xi) * (1.0 - eta), xi * (1.0 - eta), xi * eta, (1.0 - xi) * eta};
}

std::array<std::array<double, 2>, 4> q1_shape_gradients(double xi, double eta) {
    return {{{-(1.0 - eta), -(1.0 - xi)},
             {1.0 - eta, -xi},
             {eta, xi},
             {-eta, 1.0 - xi}}};
}

namespace {

// CSR skeleton over the Q1 node-neighbor pattern (up to 9 entries per row),
// shared by every matrix assembled here so patterns match exactly.
SparseMatrix make_pattern(const Mesh2D& mesh) {
    const int n = mesh.cells_per_side();
    SparseMatrix m;
    m.rows = m.cols = mesh.node_count();
    m.row_offsets.reserve(m.rows + 1);
    m.row_offsets.push_back(0);
    for (std::size_t node = 0; node < m.rows; ++node) {
        const int ix = static_cast<int>(node % (n + 1));
        const int iy = static_cast<int>(node / (n + 1));
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int jx = ix + dx;
                const int jy = iy + dy;
                if (jx < 0 || jy < 0 || jx > n || jy > n) {
                    continue;
                }
                m.col_indices.push_back(static_cast<std::size_t>(jy) * (n + 1) + jx);
            }
        }
        m.row_offsets.push_back(m.col_indices.size());
    }
    m.values.assign(m.col_indices.size(), 0.0);
    return m;
}

void scatter_add(SparseMatrix& m, std::size_t row, std::size_t col, double v) {
    const auto begin = m.col_indices.begin() + static_cast<std::ptrdiff_t>(m.row_offsets[row]);
    const auto end = m.col_indices.begin() + static_cast<std::ptrdiff_t>(m.row_offsets[row + 1]);
    const auto it = std::lower_bound(begin, end, col);
    m.values[static_cast<std::size_t>(it - m.col_indices.begin())] += v;
}

// Closed-form element matrices on a square cell of side s: exact integrals
// of bilinear shape products.
constexpr double kMassLocal[4][4] = {
    {4, 2, 1, 2}, {2, 4, 2, 1}, {1, 2, 4, 2}, {2, 1, 2, 4}};
constexpr double kStiffnessLocal[4][4] = {
    {4, -1, -2, -1}, {-1, 4, -1, -2}, {-2, -1, 4, -1}, {-1, -2, -1, 4}};

SparseMatrix assemble_constant_local(const Mesh2D& mesh, const double local[4][4], double scale) {
    SparseMatrix m = make_pattern(mesh);
    for (std::size_t cell = 0; cell < mesh.cell_count(); ++cell) {
        const auto nodes = mesh.cell_nodes(cell);
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                scatter_add(m, nodes[a], nodes[b], scale * local[a][b]);
            }
        }
    }
    return m;
}

}  // namespace

SparseMatrix assemble_mass(const Mesh2D& mesh) {
    const double s = mesh.spacing();
    return assemble_constant_local(mesh, kMassLocal, s * s / 36.0);
}

SparseMatrix assemble_stiffness(const Mesh2D& mesh) {
    // side-length independent in 2D
    return assemble_constant_local(mesh, kStiffnessLocal, 1.0 / 6.0);
}

std::vector<double> assemble_load(const Mesh2D& mesh,
                                  const std::function<double(double, double)>& f,
                                  const QuadratureRule& rule) {
    const double s = mesh.spacing();
    const double jac = s * s;
    std::vector<double> b(mesh.node_count(), 0.0);
    for (std::size_t cell = 0; cell < mesh.cell_count(); ++cell) {
        const auto nodes = mesh.cell_nodes(cell);
        const double x0 = mesh.cell_x0(cell);
        const double y0 = mesh.cell_y0(cell);
        for (const auto& q : rule.points) {
            const double fv = f(x0 + q.xi * s, y0 + q.eta * s);
            const auto shapes = q1_shape_values(q.xi, q.eta);
            const double w = q.weight * jac * fv;
            for (int a = 0; a < 4; ++a) {
                b[nodes[a]] += w * shapes[a];
            }
        }
    }
    return b;
}

namespace {

void check_function(const Mesh2D& mesh, const FeFunction& u) {
    if (u.values.size() != mesh.node_count()) {
        throw std::invalid_argument("FE function does not match the mesh's node count");
    }
}

}  // namespace

std::vector<double> assemble_nonlinear_vector(const Mesh2D& mesh, const FeFunction& u,
                                              const std::function<double(double)>& F,
                                              const QuadratureRule& rule) {
    check_function(mesh, u);
    const double s = mesh.spacing();
    const double jac = s * s;
    std::vector<double> out(mesh.node_count(), 0.0);
    for (std::size_t cell = 0; cell < mesh.cell_count(); ++cell) {
        const auto nodes = mesh.cell_nodes(cell);
        for (const auto& q : rule.points) {
            const auto shapes = q1_shape_values(q.xi, q.eta);
            double uq = 0.0;
            for (int a = 0; a < 4; ++a) {
                uq += shapes[a] * u.values[nodes[a]];
            }
            const double w = q.weight * jac * F(uq);
            for (int a = 0; a < 4; ++a) {
                out[nodes[a]] += w * shapes[a];
            }
        }
    }
    return out;
}

SparseMatrix assemble_nonlinear_jacobian(const Mesh2D& mesh, const FeFunction& u,
                                         const std::function<double(double)>& Fprime,
                                         const QuadratureRule& rule) {
    check_function(mesh, u);
    const double s = mesh.spacing();
    const double jac = s * s;
    SparseMatrix m = make_pattern(mesh);
    for (std::size_t cell = 0; cell < mesh.cell_count(); ++cell) {
        const auto nodes = mesh.cell_nodes(cell);
        for (const auto& q : rule.points) {
            const auto shapes = q1_shape_values(q.xi, q.eta);
            double uq = 0.0;
            for (int a = 0; a < 4; ++a) {
                uq += shapes[a] * u.values[nodes[a]];
            }
            const double w = q.weight * jac * Fprime(uq);
            for (int a = 0; a < 4; ++a) {
                for (int b = 0; b < 4; ++b) {
                    scatter_add(m, nodes[a], nodes[b], w * shapes[a] * shapes[b]);
                }
            }
        }
    }
    return m;
}

LinearizedNonlinearity assemble_linearized_nonlinearity(const Mesh2D& mesh, const FeFunction& u,
                                                        const std::function<double(double)>& F,
                                                        const std::function<double(double)>& Fprime,
                                                        const QuadratureRule& rule) {
    check_function(mesh, u);
    const double s = mesh.spacing();
    const double jac = s * s;
    LinearizedNonlinearity out;
    out.jacobian = make_pattern(mesh);
    out.constant_part.assign(mesh.node_count(), 0.0);
    for (std::size_t cell = 0; cell < mesh.cell_count(); ++cell) {
        const auto nodes = mesh.cell_nodes(cell);
        for (const auto& q : rule.points) {
            const auto shapes = q1_shape_values(q.xi, q.eta);
            double uq = 0.0;
            for (int a = 0; a < 4; ++a) {
                uq += shapes[a] * u.values[nodes[a]];
            }
            const double fp = Fprime(uq);
            const double wj = q.weight * jac;
            const double wc = wj * (F(uq) - fp * uq);
            for (int a = 0; a < 4; ++a) {
                out.constant_part[nodes[a]] += wc * shapes[a];
                for (int b = 0; b < 4; ++b) {
                    scatter_add(out.jacobian, nodes[a], nodes[b], wj * fp * shapes[a] * shapes[b]);
                }
            }
        }
    }
    return out;
}

double l2_error(const Mesh2D& mesh, const FeFunction& fn,
                const std::function<double(double, double)>& exact, const QuadratureRule& rule) {
    check_function(mesh, fn);
    const double s = mesh.spacing();
    const double jac = s * s;
    double acc = 0.0;
    for (std::size_t cell = 0; cell < mesh.cell_count(); ++cell) {
        const auto nodes = mesh.cell_nodes(cell);
        const double x0 = mesh.cell_x0(cell);
        const double y0 = mesh.cell_y0(cell);
        for (const auto& q : rule.points) {
            const auto shapes = q1_shape_values(q.xi, q.eta);
            double uq = 0.0;
            for (int a = 0; a < 4; ++a) {
                uq += shapes[a] * fn.values[nodes[a]];
            }
            const double diff = exact(x0 + q.xi * s, y0 + q.eta * s) - uq;
            acc += q.weight * jac * diff * diff;
        }
    }
    return std::sqrt(acc);
}

SparseMatrix restrict_interior(const Mesh2D& mesh, const SparseMatrix& full) {
    if (full.rows != mesh.node_count() || full.cols != mesh.node_count()) {
        throw std::invalid_argument("matrix does not match the mesh's node count");
    }
    SparseMatrix out;
    out.rows = out.cols = mesh.interior_count();
    out.row_offsets.reserve(out.rows + 1);
    out.row_offsets.push_back(0);
    for (const std::size_t node : mesh.interior_nodes()) {
        for (std::size_t k = full.row_offsets[node]; k < full.row_offsets[node + 1]; ++k) {
            const int j = mesh.interior_index(full.col_indices[k]);
            if (j >= 0) {
                out.col_indices.push_back(static_cast<std::size_t>(j));
                out.values.push_back(full.values[k]);
            }
        }
        out.row_offsets.push_back(out.col_indices.size());
    }
    return out;
}

std::vector<double> restrict_interior(const Mesh2D& mesh, const std::vector<double>& full) {
    if (full.size() != mesh.node_count()) {
        throw std::invalid_argument("vector does not match the mesh's node count");
    }
    std::vector<double> out(mesh.interior_count());
    std::size_t k = 0;
    for (const std::size_t node : mesh.interior_nodes()) {
        out[k++] = full[node];
    }
    return out;
}

FeFunction expand_interior(const Mesh2D& mesh, const std::vector<double>& interior) {
    if (interior.size() != mesh.interior_count()) {
        throw std::invalid_argument("vector does not match the mesh's interior count");
    }
    FeFunction fn = zero_function(mesh);
    std::size_t k = 0;
    for (const std::size_t node : mesh.interior_nodes()) {
        fn.values[node] = interior[k++];
    }
    return fn;
}

}  // namespace fcable
