#pragma once

#include "fcable/mesh.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace fcable {

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row; every matrix assembled by this module is structurally
/// symmetric (Q1 node-neighbor pattern).
struct SparseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_offsets;
    std::vector<std::size_t> col_indices;
    std::vector<double> values;

    /// y = A x
    void multiply(const std::vector<double>& x, std::vector<double>& y) const;
    std::vector<double> multiply(const std::vector<double>& x) const;

    /// Entry lookup by binary search; zero if outside the pattern.
    double value_at(std::size_t row, std::size_t col) const;

    std::vector<double> diagonal() const;
};

/// this += c * other; both matrices must share one sparsity pattern.
void add_scaled(SparseMatrix& target, double c, const SparseMatrix& other);

/// Tensor-Gauss quadrature points on the reference square [0,1]^2.
/// Weights are positive and sum to one.
struct QuadratureRule {
    struct Point {
        double xi;
        double eta;
        double weight;
    };
    std::vector<Point> points;

    static const QuadratureRule& gauss3x3();
    static const QuadratureRule& gauss2x2();
};

/// Q1 shape values at a reference point, counter-clockwise from lower-left.
std::array<double, 4> q1_shape_values(double xi, double eta);
/// Reference-square gradients (d/dxi, d/deta) of the Q1 shapes.
std::array<std::array<double, 2>, 4> q1_shape_gradients(double xi, double eta);

SparseMatrix assemble_mass(const Mesh2D& mesh);
SparseMatrix assemble_stiffness(const Mesh2D& mesh);

/// Load vector b_i = integral of f phi_i, cellwise with the given rule.
std::vector<double> assemble_load(const Mesh2D& mesh,
                                  const std::function<double(double, double)>& f,
                                  const QuadratureRule& rule = QuadratureRule::gauss3x3());

/// N_i(u) = integral of F(u_h) phi_i with u_h evaluated at the quadrature
/// points through the Q1 basis (consistent integration, no lumping).
std::vector<double> assemble_nonlinear_vector(
    const Mesh2D& mesh, const FeFunction& u, const std::function<double(double)>& F,
    const QuadratureRule& rule = QuadratureRule::gauss3x3());

/// J_ij(u) = integral of F'(u_h) phi_j phi_i; the derivative of
/// assemble_nonlinear_vector at u.
SparseMatrix assemble_nonlinear_jacobian(
    const Mesh2D& mesh, const FeFunction& u, const std::function<double(double)>& Fprime,
    const QuadratureRule& rule = QuadratureRule::gauss3x3());

/// Both pieces of the linearization around u in one sweep: the Jacobian
/// J(u) and the vector of integral F(u_h) - F'(u_h) u_h against phi_i.
struct LinearizedNonlinearity {
    SparseMatrix jacobian;
    std::vector<double> constant_part;
};
LinearizedNonlinearity assemble_linearized_nonlinearity(
    const Mesh2D& mesh, const FeFunction& u, const std::function<double(double)>& F,
    const std::function<double(double)>& Fprime,
    const QuadratureRule& rule = QuadratureRule::gauss3x3());

/// L2 distance between a Q1 function and a callable, integrated cellwise.
double l2_error(const Mesh2D& mesh, const FeFunction& fn,
                const std::function<double(double, double)>& exact,
                const QuadratureRule& rule = QuadratureRule::gauss3x3());

/// Restriction of a full-node-set matrix/vector to interior unknowns.
SparseMatrix restrict_interior(const Mesh2D& mesh, const SparseMatrix& full);
std::vector<double> restrict_interior(const Mesh2D& mesh, const std::vector<double>& full);

/// Interior coefficients scattered back onto the full node set; boundary
/// entries are exactly zero.
FeFunction expand_interior(const Mesh2D& mesh, const std::vector<double>& interior);

}  // namespace fcable
