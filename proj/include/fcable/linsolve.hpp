#pragma once

#include "fcable/assembly.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fcable {

enum class SolveMethod { conjugate_gradient, direct_cholesky };

struct SolverConfig {
    SolveMethod method = SolveMethod::conjugate_gradient;
    double rel_tolerance = 1e-12;
    /// 0 means 10 * unknown count.
    std::size_t max_iterations = 0;
    double newton_tolerance = 1e-10;
    std::size_t newton_max_iter = 25;
    /// Multiplier applied to Euclidean norms when measuring Newton
    /// convergence; steppers set this to the mesh spacing so the threshold
    /// is a discrete L2 norm independent of resolution.
    double norm_scale = 1.0;
};

struct SolveReport {
    std::size_t iterations = 0;
    double residual = 0.0;
    bool converged = false;
    /// CG: relative residual norms per iteration (only when captured).
    /// Newton: scaled update norms per iteration.
    std::vector<double> history;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& msg, SolveReport report)
        : std::runtime_error(msg), report_(std::move(report)) {}

    const SolveReport& report() const { return report_; }

private:
    SolveReport report_;
};

/// Per-iteration observer for iterative solves; receives the iterate.
using IterationObserver = std::function<void(std::size_t iter, const std::vector<double>& x)>;

/// Solve A x = b for symmetric positive definite A. Conjugate gradients
/// with Jacobi preconditioning by default; a dense Cholesky factorization
/// as the direct method. Errors on non-convergence and on negative
/// curvature (indefiniteness detected inside CG).
std::pair<std::vector<double>, SolveReport> solve_spd(
    const SparseMatrix& A, const std::vector<double>& b, const SolverConfig& config,
    const IterationObserver& observer = nullptr);

/// solve_spd, retrying with the direct method when the iterative one
/// reports failure (indefiniteness or iteration cap).
std::pair<std::vector<double>, SolveReport> solve_spd_with_fallback(
    const SparseMatrix& A, const std::vector<double>& b, const SolverConfig& config);

/// Plain Newton iteration: x_{k+1} = x_k - J(x_k)^{-1} r(x_k), stopping when
/// the scaled update norm or residual norm drops below newton_tolerance.
/// Errors on the iteration cap and on residual growth over five
/// consecutive iterations (divergence), carrying the norm trajectory.
std::pair<std::vector<double>, SolveReport> newton_solve(
    const std::function<std::vector<double>(const std::vector<double>&)>& residual,
    const std::function<SparseMatrix(const std::vector<double>&)>& jacobian,
    std::vector<double> x0, const SolverConfig& config);

}  // namespace fcable
