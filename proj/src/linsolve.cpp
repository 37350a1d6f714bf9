#include "fcable/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace fcable {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

std::pair<std::vector<double>, SolveReport> solve_cg(const SparseMatrix& A,
                                                     const std::vector<double>& b,
                                                     const SolverConfig& config,
                                                     const IterationObserver& observer) {
    const std::size_t n = b.size();
    const std::size_t max_iter =
        config.max_iterations > 0 ? config.max_iterations : 10 * std::max<std::size_t>(n, 1);
    SolveReport report;
    std::vector<double> x(n, 0.0);

    const double norm_b = norm2(b);
    if (norm_b == 0.0) {
        report.converged = true;
        return {std::move(x), report};
    }
    const double target = config.rel_tolerance * norm_b;

    std::vector<double> inv_diag = A.diagonal();
    for (double& d : inv_diag) {
        if (d <= 0.0) {
            report.residual = 1.0;
            throw SolverError("matrix is not positive definite: nonpositive diagonal", report);
        }
        d = 1.0 / d;
    }

    std::vector<double> r = b;  // x starts at zero
    std::vector<double> z(n), p(n), Ap(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = inv_diag[i] * r[i];
    }
    p = z;
    double rz = dot(r, z);
    double res_norm = norm2(r);

    while (res_norm > target) {
        if (report.iterations >= max_iter) {
            report.residual = res_norm / norm_b;
            std::ostringstream msg;
            msg << "conjugate gradients did not converge in " << max_iter
                << " iterations (relative residual " << report.residual << ")";
            throw SolverError(msg.str(), report);
        }
        A.multiply(p, Ap);
        const double curvature = dot(p, Ap);
        if (curvature <= 0.0) {
            report.residual = res_norm / norm_b;
            throw SolverError("matrix is not positive definite: negative curvature in CG",
                              report);
        }
        const double alpha = rz / curvature;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = inv_diag[i] * r[i];
        }
        const double rz_next = dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = z[i] + beta * p[i];
        }
        res_norm = norm2(r);
        ++report.iterations;
        if (observer) {
            report.history.push_back(res_norm / norm_b);
            observer(report.iterations, x);
        }
    }
    report.residual = res_norm / norm_b;
    report.converged = true;
    return {std::move(x), report};
}

std::pair<std::vector<double>, SolveReport> solve_cholesky(const SparseMatrix& A,
                                                           const std::vector<double>& b) {
    const std::size_t n = b.size();
    SolveReport report;
    // dense lower factor, row-major
    std::vector<double> L(n * n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = A.row_offsets[r]; k < A.row_offsets[r + 1]; ++k) {
            const std::size_t c = A.col_indices[k];
            if (c <= r) {
                L[r * n + c] = A.values[k];
            }
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        double d = L[j * n + j];
        for (std::size_t k = 0; k < j; ++k) {
            d -= L[j * n + k] * L[j * n + k];
        }
        if (d <= 0.0) {
            throw SolverError("matrix is not positive definite: Cholesky pivot failure", report);
        }
        const double lj = std::sqrt(d);
        L[j * n + j] = lj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = L[i * n + j];
            for (std::size_t k = 0; k < j; ++k) {
                s -= L[i * n + k] * L[j * n + k];
            }
            L[i * n + j] = s / lj;
        }
    }
    std::vector<double> x = b;
    for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (std::size_t k = 0; k < i; ++k) {
            s -= L[i * n + k] * x[k];
        }
        x[i] = s / L[i * n + i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t k = ii + 1; k < n; ++k) {
            s -= L[k * n + ii] * x[k];
        }
        x[ii] = s / L[ii * n + ii];
    }
    const std::vector<double> Ax = A.multiply(x);
    double rn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = Ax[i] - b[i];
        rn += d * d;
    }
    const double nb = norm2(b);
    report.residual = nb > 0.0 ? std::sqrt(rn) / nb : std::sqrt(rn);
    report.converged = true;
    report.iterations = 1;
    return {std::move(x), report};
}

}  // namespace

std::pair<std::vector<double>, SolveReport> solve_spd(const SparseMatrix& A,
                                                      const std::vector<double>& b,
                                                      const SolverConfig& config,
                                                      const IterationObserver& observer) {
    if (A.rows != A.cols || A.rows != b.size()) {
        throw std::invalid_argument("solve_spd: dimension mismatch");
    }
    if (config.method == SolveMethod::direct_cholesky) {
        return solve_cholesky(A, b);
    }
    return solve_cg(A, b, config, observer);
}

std::pair<std::vector<double>, SolveReport> solve_spd_with_fallback(
    const SparseMatrix& A, const std::vector<double>& b, const SolverConfig& config) {
    if (config.method == SolveMethod::conjugate_gradient) {
        try {
            return solve_spd(A, b, config);
        } catch (const SolverError&) {
            // retry below
        }
    }
    SolverConfig direct = config;
    direct.method = SolveMethod::direct_cholesky;
    return solve_spd(A, b, direct);
}

std::pair<std::vector<double>, SolveReport> newton_solve(
    const std::function<std::vector<double>(const std::vector<double>&)>& residual,
    const std::function<SparseMatrix(const std::vector<double>&)>& jacobian,
    std::vector<double> x0, const SolverConfig& config) {
    SolveReport report;
    std::vector<double> x = std::move(x0);
    double prev_res = norm2(residual(x)) * config.norm_scale;
    std::size_t growth_streak = 0;

    for (std::size_t iter = 1; iter <= config.newton_max_iter; ++iter) {
        const std::vector<double> r = residual(x);
        std::vector<double> neg_r(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) {
            neg_r[i] = -r[i];
        }
        const SparseMatrix J = jacobian(x);
        auto [delta, linear_report] = solve_spd_with_fallback(J, neg_r, config);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += delta[i];
        }
        const double update_norm = norm2(delta) * config.norm_scale;
        const double res_norm = norm2(residual(x)) * config.norm_scale;
        report.iterations = iter;
        report.residual = res_norm;
        report.history.push_back(update_norm);

        if (update_norm <= config.newton_tolerance || res_norm <= config.newton_tolerance) {
            report.converged = true;
            return {std::move(x), report};
        }
        growth_streak = res_norm > prev_res ? growth_streak + 1 : 0;
        prev_res = res_norm;
        if (growth_streak >= 5) {
            std::ostringstream msg;
            msg << "Newton iteration diverging: residual grew over 5 consecutive iterations"
                << " (last " << res_norm << "); updates:";
            for (double u : report.history) {
                msg << ' ' << u;
            }
            throw SolverError(msg.str(), report);
        }
    }
    std::ostringstream msg;
    msg << "Newton iteration cap " << config.newton_max_iter << " reached (residual "
        << report.residual << "); updates:";
    for (double u : report.history) {
        msg << ' ' << u;
    }
    throw SolverError(msg.str(), report);
}

}  // namespace fcable
