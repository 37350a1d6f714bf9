#include "fcable/problems.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fcable {

ManufacturedCase cable_benchmark(double alpha, double beta, int num_steps) {
    const FractionalOrder a(alpha);
    const FractionalOrder b(beta);
    constexpr double two_pi = 2.0 * std::numbers::pi;

    const double c_alpha = 2.0 / std::tgamma(3.0 - alpha);
    const double c_beta = 16.0 * std::numbers::pi * std::numbers::pi / std::tgamma(3.0 - beta);

    ProblemSpec problem{a, b, 1.0, num_steps, {}, {}, {}, {}, {}};
    problem.nonlinearity = [](double u) { return u * u * u - u; };
    problem.nonlinearity_prime = [](double u) { return 3.0 * u * u - 1.0; };
    problem.initial = [](double, double) { return 0.0; };
    problem.exact = [=](double x, double y, double t) {
        return t * t * std::sin(two_pi * x) * std::sin(two_pi * y);
    };
    problem.source = [=](double x, double y, double t) {
        const double sx = std::sin(two_pi * x);
        const double sy = std::sin(two_pi * y);
        const double time_factor = 2.0 * t - t * t + c_alpha * std::pow(t, 2.0 - alpha) +
                                   c_beta * std::pow(t, 2.0 - beta);
        const double s3 = sx * sx * sx * sy * sy * sy;
        return time_factor * sx * sy + std::pow(t, 6.0) * s3;
    };

    std::ostringstream name;
    name << "cable_a" << alpha << "_b" << beta;
    return ManufacturedCase{name.str(), std::move(problem)};
}

double benchmark_error(const ManufacturedCase& mcase, const Mesh2D& mesh, const FeFunction& fn) {
    const double T = mcase.problem.final_time;
    const auto& exact = mcase.problem.exact;
    if (!exact) {
        throw std::invalid_argument("case has no exact solution attached");
    }
    return l2_error(
        mesh, fn, [&](double x, double y) { return exact(x, y, T); },
        QuadratureRule::gauss2x2());
}

namespace {

ConvergenceRow run_pair(const ManufacturedCase& mcase, const MeshPair& pair, Scheme scheme,
                        const SolverConfig& solver) {
    ConvergenceRow row;
    if (scheme == Scheme::twogrid) {
        if (pair.coarse_n <= 0) {
            throw std::invalid_argument("two-grid study rows need a coarse side count");
        }
        const Nesting nest = make_nesting(pair.coarse_n, pair.fine_n);
        const MarchResult result = march_twogrid(mcase.problem, nest, solver);
        row.coarse_h = nest.coarse.spacing();
        row.fine_h = nest.fine.spacing();
        row.error_l2 = benchmark_error(mcase, nest.fine, result.final_solution);
        row.cpu_seconds = result.solve_seconds;
    } else {
        const Mesh2D mesh = build_mesh(pair.fine_n);
        const MarchResult result = march_standard(mcase.problem, mesh, solver);
        row.fine_h = mesh.spacing();
        row.error_l2 = benchmark_error(mcase, mesh, result.final_solution);
        row.cpu_seconds = result.solve_seconds;
    }
    return row;
}

}  // namespace

std::vector<ConvergenceRow> convergence_study(const ManufacturedCase& mcase,
                                              std::span<const MeshPair> pairs, Scheme scheme,
                                              const SolverConfig& solver, int jobs) {
    std::vector<ConvergenceRow> rows(pairs.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            rows[i] = run_pair(mcase, pairs[i], scheme, solver);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(pairs.size());
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < pairs.size(); i = next.fetch_add(1)) {
                try {
                    rows[i] = run_pair(mcase, pairs[i], scheme, solver);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        const int count = std::min<int>(jobs, static_cast<int>(pairs.size()));
        pool.reserve(static_cast<std::size_t>(count));
        for (int t = 0; t < count; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
        for (const auto& err : errors) {
            if (err) {
                std::rethrow_exception(err);
            }
        }
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        rows[i].order = std::log(rows[i - 1].error_l2 / rows[i].error_l2) /
                        std::log(rows[i - 1].fine_h / rows[i].fine_h);
    }
    return rows;
}

}  // namespace fcable
