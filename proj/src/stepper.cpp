#include "fcable/stepper.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace fcable {

void validate(const ProblemSpec& problem) {
    if (problem.final_time <= 0.0) {
        throw std::invalid_argument("final_time must be positive");
    }
    if (problem.num_steps < 2) {
        throw std::invalid_argument("num_steps must be at least 2 (the scheme has a distinct "
                                    "first step)");
    }
    if (!problem.nonlinearity || !problem.nonlinearity_prime || !problem.source ||
        !problem.initial) {
        throw std::invalid_argument("problem is missing a callable");
    }
}

TimeState make_time_state(const Mesh2D& mesh, const ProblemSpec& problem) {
    validate(problem);
    const std::size_t capacity = static_cast<std::size_t>(problem.num_steps);
    TimeState state{&mesh,
                    {},
                    problem.tau(),
                    wsgd_weights(problem.alpha, capacity),
                    wsgd_weights(problem.beta, capacity)};
    state.history.push_back(interpolate(mesh, problem.initial));
    return state;
}

StepOperators make_step_operators(const Mesh2D& mesh) {
    return StepOperators{restrict_interior(mesh, assemble_mass(mesh)),
                         restrict_interior(mesh, assemble_stiffness(mesh))};
}

double l2_norm(const StepOperators& ops, const Mesh2D& mesh, const FeFunction& fn) {
    const std::vector<double> x = restrict_interior(mesh, fn.values);
    const std::vector<double> mx = ops.mass.multiply(x);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += x[i] * mx[i];
    }
    return std::sqrt(std::max(acc, 0.0));
}

namespace {

struct AssembledStep {
    SparseMatrix base;        // c_t M + (p_a[0]/tau^a) M + (p_b[0]/tau^b) A, interior
    std::vector<double> rhs;  // all known terms, interior
    StepStats stats;
};

// Everything of the step equation that does not involve u^{n+1}: the load
// of g at t_{n+1}, the backward-difference history, and the lagged halves
// of both fractional sums.
AssembledStep assemble_step(const TimeState& state, const StepOperators& ops,
                            const ProblemSpec& problem) {
    const Mesh2D& mesh = *state.mesh;
    const std::size_t n = state.step();
    const double tau = state.tau;
    const double alpha = state.weights_alpha.order.value();
    const double beta = state.weights_beta.order.value();
    const double inv_tau_alpha = 1.0 / std::pow(tau, alpha);
    const double inv_tau_beta = 1.0 / std::pow(tau, beta);
    if (n + 1 > state.weights_alpha.capacity() || n + 1 > state.weights_beta.capacity()) {
        throw std::invalid_argument("history exceeds the precomputed weight capacity");
    }

    AssembledStep out;
    out.stats.step = n;
    out.stats.weight_terms = n + 2;
    out.stats.two_step_difference = n >= 1;

    const double ct = n == 0 ? 1.0 / tau : 1.5 / tau;
    out.base = ops.mass;
    for (double& v : out.base.values) {
        v *= ct + state.weights_alpha.shifted[0] * inv_tau_alpha;
    }
    add_scaled(out.base, state.weights_beta.shifted[0] * inv_tau_beta, ops.stiffness);

    const double t_next = (static_cast<double>(n) + 1.0) * tau;
    out.rhs = restrict_interior(
        mesh, assemble_load(mesh, [&](double x, double y) { return problem.source(x, y, t_next); }));

    // backward-difference part
    std::vector<double> bd = restrict_interior(mesh, state.history[n].values);
    if (n == 0) {
        for (double& v : bd) {
            v *= 1.0 / tau;
        }
    } else {
        const std::vector<double> prev = restrict_interior(mesh, state.history[n - 1].values);
        for (std::size_t i = 0; i < bd.size(); ++i) {
            bd[i] = (2.0 / tau) * bd[i] - (0.5 / tau) * prev[i];
        }
    }
    const std::vector<double> mass_bd = ops.mass.multiply(bd);
    for (std::size_t i = 0; i < out.rhs.size(); ++i) {
        out.rhs[i] += mass_bd[i];
    }

    // lagged fractional sums: weight index i = n+1-j for stored level j
    std::vector<double> sum_alpha(out.rhs.size(), 0.0);
    std::vector<double> sum_beta(out.rhs.size(), 0.0);
    for (std::size_t j = 0; j <= n; ++j) {
        const double pa = state.weights_alpha.shifted[n + 1 - j];
        const double pb = state.weights_beta.shifted[n + 1 - j];
        const std::vector<double> level = restrict_interior(mesh, state.history[j].values);
        for (std::size_t i = 0; i < level.size(); ++i) {
            sum_alpha[i] += pa * level[i];
            sum_beta[i] += pb * level[i];
        }
    }
    const std::vector<double> mass_sum = ops.mass.multiply(sum_alpha);
    const std::vector<double> stiff_sum = ops.stiffness.multiply(sum_beta);
    for (std::size_t i = 0; i < out.rhs.size(); ++i) {
        out.rhs[i] -= inv_tau_alpha * mass_sum[i] + inv_tau_beta * stiff_sum[i];
    }
    return out;
}

SolverConfig scaled_config(const SolverConfig& solver, const Mesh2D& mesh) {
    SolverConfig cfg = solver;
    cfg.norm_scale = mesh.spacing();
    return cfg;
}

[[noreturn]] void rethrow_with_step(const SolverError& err, std::size_t step) {
    std::ostringstream msg;
    msg << "time step " << step << ": " << err.what();
    throw SolverError(msg.str(), err.report());
}

}  // namespace

std::pair<FeFunction, StepStats> step_standard(const TimeState& state, const StepOperators& ops,
                                               const ProblemSpec& problem,
                                               const SolverConfig& solver) {
    const Mesh2D& mesh = *state.mesh;
    AssembledStep step = assemble_step(state, ops, problem);
    const SolverConfig cfg = scaled_config(solver, mesh);

    auto residual = [&](const std::vector<double>& x) {
        std::vector<double> r = step.base.multiply(x);
        const std::vector<double> nl = restrict_interior(
            mesh, assemble_nonlinear_vector(mesh, expand_interior(mesh, x), problem.nonlinearity));
        for (std::size_t i = 0; i < r.size(); ++i) {
            r[i] += nl[i] - step.rhs[i];
        }
        return r;
    };
    auto jacobian = [&](const std::vector<double>& x) {
        SparseMatrix j = restrict_interior(
            mesh, assemble_nonlinear_jacobian(mesh, expand_interior(mesh, x),
                                              problem.nonlinearity_prime));
        add_scaled(j, 1.0, step.base);
        return j;
    };

    try {
        auto [x, report] = newton_solve(residual, jacobian,
                                        restrict_interior(mesh, state.history.back().values), cfg);
        step.stats.newton_iterations = report.iterations;
        step.stats.newton_updates = report.history;
        return {expand_interior(mesh, x), step.stats};
    } catch (const SolverError& err) {
        rethrow_with_step(err, state.step());
    }
}

std::pair<FeFunction, StepStats> step_linearized(const TimeState& state, const StepOperators& ops,
                                                 const FeFunction& coarse_on_fine,
                                                 const ProblemSpec& problem,
                                                 const SolverConfig& solver) {
    const Mesh2D& mesh = *state.mesh;
    if (coarse_on_fine.mesh != &mesh) {
        throw std::invalid_argument("linearization point does not live on the stepping mesh");
    }
    AssembledStep step = assemble_step(state, ops, problem);
    const SolverConfig cfg = scaled_config(solver, mesh);

    const LinearizedNonlinearity lin = assemble_linearized_nonlinearity(
        mesh, coarse_on_fine, problem.nonlinearity, problem.nonlinearity_prime);
    SparseMatrix system = restrict_interior(mesh, lin.jacobian);
    add_scaled(system, 1.0, step.base);
    const std::vector<double> constant = restrict_interior(mesh, lin.constant_part);
    for (std::size_t i = 0; i < step.rhs.size(); ++i) {
        step.rhs[i] -= constant[i];
    }

    try {
        auto [x, report] = solve_spd_with_fallback(system, step.rhs, cfg);
        (void)report;
        return {expand_interior(mesh, x), step.stats};
    } catch (const SolverError& err) {
        rethrow_with_step(err, state.step());
    }
}

TwoGridStep step_twogrid(const TimeState& coarse_state, const TimeState& fine_state,
                         const Nesting& nest, const StepOperators& ops_coarse,
                         const StepOperators& ops_fine, const ProblemSpec& problem,
                         const SolverConfig& solver) {
    if (coarse_state.mesh != &nest.coarse || fine_state.mesh != &nest.fine) {
        throw std::invalid_argument("two-grid step states do not match the nesting");
    }
    if (coarse_state.step() != fine_state.step()) {
        throw std::invalid_argument("two-grid step states are at different time levels");
    }
    TwoGridStep out;
    std::tie(out.coarse_next, out.coarse_stats) =
        step_standard(coarse_state, ops_coarse, problem, solver);
    const FeFunction prolonged = prolongate(nest, out.coarse_next);
    std::tie(out.fine_next, out.fine_stats) =
        step_linearized(fine_state, ops_fine, prolonged, problem, solver);
    return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

MarchResult march_standard(const ProblemSpec& problem, const Mesh2D& mesh,
                           const SolverConfig& solver, const MarchOptions& options) {
    const StepOperators ops = make_step_operators(mesh);
    TimeState state = make_time_state(mesh, problem);

    MarchResult result;
    result.max_l2_norm = l2_norm(ops, mesh, state.history.front());
    const auto start = Clock::now();
    for (int n = 0; n < problem.num_steps; ++n) {
        auto [next, stats] = step_standard(state, ops, problem, solver);
        result.max_l2_norm = std::max(result.max_l2_norm, l2_norm(ops, mesh, next));
        result.steps.push_back(stats);
        state.history.push_back(std::move(next));
    }
    result.solve_seconds = seconds_since(start);
    result.final_solution = state.history.back();
    if (options.keep_trajectory) {
        result.trajectory = std::move(state.history);
    }
    return result;
}

MarchResult march_twogrid(const ProblemSpec& problem, const Nesting& nest,
                          const SolverConfig& solver, const MarchOptions& options) {
    const StepOperators ops_coarse = make_step_operators(nest.coarse);
    const StepOperators ops_fine = make_step_operators(nest.fine);
    TimeState coarse = make_time_state(nest.coarse, problem);
    TimeState fine = make_time_state(nest.fine, problem);

    MarchResult result;
    result.max_l2_norm = l2_norm(ops_fine, nest.fine, fine.history.front());
    const auto start = Clock::now();

    // Step I for all levels
    for (int n = 0; n < problem.num_steps; ++n) {
        auto [next, stats] = step_standard(coarse, ops_coarse, problem, solver);
        result.steps.push_back(stats);
        coarse.history.push_back(std::move(next));
    }
    // Step II for all levels, consuming the stored coarse trajectory
    for (int n = 0; n < problem.num_steps; ++n) {
        const FeFunction prolonged =
            prolongate(nest, coarse.history[static_cast<std::size_t>(n) + 1]);
        auto [next, stats] = step_linearized(fine, ops_fine, prolonged, problem, solver);
        result.max_l2_norm = std::max(result.max_l2_norm, l2_norm(ops_fine, nest.fine, next));
        result.steps.push_back(stats);
        fine.history.push_back(std::move(next));
    }
    result.solve_seconds = seconds_since(start);

    result.final_solution = fine.history.back();
    result.final_coarse = coarse.history.back();
    if (options.keep_trajectory) {
        result.trajectory = std::move(fine.history);
        result.coarse_trajectory = std::move(coarse.history);
    }
    return result;
}

}  // namespace fcable
