#pragma once

#include "fcable/assembly.hpp"
#include "fcable/fracops.hpp"
#include "fcable/linsolve.hpp"
#include "fcable/mesh.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace fcable {

/// One instance of the model problem
///   u_t = -D_t^alpha u + D_t^beta (Laplace u) - F(u) + g,  u = 0 on the
/// boundary, u(0) = initial, on [0,1]^2 x (0, final_time], with
/// Riemann-Liouville derivatives of orders alpha, beta in (0,1).
struct ProblemSpec {
    FractionalOrder alpha;
    FractionalOrder beta;
    double final_time = 1.0;
    int num_steps = 2;
    std::function<double(double)> nonlinearity;            // F
    std::function<double(double)> nonlinearity_prime;      // F'
    std::function<double(double, double, double)> source;  // g(x, y, t)
    std::function<double(double, double)> initial;         // u(x, y, 0)
    /// Exact solution (x, y, t) when known; empty otherwise.
    std::function<double(double, double, double)> exact;

    double tau() const { return final_time / num_steps; }
};

void validate(const ProblemSpec& problem);

/// Solution history u^0..u^n on one mesh plus the scheme constants the
/// discrete fractional sums need. Boundary entries of every level are zero.
struct TimeState {
    const Mesh2D* mesh;
    std::vector<FeFunction> history;
    double tau;
    WsgdWeights weights_alpha;
    WsgdWeights weights_beta;

    std::size_t step() const { return history.size() - 1; }
};

/// Initial state with u^0 the nodal interpolant of the initial condition.
TimeState make_time_state(const Mesh2D& mesh, const ProblemSpec& problem);

/// Interior mass and stiffness blocks, assembled once per mesh.
struct StepOperators {
    SparseMatrix mass;
    SparseMatrix stiffness;
};

StepOperators make_step_operators(const Mesh2D& mesh);

struct StepStats {
    std::size_t step = 0;
    std::size_t newton_iterations = 0;
    /// Scaled Newton update norms, one per iteration.
    std::vector<double> newton_updates;
    /// Number of shifted-weight terms entering the step (n+2: the implicit
    /// p[0] plus one per stored level).
    std::size_t weight_terms = 0;
    /// False exactly at the first step, which uses the one-step quotient.
    bool two_step_difference = false;
};

/// Advance u^n -> u^{n+1} with the standard nonlinear scheme (implicit
/// F(u^{n+1}) resolved by Newton). Does not modify the state; the caller
/// appends the returned level.
std::pair<FeFunction, StepStats> step_standard(const TimeState& state, const StepOperators& ops,
                                               const ProblemSpec& problem,
                                               const SolverConfig& solver);

/// The fine-grid half of the two-grid step: one linear solve in which the
/// nonlinearity is replaced by its tangent at coarse_on_fine (the coarse
/// solution at the same target level, prolonged to this state's mesh).
std::pair<FeFunction, StepStats> step_linearized(const TimeState& state, const StepOperators& ops,
                                                 const FeFunction& coarse_on_fine,
                                                 const ProblemSpec& problem,
                                                 const SolverConfig& solver);

/// Both halves of one two-grid step: the coarse nonlinear solve, then the
/// linearized fine solve around its prolongation. Both states must sit at
/// the same step index.
struct TwoGridStep {
    FeFunction coarse_next;
    FeFunction fine_next;
    StepStats coarse_stats;
    StepStats fine_stats;
};
TwoGridStep step_twogrid(const TimeState& coarse_state, const TimeState& fine_state,
                         const Nesting& nest, const StepOperators& ops_coarse,
                         const StepOperators& ops_fine, const ProblemSpec& problem,
                         const SolverConfig& solver);

enum class Scheme { standard, twogrid };

struct MarchOptions {
    bool keep_trajectory = false;
};

struct MarchResult {
    /// Final-time solution on the (fine) mesh.
    FeFunction final_solution;
    std::optional<FeFunction> final_coarse;
    /// u^0..u^M when keep_trajectory is set.
    std::vector<FeFunction> trajectory;
    std::vector<FeFunction> coarse_trajectory;
    /// Wall-clock seconds spent in the time loop (mesh-constant matrices
    /// are assembled outside the timer).
    double solve_seconds = 0.0;
    std::vector<StepStats> steps;
    /// max over n of the L2 norm of u^n.
    double max_l2_norm = 0.0;
};

MarchResult march_standard(const ProblemSpec& problem, const Mesh2D& mesh,
                           const SolverConfig& solver, const MarchOptions& options = {});

/// Two passes: the full coarse trajectory first (the equations couple only
/// through the coarse value at the matching level), then the fine loop
/// consuming stored coarse solutions.
MarchResult march_twogrid(const ProblemSpec& problem, const Nesting& nest,
                          const SolverConfig& solver, const MarchOptions& options = {});

/// L2 norm of a boundary-pinned FE function via the interior mass block.
double l2_norm(const StepOperators& ops, const Mesh2D& mesh, const FeFunction& fn);

}  // namespace fcable
