#pragma once

#include "fcable/stepper.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fcable {

/// A problem instance whose source term is derived analytically from a
/// known exact solution, so solver error is measurable exactly.
struct ManufacturedCase {
    std::string name;
    ProblemSpec problem;
};

/// The cable benchmark: exact solution u = t^2 sin(2 pi x) sin(2 pi y),
/// cubic nonlinearity F(u) = u^3 - u, zero initial data, final time 1, and
/// the matching source
///   g = [2t - t^2 + 2 t^{2-a}/Gamma(3-a) + 16 pi^2 t^{2-b}/Gamma(3-b)]
///         sin(2 pi x) sin(2 pi y)  +  t^6 sin^3(2 pi x) sin^3(2 pi y).
ManufacturedCase cable_benchmark(double alpha, double beta, int num_steps);

/// One spatial resolution of a convergence study; coarse_n is 0 for rows
/// of the single-mesh (standard) scheme.
struct MeshPair {
    int coarse_n = 0;
    int fine_n = 0;
};

struct ConvergenceRow {
    std::optional<double> coarse_h;
    double fine_h = 0.0;
    double error_l2 = 0.0;
    std::optional<double> order;  // absent on the first row
    double cpu_seconds = 0.0;
};

/// Errors at final time for successive refinements, with observed orders
/// log(e_prev/e_curr)/log(h_prev/h_curr) against the fine spacing. Rows
/// may be computed concurrently (jobs > 1); their order in the result is
/// fixed by the input list. The error column integrates the pointwise
/// error cellwise with the 2x2 Gauss rule, the convention the reference
/// errors for this benchmark follow.
std::vector<ConvergenceRow> convergence_study(const ManufacturedCase& mcase,
                                              std::span<const MeshPair> pairs, Scheme scheme,
                                              const SolverConfig& solver, int jobs = 1);

/// The error measure used by convergence_study for one finished march.
double benchmark_error(const ManufacturedCase& mcase, const Mesh2D& mesh, const FeFunction& fn);

}  // namespace fcable
