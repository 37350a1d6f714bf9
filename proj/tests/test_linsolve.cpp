#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fcable/assembly.hpp"
#include "fcable/linsolve.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace fcable;

namespace {

SparseMatrix dense_to_sparse(std::size_t n, const std::vector<double>& dense) {
    SparseMatrix m;
    m.rows = m.cols = n;
    m.row_offsets.push_back(0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            if (dense[r * n + c] != 0.0) {
                m.col_indices.push_back(c);
                m.values.push_back(dense[r * n + c]);
            }
        }
        m.row_offsets.push_back(m.col_indices.size());
    }
    return m;
}

std::vector<double> to_dense(const SparseMatrix& m) {
    std::vector<double> dense(m.rows * m.cols, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t k = m.row_offsets[r]; k < m.row_offsets[r + 1]; ++k) {
            dense[r * m.cols + m.col_indices[k]] = m.values[k];
        }
    }
    return dense;
}

}  // namespace

TEST_CASE("solve_spd on trivial systems") {
    SolverConfig cfg;
    SUBCASE("identity") {
        const SparseMatrix eye = dense_to_sparse(3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
        const std::vector<double> b{1.5, -2.0, 0.25};
        const auto [x, report] = solve_spd(eye, b, cfg);
        CHECK(report.converged);
        for (std::size_t i = 0; i < b.size(); ++i) {
            CHECK(x[i] == doctest::Approx(b[i]).epsilon(1e-13));
        }
    }
    SUBCASE("diagonal two by two") {
        const SparseMatrix d = dense_to_sparse(2, {2, 0, 0, 4});
        const auto [x, report] = solve_spd(d, {2.0, 8.0}, cfg);
        CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-13));
        CHECK(report.converged);
    }
    SUBCASE("zero right-hand side") {
        const SparseMatrix d = dense_to_sparse(2, {2, 0, 0, 4});
        const auto [x, report] = solve_spd(d, {0.0, 0.0}, cfg);
        CHECK(report.converged);
        CHECK(report.iterations == 0);
        CHECK(x[0] == 0.0);
        CHECK(x[1] == 0.0);
    }
}

TEST_CASE("CG matches a dense factorization on the interior stiffness system") {
    const Mesh2D mesh = build_mesh(8);
    const SparseMatrix a = restrict_interior(mesh, assemble_stiffness(mesh));
    const auto b = restrict_interior(
        mesh, assemble_load(mesh, [](double x, double y) {
            return std::sin(2 * std::numbers::pi * x) * std::sin(2 * std::numbers::pi * y);
        }));
    REQUIRE(a.rows == 49);

    SolverConfig cfg;
    const auto [x_cg, report] = solve_spd(a, b, cfg);
    CHECK(report.converged);

    const auto x_direct = oracle::dense_solve(to_dense(a), b);
    for (std::size_t i = 0; i < x_cg.size(); ++i) {
        CHECK(x_cg[i] == doctest::Approx(x_direct[i]).epsilon(1e-10));
    }

    SUBCASE("the built-in direct method agrees too") {
        SolverConfig direct;
        direct.method = SolveMethod::direct_cholesky;
        const auto [x_chol, chol_report] = solve_spd(a, b, direct);
        CHECK(chol_report.converged);
        for (std::size_t i = 0; i < x_chol.size(); ++i) {
            CHECK(x_chol[i] == doctest::Approx(x_direct[i]).epsilon(1e-10));
        }
    }
    SUBCASE("solution reproduces the right-hand side") {
        const auto ax = a.multiply(x_cg);
        double err = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            err += (ax[i] - b[i]) * (ax[i] - b[i]);
            scale += b[i] * b[i];
        }
        CHECK(std::sqrt(err) <= 1e-10 * std::sqrt(scale));
    }
}

TEST_CASE("CG failure modes") {
    SUBCASE("indefinite matrix triggers the curvature check") {
        const SparseMatrix ind = dense_to_sparse(2, {1, 2, 2, 1});  // eigenvalues 3, -1
        SolverConfig cfg;
        CHECK_THROWS_AS(solve_spd(ind, {1.0, -1.0}, cfg), SolverError);
    }
    SUBCASE("nonpositive diagonal is rejected up front") {
        const SparseMatrix neg = dense_to_sparse(2, {1, 0, 0, -1});
        SolverConfig cfg;
        CHECK_THROWS_AS(solve_spd(neg, {1.0, 1.0}, cfg), SolverError);
    }
    SUBCASE("iteration cap raises with the report attached") {
        const Mesh2D mesh = build_mesh(6);
        const SparseMatrix a = restrict_interior(mesh, assemble_stiffness(mesh));
        SolverConfig cfg;
        cfg.max_iterations = 2;
        std::vector<double> b(a.rows, 1.0);
        try {
            solve_spd(a, b, cfg);
            FAIL("expected SolverError");
        } catch (const SolverError& e) {
            CHECK(e.report().iterations == 2);
            CHECK_FALSE(e.report().converged);
        }
    }
    SUBCASE("fallback rescues an early iteration cap") {
        const Mesh2D mesh = build_mesh(6);
        const SparseMatrix a = restrict_interior(mesh, assemble_stiffness(mesh));
        SolverConfig cfg;
        cfg.max_iterations = 2;
        std::vector<double> b(a.rows, 1.0);
        const auto [x, report] = solve_spd_with_fallback(a, b, cfg);
        CHECK(report.converged);
        const auto ax = a.multiply(x);
        for (std::size_t i = 0; i < b.size(); ++i) {
            CHECK(ax[i] == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("CG error decreases monotonically in the energy norm") {
    const Mesh2D mesh = build_mesh(6);
    const SparseMatrix a = restrict_interior(mesh, assemble_stiffness(mesh));
    const auto b = restrict_interior(
        mesh, assemble_load(mesh, [](double x, double y) { return x * (1 - x) * y; }));
    const auto exact = oracle::dense_solve(to_dense(a), b);

    std::vector<double> energy_errors;
    auto observer = [&](std::size_t, const std::vector<double>& x) {
        std::vector<double> diff(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            diff[i] = x[i] - exact[i];
        }
        const auto adiff = a.multiply(diff);
        double e = 0.0;
        for (std::size_t i = 0; i < diff.size(); ++i) {
            e += diff[i] * adiff[i];
        }
        energy_errors.push_back(std::sqrt(std::max(e, 0.0)));
    };
    SolverConfig cfg;
    const auto [x, report] = solve_spd(a, b, cfg, observer);
    CHECK(report.converged);
    REQUIRE(energy_errors.size() >= 2);
    for (std::size_t i = 1; i < energy_errors.size(); ++i) {
        CHECK(energy_errors[i] <= energy_errors[i - 1] + 1e-10);
    }
}

TEST_CASE("newton iteration") {
    SolverConfig cfg;
    SUBCASE("linear residual converges in one iteration") {
        auto residual = [](const std::vector<double>& x) { return x; };
        auto jacobian = [](const std::vector<double>& x) {
            return dense_to_sparse(x.size(), {1, 0, 0, 1});
        };
        const auto [x, report] = newton_solve(residual, jacobian, {3.0, -5.0}, cfg);
        CHECK(report.iterations == 1);
        CHECK(report.converged);
        CHECK(std::abs(x[0]) <= 1e-12);
        CHECK(std::abs(x[1]) <= 1e-12);
    }
    SUBCASE("scalar cubic matches the bisection oracle") {
        // residual from a one-unknown coarse system: a u + c u^3 - rhs
        const double a = 2.5, c = 0.75, rhs = 1.7;
        auto f = [&](double u) { return a * u + c * u * u * u - rhs; };
        auto residual = [&](const std::vector<double>& x) {
            return std::vector<double>{f(x[0])};
        };
        auto jacobian = [&](const std::vector<double>& x) {
            SparseMatrix j;
            j.rows = j.cols = 1;
            j.row_offsets = {0, 1};
            j.col_indices = {0};
            j.values = {a + 3.0 * c * x[0] * x[0]};
            return j;
        };
        const auto [x, report] = newton_solve(residual, jacobian, {0.0}, cfg);
        const double root = oracle::bisect(f, 0.0, 2.0);
        CHECK(report.converged);
        CHECK(x[0] == doctest::Approx(root).epsilon(1e-10));
    }
    SUBCASE("divergence is detected after sustained residual growth") {
        // cube-root residual: the Newton map doubles the iterate each time
        auto residual = [](const std::vector<double>& x) {
            return std::vector<double>{std::cbrt(x[0])};
        };
        auto jacobian = [](const std::vector<double>& x) {
            SparseMatrix j;
            j.rows = j.cols = 1;
            j.row_offsets = {0, 1};
            j.col_indices = {0};
            const double c = std::cbrt(x[0]);
            j.values = {1.0 / (3.0 * c * c)};
            return j;
        };
        CHECK_THROWS_AS(newton_solve(residual, jacobian, {1.0}, cfg), SolverError);
    }
    SUBCASE("the iteration cap raises with trajectory attached") {
        SolverConfig tight = cfg;
        tight.newton_max_iter = 2;
        tight.newton_tolerance = 1e-300;
        auto residual = [](const std::vector<double>& x) {
            return std::vector<double>{x[0] * x[0] * x[0] - 2.0};
        };
        auto jacobian = [](const std::vector<double>& x) {
            SparseMatrix j;
            j.rows = j.cols = 1;
            j.row_offsets = {0, 1};
            j.col_indices = {0};
            j.values = {3.0 * x[0] * x[0]};
            return j;
        };
        try {
            newton_solve(residual, jacobian, {1.0}, tight);
            FAIL("expected SolverError");
        } catch (const SolverError& e) {
            CHECK(e.report().iterations == 2);
            CHECK(e.report().history.size() == 2);
        }
    }
}
