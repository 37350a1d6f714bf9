#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fcable/fracops.hpp"
#include "test_support.hpp"

#include <cmath>
#include <random>

using namespace fcable;

TEST_CASE("fractional order rejects values outside (0,1)") {
    CHECK_THROWS_AS(FractionalOrder(0.0), std::invalid_argument);
    CHECK_THROWS_AS(FractionalOrder(1.0), std::invalid_argument);
    CHECK_THROWS_AS(FractionalOrder(-0.3), std::invalid_argument);
    CHECK_THROWS_AS(FractionalOrder(1.7), std::invalid_argument);
    CHECK(FractionalOrder(0.5).value() == 0.5);
}

TEST_CASE("grunwald weights follow the multiplicative recurrence") {
    const auto g0 = grunwald_weights(FractionalOrder(0.5), 0);
    REQUIRE(g0.size() == 1);
    CHECK(g0[0] == 1.0);

    const auto g = grunwald_weights(FractionalOrder(0.5), 2);
    CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(g[2] == doctest::Approx(-0.125).epsilon(1e-15));

    const auto g25 = grunwald_weights(FractionalOrder(0.25), 1);
    CHECK(g25[1] == doctest::Approx(-0.25).epsilon(1e-15));
}

TEST_CASE("shifted weights match their defining combination") {
    const auto w = wsgd_weights(FractionalOrder(0.5), 4);
    CHECK(w.shifted[0] == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(w.shifted[1] == doctest::Approx(-0.875).epsilon(1e-15));
    CHECK(w.shifted[2] == doctest::Approx(-0.03125).epsilon(1e-15));
    CHECK(w.capacity() == 4);
}

TEST_CASE("weight sign and partial-sum behavior over the gamma grid") {
    // g[0]=1, g[i]<0, and |1 + sum_{1..N} g| decreasing toward 0
    for (int k = 1; k <= 19; ++k) {
        const FractionalOrder gamma(0.05 * k);
        const auto g = grunwald_weights(gamma, 2000);
        CHECK(g[0] == 1.0);
        double tail = 0.0;
        double prev_gap = 1.0;
        bool ok = true;
        for (std::size_t i = 1; i < g.size(); ++i) {
            tail += g[i];
            const double gap = std::abs(1.0 + tail);
            ok = ok && g[i] < 0.0 && tail > -1.0 && tail <= 0.0 && gap <= prev_gap + 1e-16;
            prev_gap = gap;
        }
        CHECK(ok);
    }
}

TEST_CASE("absolute shifted-weight sums stay below 2 gamma + 2") {
    for (int k = 1; k <= 19; ++k) {
        const double gamma = 0.05 * k;
        const auto w = wsgd_weights(FractionalOrder(gamma), 2000);
        double total = 0.0;
        for (double p : w.shifted) {
            total += std::abs(p);
        }
        CHECK(total <= 2.0 * gamma + 2.0);
    }
}

TEST_CASE("quadratic form of the shifted weights is nonnegative") {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<std::size_t> len_dist(1, 64);
    std::uniform_real_distribution<double> gamma_dist(0.02, 0.98);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t len = len_dist(rng);
        const auto w = wsgd_weights(FractionalOrder(gamma_dist(rng)), len);
        const auto v = oracle::random_vector(rng, len + 1, -10.0, 10.0);
        double scale2 = 0.0;
        for (double x : v) {
            scale2 += x * x;
        }
        double form = 0.0;
        for (std::size_t n = 0; n <= len; ++n) {
            double conv = 0.0;
            for (std::size_t i = 0; i <= n; ++i) {
                conv += w.shifted[i] * v[n - i];
            }
            form += conv * v[n];
        }
        CHECK(form >= -1e-12 * scale2);
    }
}

namespace {

// scalar helper: discrete fractional derivative of w(t) at t = steps*tau
double wsgd_scalar(const WsgdWeights& weights, const std::function<double(double)>& w,
                   std::size_t steps, double tau) {
    std::vector<std::vector<double>> history;
    for (std::size_t j = 0; j <= steps; ++j) {
        history.push_back({w(static_cast<double>(j) * tau)});
    }
    std::vector<std::span<const double>> view(history.begin(), history.end());
    return apply_wsgd_history(weights, view, tau)[0];
}

}  // namespace

TEST_CASE("history application: base cases and errors") {
    const auto w = wsgd_weights(FractionalOrder(0.5), 8);

    SUBCASE("all-zero history gives the zero vector") {
        std::vector<std::vector<double>> levels(3, std::vector<double>(4, 0.0));
        std::vector<std::span<const double>> view(levels.begin(), levels.end());
        for (double v : apply_wsgd_history(w, view, 0.25)) {
            CHECK(v == 0.0);
        }
    }
    SUBCASE("single scalar level is p[0]-weighted") {
        std::vector<std::vector<double>> levels{{1.0}};
        std::vector<std::span<const double>> view(levels.begin(), levels.end());
        CHECK(apply_wsgd_history(w, view, 1.0)[0] == doctest::Approx(1.25).epsilon(1e-15));
    }
    SUBCASE("two scalar levels, hand-evaluated") {
        std::vector<std::vector<double>> levels{{1.0}, {1.0}};
        std::vector<std::span<const double>> view(levels.begin(), levels.end());
        CHECK(apply_wsgd_history(w, view, 0.5)[0] ==
              doctest::Approx(0.5303300858899106).epsilon(1e-14));
    }
    SUBCASE("dimension mismatch is rejected") {
        std::vector<std::vector<double>> levels{{1.0, 2.0}, {1.0}};
        std::vector<std::span<const double>> view(levels.begin(), levels.end());
        CHECK_THROWS_AS(apply_wsgd_history(w, view, 0.5), std::invalid_argument);
    }
    SUBCASE("history beyond the weight capacity is rejected") {
        std::vector<std::vector<double>> levels(10, std::vector<double>{1.0});
        std::vector<std::span<const double>> view(levels.begin(), levels.end());
        CHECK_THROWS_AS(apply_wsgd_history(w, view, 0.5), std::invalid_argument);
    }
}

TEST_CASE("full sum equals implicit term plus lagged tail") {
    std::mt19937 rng(7);
    const auto w = wsgd_weights(FractionalOrder(0.3), 12);
    const double tau = 0.2;
    std::vector<std::vector<double>> levels;
    for (int j = 0; j < 6; ++j) {
        levels.push_back(oracle::random_vector(rng, 5));
    }
    std::vector<std::span<const double>> full(levels.begin(), levels.end());
    std::vector<std::span<const double>> known(levels.begin(), levels.end() - 1);
    const auto whole = apply_wsgd_history(w, full, tau);
    const auto tail = apply_wsgd_history_tail(w, known, tau);
    const double p0 = w.shifted[0] / std::pow(tau, 0.3);
    for (std::size_t k = 0; k < whole.size(); ++k) {
        CHECK(whole[k] == doctest::Approx(tail[k] + p0 * levels.back()[k]).epsilon(1e-13));
    }
}

TEST_CASE("history application is linear") {
    std::mt19937 rng(11);
    const auto w = wsgd_weights(FractionalOrder(0.7), 10);
    const double tau = 0.125;
    std::vector<std::vector<double>> ua, ub, uc;
    const double a = 1.7, b = -0.4;
    for (int j = 0; j < 5; ++j) {
        ua.push_back(oracle::random_vector(rng, 6));
        ub.push_back(oracle::random_vector(rng, 6));
        std::vector<double> combo(6);
        for (int k = 0; k < 6; ++k) {
            combo[k] = a * ua.back()[k] + b * ub.back()[k];
        }
        uc.push_back(combo);
    }
    std::vector<std::span<const double>> va(ua.begin(), ua.end());
    std::vector<std::span<const double>> vb(ub.begin(), ub.end());
    std::vector<std::span<const double>> vc(uc.begin(), uc.end());
    const auto ra = apply_wsgd_history(w, va, tau);
    const auto rb = apply_wsgd_history(w, vb, tau);
    const auto rc = apply_wsgd_history(w, vc, tau);
    for (std::size_t k = 0; k < rc.size(); ++k) {
        CHECK(rc[k] == doctest::Approx(a * ra[k] + b * rb[k]).epsilon(1e-12));
    }
}

TEST_CASE("reference derivative: zero function and closed form") {
    const FractionalOrder half(0.5);
    CHECK(riemann_liouville_reference(half, [](double) { return 0.0; }, 0.7) == 0.0);

    // order-1/2 derivative of t^2 at t=1 is 2/Gamma(2.5)
    const double value = riemann_liouville_reference(half, [](double t) { return t * t; }, 1.0);
    CHECK(value == doctest::Approx(1.5045055561273501).epsilon(1e-9));

    // nonzero initial value exercises the correction term: w = 1 + t^2
    const double shifted =
        riemann_liouville_reference(half, [](double t) { return 1.0 + t * t; }, 1.0);
    const double correction = 1.0 / std::tgamma(0.5);
    CHECK(shifted == doctest::Approx(1.5045055561273501 + correction).epsilon(1e-9));
}

TEST_CASE("scheme converges with second order to the reference derivative") {
    for (const double gamma : {0.25, 0.5, 0.75}) {
        const FractionalOrder order(gamma);
        const double exact = 2.0 / std::tgamma(3.0 - gamma);
        auto quadratic = [](double t) { return t * t; };
        CHECK(riemann_liouville_reference(order, quadratic, 1.0) ==
              doctest::Approx(exact).epsilon(1e-8));

        std::vector<double> errors;
        for (const std::size_t steps : {40u, 80u, 160u}) {
            const double tau = 1.0 / static_cast<double>(steps);
            const auto w = wsgd_weights(order, steps);
            errors.push_back(std::abs(wsgd_scalar(w, quadratic, steps, tau) - exact));
        }
        const double order1 = std::log2(errors[0] / errors[1]);
        const double order2 = std::log2(errors[1] / errors[2]);
        CHECK(order1 == doctest::Approx(2.0).epsilon(0.05));
        CHECK(order2 == doctest::Approx(2.0).epsilon(0.05));
    }
}
