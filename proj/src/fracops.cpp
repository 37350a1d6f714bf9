#include "fcable/fracops.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fcable {

FractionalOrder::FractionalOrder(double gamma) : gamma_(gamma) {
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        std::ostringstream msg;
        msg << "fractional order must lie strictly inside (0,1), got " << gamma;
        throw std::invalid_argument(msg.str());
    }
}

std::vector<double> grunwald_weights(FractionalOrder gamma, std::size_t n) {
    const double g = gamma.value();
    std::vector<double> out(n + 1);
    out[0] = 1.0;
    for (std::size_t i = 1; i <= n; ++i) {
        out[i] = (1.0 - (g + 1.0) / static_cast<double>(i)) * out[i - 1];
    }
    return out;
}

WsgdWeights wsgd_weights(FractionalOrder gamma, std::size_t n) {
    const double g = gamma.value();
    std::vector<double> gl = grunwald_weights(gamma, n);
    std::vector<double> p(n + 1);
    p[0] = 0.5 * (g + 2.0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[i] = 0.5 * (g + 2.0) * gl[i] - 0.5 * g * gl[i - 1];
    }
    return WsgdWeights{gamma, std::move(gl), std::move(p)};
}

namespace {

void check_history(const WsgdWeights& weights,
                   std::span<const std::span<const double>> levels,
                   std::size_t max_weight_index,
                   double tau) {
    if (tau <= 0.0) {
        throw std::invalid_argument("time step must be positive");
    }
    if (levels.empty()) {
        throw std::invalid_argument("history must contain at least one level");
    }
    if (max_weight_index > weights.capacity()) {
        std::ostringstream msg;
        msg << "history needs weight index " << max_weight_index
            << " but capacity is " << weights.capacity();
        throw std::invalid_argument(msg.str());
    }
    const std::size_t dim = levels.front().size();
    for (const auto& level : levels) {
        if (level.size() != dim) {
            throw std::invalid_argument("history levels have mismatched dimensions");
        }
    }
}

}  // namespace

std::vector<double> apply_wsgd_history(const WsgdWeights& weights,
                                       std::span<const std::span<const double>> history,
                                       double tau) {
    // history = {u^0, ..., u^{n+1}}, weight index i pairs with u^{n+1-i}
    const std::size_t top = history.size() - 1;
    check_history(weights, history, top, tau);
    const double scale = 1.0 / std::pow(tau, weights.order.value());
    std::vector<double> out(history.front().size(), 0.0);
    for (std::size_t i = 0; i <= top; ++i) {
        const double c = weights.shifted[i] * scale;
        const auto& level = history[top - i];
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] += c * level[k];
        }
    }
    return out;
}

std::vector<double> apply_wsgd_history_tail(const WsgdWeights& weights,
                                            std::span<const std::span<const double>> known_levels,
                                            double tau) {
    // known_levels = {u^0, ..., u^n}; weight index i = n+1-j for level j
    const std::size_t n = known_levels.size() - 1;
    check_history(weights, known_levels, n + 1, tau);
    const double scale = 1.0 / std::pow(tau, weights.order.value());
    std::vector<double> out(known_levels.front().size(), 0.0);
    for (std::size_t j = 0; j <= n; ++j) {
        const double c = weights.shifted[n + 1 - j] * scale;
        const auto& level = known_levels[j];
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] += c * level[k];
        }
    }
    return out;
}

namespace {

// Fourth-order five-point derivative, shifted to one-sided stencils near
// the ends of [lo, hi] so w is never sampled outside its domain.
double derivative_5pt(const std::function<double(double)>& w, double x, double lo, double hi) {
    const double span = hi - lo;
    const double h = std::max(1e-5 * std::max(1.0, std::abs(x)), 1e-6 * span);
    if (x - 2.0 * h >= lo && x + 2.0 * h <= hi) {
        return (8.0 * (w(x + h) - w(x - h)) - (w(x + 2.0 * h) - w(x - 2.0 * h))) / (12.0 * h);
    }
    const bool forward = x - 2.0 * h < lo;
    const double s = forward ? h : -h;
    // one-sided 5-point, O(h^4)
    return (-25.0 * w(x) + 48.0 * w(x + s) - 36.0 * w(x + 2.0 * s) + 16.0 * w(x + 3.0 * s) -
            3.0 * w(x + 4.0 * s)) /
           (12.0 * s);
}

}  // namespace

double riemann_liouville_reference(FractionalOrder gamma,
                                   const std::function<double(double)>& w,
                                   double t,
                                   double tolerance,
                                   const std::function<double(double)>* dw) {
    if (t <= 0.0) {
        throw std::invalid_argument("reference evaluation requires t > 0");
    }
    const double g = gamma.value();

    auto wprime = [&](double s) { return dw ? (*dw)(s) : derivative_5pt(w, s, 0.0, t); };

    // Caputo integral 1/Gamma(1-g) \int_0^t w'(s) (t-s)^{-g} ds. The
    // singular head with w'(t) frozen integrates in closed form; the
    // remainder is continuous (O((t-s)^{1-g})) and goes to
    // double-exponential quadrature, with the abscissa-to-endpoint distance
    // supplied by the integrator keeping (t-s)^{-g} accurate near s = t.
    const double wp_end = wprime(t);
    const double head = wp_end * std::pow(t, 1.0 - g) / (1.0 - g);

    boost::math::quadrature::tanh_sinh<double> integrator;
    auto integrand = [&](double s, double to_endpoint) {
        const double gap = s > 0.5 * t ? to_endpoint : t - s;
        return (wprime(s) - wp_end) * std::pow(gap, -g);
    };
    double error_estimate = 0.0;
    double l1_norm = 0.0;
    const double remainder =
        integrator.integrate(integrand, 0.0, t, tolerance, &error_estimate, &l1_norm);
    const double scale = std::max({1.0, std::abs(remainder), std::abs(head)});
    if (!(error_estimate < tolerance * scale * 100.0)) {
        std::ostringstream msg;
        msg << "quadrature failed to converge: estimate " << error_estimate << ", value "
            << remainder << ", requested tolerance " << tolerance;
        throw std::runtime_error(msg.str());
    }

    const double caputo = (head + remainder) / std::tgamma(1.0 - g);
    const double initial_term = w(0.0) * std::pow(t, -g) / std::tgamma(1.0 - g);
    return caputo + initial_term;
}

}  // namespace fcable
