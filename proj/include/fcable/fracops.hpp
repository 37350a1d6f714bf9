#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fcable {

/// Fractional differentiation order, restricted to the open interval (0,1).
class FractionalOrder {
public:
    explicit FractionalOrder(double gamma);

    double value() const { return gamma_; }

private:
    double gamma_;
};

/// Precomputed Grunwald-Letnikov weights g[0..capacity] and their
/// second-order weighted-shifted combination p[0..capacity] for one
/// fractional order. Immutable after construction; safe to share
/// across threads.
struct WsgdWeights {
    FractionalOrder order;
    std::vector<double> grunwald;  // g[i]
    std::vector<double> shifted;   // p[i]

    std::size_t capacity() const { return shifted.size() - 1; }
};

/// Grunwald-Letnikov weights g[0..n] of order gamma, computed with the
/// multiplicative recurrence g[0] = 1, g[i] = (1 - (gamma+1)/i) g[i-1].
/// The recurrence is stable for large i where Gamma-function ratios
/// would overflow.
std::vector<double> grunwald_weights(FractionalOrder gamma, std::size_t n);

/// Weights for the shifted second-order scheme:
///   p[0] = (gamma+2)/2,  p[i] = (gamma+2)/2 g[i] - gamma/2 g[i-1], i >= 1.
WsgdWeights wsgd_weights(FractionalOrder gamma, std::size_t n);

/// Discrete fractional derivative at the newest time level:
///   sum_{i=0}^{n+1} p[i]/tau^gamma * u^{n+1-i},
/// where history = {u^0, ..., u^{n+1}}. All levels must share one
/// dimension and the history may not exceed the weight capacity.
std::vector<double> apply_wsgd_history(const WsgdWeights& weights,
                                       std::span<const std::span<const double>> history,
                                       double tau);

/// The lagged part of the sum above: given the known levels
/// {u^0, ..., u^n}, returns sum_{i=1}^{n+1} p[i]/tau^gamma * u^{n+1-i}.
/// Time steppers add the implicit p[0]/tau^gamma * u^{n+1} term themselves.
std::vector<double> apply_wsgd_history_tail(const WsgdWeights& weights,
                                            std::span<const std::span<const double>> known_levels,
                                            double tau);

/// Reference evaluation of the order-gamma Riemann-Liouville derivative of
/// w at time t > 0, for test oracles. Evaluates the Caputo integral by
/// adaptive Gauss-Kronrod quadrature after a substitution that removes the
/// weak endpoint singularity, then adds the w(0) t^{-gamma}/Gamma(1-gamma)
/// correction relating the two derivatives. The derivative of w is taken
/// with a fourth-order difference stencil unless supplied.
double riemann_liouville_reference(FractionalOrder gamma,
                                   const std::function<double(double)>& w,
                                   double t,
                                   double tolerance = 1e-10,
                                   const std::function<double(double)>* dw = nullptr);

}  // namespace fcable
