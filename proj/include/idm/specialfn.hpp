#pragma once

// Digamma/trigamma, the expected-entropy summand h and its derivative,
// and the Gaussian coverage factor kappa(alpha).

#include <cmath>
#include <numbers>

#include "idm/core.hpp"

namespace idm {

namespace detail {

inline constexpr double kAsymptoticThreshold = 6.0;

}  // namespace detail

/// psi(x) = d/dx log Gamma(x). Recurrence up to x >= 6, then the
/// asymptotic series with Bernoulli terms through x^-20.
inline double digamma(double x) {
  require(x > 0.0, "digamma: argument must be positive");
  double shift = 0.0;
  while (x < detail::kAsymptoticThreshold) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // B_2k / (2k) for k = 1..10; the k = 8 term alone is ~3e-13 at x = 6
  const double series =
      inv2 * (1.0 / 12 -
      inv2 * (1.0 / 120 -
      inv2 * (1.0 / 252 -
      inv2 * (1.0 / 240 -
      inv2 * (1.0 / 132 -
      inv2 * (691.0 / 32760 -
      inv2 * (1.0 / 12 -
      inv2 * (3617.0 / 8160 -
      inv2 * (43867.0 / 14364 -
      inv2 * (174611.0 / 6600))))))))));
  return shift + std::log(x) - 0.5 * inv - series;
}

/// psi'(x), same recurrence/asymptotic split as digamma.
inline double trigamma(double x) {
  require(x > 0.0, "trigamma: argument must be positive");
  double shift = 0.0;
  while (x < detail::kAsymptoticThreshold) {
    shift += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // 1/x + 1/(2x^2) + sum_k B_2k / x^(2k+1)
  const double series =
      inv * (1.0 + inv * (0.5 + inv * (1.0 / 6 -
      inv2 * (1.0 / 30 -
      inv2 * (1.0 / 42 -
      inv2 * (1.0 / 30 -
      inv2 * (5.0 / 66 -
      inv2 * (691.0 / 2730 -
      inv2 * (7.0 / 6 -
      inv2 * (3617.0 / 510 -
      inv2 * (43867.0 / 798 -
      inv2 * (174611.0 / 330))))))))))));
  return shift + series;
}

/// Carries N = n + s, the effective posterior sample size inside h.
struct EntropyContext {
  double n_plus_s;
  double psi_top;  // psi(N + 1)

  explicit EntropyContext(double n_plus_s_) : n_plus_s(n_plus_s_), psi_top(0.0) {
    require(n_plus_s > 0.0, "entropy context: n + s must be positive");
    psi_top = digamma(n_plus_s + 1.0);
  }
};

/// Posterior-expected entropy summand h(u) = u [psi(N+1) - psi(N u + 1)].
/// Continuous at u = 0 (value 0); h(1) = 0.
inline double h(double u, const EntropyContext& ctx) {
  require(u >= 0.0 && u <= 1.0, "h: u must lie in [0,1]");
  if (u == 0.0 || u == 1.0) return 0.0;
  return u * (ctx.psi_top - digamma(ctx.n_plus_s * u + 1.0));
}

/// h'(u) = psi(N+1) - psi(N u + 1) - N u psi'(N u + 1); at u = 0 this is
/// the finite limit psi(N+1) - psi(1).
inline double h_prime(double u, const EntropyContext& ctx) {
  require(u >= 0.0 && u <= 1.0, "h_prime: u must lie in [0,1]");
  const double nu = ctx.n_plus_s * u;
  return ctx.psi_top - digamma(nu + 1.0) - nu * trigamma(nu + 1.0);
}

/// kappa >= 0 with erf(kappa / sqrt 2) = alpha, by bisection.
inline double kappa_from_alpha(double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "kappa_from_alpha: alpha must lie in (0,1)");
  double lo = 0.0;
  double hi = 1.0;
  while (std::erf(hi / std::numbers::sqrt2) < alpha) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::erf(mid / std::numbers::sqrt2) < alpha)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace idm
