#pragma once

// Exact robust intervals for separable concave estimators F(u) = sum_i f(u_i)
// over the shifted simplex: the minimum sits at the vertex of the largest
// count, the maximum at the water-filled point that lifts the smallest
// components to a common level.

#include <algorithm>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "idm/core.hpp"
#include "idm/specialfn.hpp"

namespace idm {

using ScalarFn = std::function<double(double)>;

/// f and f' of a separable estimator, with a flag recording that f passed
/// the concavity check.
struct SeparableConcave {
  ScalarFn f;
  ScalarFn f_prime;
  bool concavity_certified = false;

  static constexpr int kGridPoints = 101;
  static constexpr double kChordTolerance = 1e-10;

  /// Midpoint chord test on a uniform grid of [0,1].
  static bool passes_chord_test(const ScalarFn& f) {
    std::vector<double> values(kGridPoints);
    for (int k = 0; k < kGridPoints; ++k) values[k] = f(static_cast<double>(k) / (kGridPoints - 1));
    for (int k = 1; k + 1 < kGridPoints; ++k)
      if (values[k] < 0.5 * (values[k - 1] + values[k + 1]) - kChordTolerance) return false;
    return true;
  }

  /// Runs the chord test and sets the flag; throws if f is not concave.
  static SeparableConcave certified(ScalarFn f, ScalarFn f_prime) {
    require(passes_chord_test(f), "separable concave: f failed the concavity chord test");
    return SeparableConcave{std::move(f), std::move(f_prime), true};
  }

  double evaluate(const UPoint& u) const {
    double sum = 0.0;
    for (double ui : u.values) sum += f(ui);
    return sum;
  }
};

/// f = h(.; N) with N = n + s: F is then the posterior-expected entropy.
inline SeparableConcave entropy_functional(double n_plus_s) {
  const EntropyContext ctx(n_plus_s);
  return SeparableConcave{[ctx](double u) { return h(u, ctx); },
                          [ctx](double u) { return h_prime(u, ctx); }, true};
}

inline SeparableConcave entropy_functional(const Counts& counts, const IdmConfig& cfg) {
  return entropy_functional(static_cast<double>(counts.total()) + cfg.s);
}

/// Expected entropy sum_i h(u_i) with N taken from u.
inline double expected_entropy(const UPoint& u) {
  const EntropyContext ctx(u.n_plus_s);
  double sum = 0.0;
  for (double ui : u.values) sum += h(ui, ctx);
  return sum;
}

struct ExtremaWitness {
  TVector t_min;
  UPoint u_max;
  std::size_t m_star = 1;  // number of equalized components
  double u_tilde = 0.0;    // the common level they are raised to
};

struct MinVertex {
  std::size_t index;  // zero-based argmax_i n_i, lowest index on ties
  UPoint u;
};

inline MinVertex exact_min_vertex(const Counts& counts, const IdmConfig& cfg) {
  const auto vals = counts.values();
  const auto it = std::max_element(vals.begin(), vals.end());  // first maximum
  const auto index = static_cast<std::size_t>(std::distance(vals.begin(), it));
  return {index, u_at_vertex(counts, cfg, index)};
}

/// Stable ascending order of the counts.
inline std::vector<std::size_t> ascending_order(const Counts& counts) {
  std::vector<std::size_t> order(counts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return counts[a] < counts[b]; });
  return order;
}

/// Water levels u~(m) = [s + sum_{k<=m} n_(k)] / [m (n + s)], m = 1..d,
/// over the ascending order of the counts. Entry m-1 holds u~(m).
inline std::vector<double> water_levels(const Counts& counts, const IdmConfig& cfg) {
  const auto order = ascending_order(counts);
  const double n_plus_s = static_cast<double>(counts.total()) + cfg.s;
  std::vector<double> levels(counts.size());
  double partial = cfg.s;
  for (std::size_t m = 1; m <= counts.size(); ++m) {
    partial += static_cast<double>(counts[order[m - 1]]);
    levels[m - 1] = partial / (static_cast<double>(m) * n_plus_s);
  }
  return levels;
}

inline ExtremaWitness exact_max_point(const Counts& counts, const IdmConfig& cfg) {
  const auto levels = water_levels(counts, cfg);
  // full scan; strict < keeps the smallest m on ties
  std::size_t best = 0;
  for (std::size_t m = 1; m < levels.size(); ++m)
    if (levels[m] < levels[best]) best = m;
  const double level = levels[best];

  const UPoint base = u_zero(counts, cfg);
  UPoint u = base;
  u.in_simplex = true;
  for (double& ui : u.values) ui = std::max(ui, level);

  const auto [index, u_min] = exact_min_vertex(counts, cfg);
  (void)u_min;
  return ExtremaWitness{TVector::vertex(counts.size(), index), std::move(u), best + 1, level};
}

/// Prior parameters t reproducing a point of the shifted simplex.
inline std::vector<double> t_from_u(const Counts& counts, const IdmConfig& cfg, const UPoint& u) {
  const double n_plus_s = static_cast<double>(counts.total()) + cfg.s;
  std::vector<double> t(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    t[i] = (u[i] * n_plus_s - static_cast<double>(counts[i])) / cfg.s;
  return t;
}

/// [min, max] of sum_i f(u_i) over the shifted simplex. Refuses functionals
/// whose concavity has not been certified.
inline Interval exact_interval(const SeparableConcave& fc, const Counts& counts, const IdmConfig& cfg) {
  require(fc.concavity_certified,
          "exact_interval: concavity not certified; use the conservative or oracle bounds");
  const auto lo = exact_min_vertex(counts, cfg);
  const auto hi = exact_max_point(counts, cfg);
  const double lower = fc.evaluate(lo.u);
  const double upper = fc.evaluate(hi.u_max);
  // both points are optimal for the same F; rounding can still cross them
  return Interval(std::min(lower, upper), std::max(lower, upper), IntervalKind::exact);
}

/// Convex f: the interval of sum f is minus the interval of sum (-f).
inline Interval exact_interval_convex(const ScalarFn& f, const ScalarFn& f_prime, const Counts& counts,
                                      const IdmConfig& cfg) {
  auto negated = SeparableConcave::certified([f](double x) { return -f(x); },
                                             [f_prime](double x) { return -f_prime(x); });
  const Interval iv = exact_interval(negated, counts, cfg);
  return Interval(-iv.upper, -iv.lower, IntervalKind::exact);
}

inline Interval entropy_interval_exact(const Counts& counts, const IdmConfig& cfg) {
  return exact_interval(entropy_functional(counts, cfg), counts, cfg);
}

}  // namespace idm
