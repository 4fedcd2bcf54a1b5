#pragma once

// Robust credible intervals: intervals holding probability >= alpha under
// every posterior of the prior set. Per-prior intervals come from Monte
// Carlo samples; the union over a finite set of priors is conservative for
// those priors. The mean-plus-kappa-sigma variant trades the guarantee for
// a Gaussian width at one reference prior.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "idm/core.hpp"
#include "idm/oracle.hpp"
#include "idm/specialfn.hpp"

namespace idm {

enum class CredibleMode { two_sided_shortest, one_sided_lower, one_sided_upper };

inline const char* to_string(CredibleMode mode) noexcept {
  switch (mode) {
    case CredibleMode::two_sided_shortest: return "two_sided_shortest";
    case CredibleMode::one_sided_lower: return "one_sided_lower";
    case CredibleMode::one_sided_upper: return "one_sided_upper";
  }
  return "unknown";
}

struct CredibleSpec {
  double alpha = 0.95;
  CredibleMode mode = CredibleMode::two_sided_shortest;
  bool gaussian_approx = false;

  CredibleSpec(double alpha_, CredibleMode mode_ = CredibleMode::two_sided_shortest, bool gaussian = false)
      : alpha(alpha_), mode(mode_), gaussian_approx(gaussian) {
    require(alpha > 0.0 && alpha < 1.0, "credible spec: alpha must lie in (0,1)");
  }
};

enum class MethodNote { union_of_vertices, mean_plus_kappa_sigma };

inline const char* to_string(MethodNote note) noexcept {
  return note == MethodNote::union_of_vertices ? "union_of_vertices" : "mean_plus_kappa_sigma";
}

struct VertexDetail {
  std::size_t t_index = 0;  // position in the t set
  double mean = 0.0;
  double half_width_upper = 0.0;  // upper end - mean
  double half_width_lower = 0.0;  // mean - lower end
  double stddev = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct RobustCredibleResult {
  Interval interval;  // conservative_outer
  std::vector<VertexDetail> per_vertex_details;
  MethodNote method_note = MethodNote::union_of_vertices;
  double kappa = 0.0;  // set for mean_plus_kappa_sigma
};

struct SampleInterval {
  double lower;
  double upper;
};

inline std::size_t credible_window(std::size_t m, double alpha) {
  // the epsilon keeps e.g. 0.9 * 1000 from rounding up to 901
  return static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(m) - 1e-9));
}

/// Narrowest window of ceil(alpha m) consecutive sorted samples; the
/// leftmost one on ties.
inline SampleInterval shortest_interval_from_samples(std::span<const double> sorted, double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "shortest interval: alpha must lie in (0,1)");
  require(sorted.size() >= 100, "shortest interval: at least 100 samples are required");
  const std::size_t k = std::max<std::size_t>(1, credible_window(sorted.size(), alpha));
  std::size_t best = 0;
  double best_width = sorted[k - 1] - sorted[0];
  for (std::size_t i = 1; i + k <= sorted.size(); ++i) {
    const double w = sorted[i + k - 1] - sorted[i];
    if (w < best_width) {
      best_width = w;
      best = i;
    }
  }
  return {sorted[best], sorted[best + k - 1]};
}

/// Largest a with at least ceil(alpha m) samples in [a, inf).
inline double one_sided_lower_bound(std::span<const double> sorted, double alpha) {
  require(!sorted.empty(), "one-sided bound: no samples");
  const std::size_t k = std::max<std::size_t>(1, credible_window(sorted.size(), alpha));
  return sorted[sorted.size() - k];
}

/// Smallest b with at least ceil(alpha m) samples in (-inf, b].
inline double one_sided_upper_bound(std::span<const double> sorted, double alpha) {
  require(!sorted.empty(), "one-sided bound: no samples");
  const std::size_t k = std::max<std::size_t>(1, credible_window(sorted.size(), alpha));
  return sorted[k - 1];
}

/// Default prior set: the d vertices followed by the center.
inline std::vector<TVector> default_t_set(std::size_t d) {
  std::vector<TVector> set;
  for (std::size_t i = 0; i < d; ++i) set.push_back(TVector::vertex(d, i));
  if (d > 1) set.push_back(TVector::center(d));
  return set;
}

/// Union hull of per-prior credible intervals. Prior k is sampled with
/// derive_seed(mc.seed, k).
inline RobustCredibleResult robust_credible_union(const ChanceStatistic& stat, const Counts& counts,
                                                  const IdmConfig& cfg, const CredibleSpec& spec,
                                                  const McSpec& mc, std::span<const TVector> t_set) {
  require(!t_set.empty(), "robust credible union: empty t set");
  constexpr double inf = std::numeric_limits<double>::infinity();
  RobustCredibleResult out;
  out.method_note = MethodNote::union_of_vertices;
  double lo = inf;
  double hi = -inf;
  for (std::size_t k = 0; k < t_set.size(); ++k) {
    const McResult r = mc_functional(stat, counts, cfg, t_set[k], McSpec(mc.n_samples, derive_seed(mc.seed, k)));
    VertexDetail detail;
    detail.t_index = k;
    detail.mean = r.mean;
    detail.stddev = r.stddev;
    switch (spec.mode) {
      case CredibleMode::two_sided_shortest: {
        const auto iv = shortest_interval_from_samples(r.sorted_samples, spec.alpha);
        detail.lower = iv.lower;
        detail.upper = iv.upper;
        break;
      }
      case CredibleMode::one_sided_lower:
        detail.lower = one_sided_lower_bound(r.sorted_samples, spec.alpha);
        detail.upper = inf;
        break;
      case CredibleMode::one_sided_upper:
        detail.lower = -inf;
        detail.upper = one_sided_upper_bound(r.sorted_samples, spec.alpha);
        break;
    }
    detail.half_width_upper = detail.upper - detail.mean;
    detail.half_width_lower = detail.mean - detail.lower;
    lo = std::min(lo, detail.lower);
    hi = std::max(hi, detail.upper);
    out.per_vertex_details.push_back(detail);
  }
  out.interval = Interval(lo, hi, IntervalKind::conservative_outer);
  return out;
}

inline RobustCredibleResult robust_credible_union(const ChanceStatistic& stat, const Counts& counts,
                                                  const IdmConfig& cfg, const CredibleSpec& spec,
                                                  const McSpec& mc) {
  const auto t_set = default_t_set(counts.size());
  return robust_credible_union(stat, counts, cfg, spec, mc, t_set);
}

/// [lower - kappa sigma*, upper + kappa sigma*]. Only conservative up to the
/// variation of the posterior spread with t, and only as far as the
/// posterior is Gaussian.
inline RobustCredibleResult mean_plus_kappa_sigma(const Interval& robust_mean, double sigma_star, double alpha) {
  require(sigma_star >= 0.0, "mean_plus_kappa_sigma: sigma_star must be nonnegative");
  const double kappa = kappa_from_alpha(alpha);
  RobustCredibleResult out;
  out.interval = Interval(robust_mean.lower - kappa * sigma_star, robust_mean.upper + kappa * sigma_star,
                          IntervalKind::conservative_outer);
  out.method_note = MethodNote::mean_plus_kappa_sigma;
  out.kappa = kappa;
  return out;
}

/// Fraction of sorted samples inside [lower, upper].
inline double empirical_coverage(std::span<const double> sorted, double lower, double upper) {
  const auto first = std::lower_bound(sorted.begin(), sorted.end(), lower);
  const auto last = std::upper_bound(sorted.begin(), sorted.end(), upper);
  return static_cast<double>(std::distance(first, last)) / static_cast<double>(sorted.size());
}

}  // namespace idm
