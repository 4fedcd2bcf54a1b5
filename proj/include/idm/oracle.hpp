#pragma once

// Verification machinery that does not share a code path with the closed
// forms: brute-force extremization over a uniform simplex grid, and Monte
// Carlo sampling of Dirichlet posteriors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "idm/core.hpp"

namespace idm {

struct GridSpec {
  double step = 0.01;
  std::uint64_t max_points = 20'000'000;

  /// Number of grid intervals per unit; step must divide 1.
  std::uint64_t divisions() const {
    require(step > 0.0 && step <= 0.5, "grid: step must lie in (0, 0.5]");
    const double k = 1.0 / step;
    const double rounded = std::round(k);
    require(std::abs(k - rounded) <= 1e-9 * rounded, "grid: step must divide 1");
    return static_cast<std::uint64_t>(rounded);
  }
};

/// Number of compositions of k into d nonnegative parts, C(k+d-1, d-1),
/// saturating at UINT64_MAX.
inline std::uint64_t simplex_grid_size(std::uint64_t k, std::size_t d) {
  if (d <= 1) return 1;
  long double c = 1.0L;
  for (std::size_t j = 1; j < d; ++j) {
    c = c * static_cast<long double>(k + j) / static_cast<long double>(j);
    if (c > 1.8e19L) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(std::llround(c));
}

/// Calls visit(parts) for every composition of k into parts.size()
/// nonnegative integers, in lexicographic order of the leading parts.
inline void for_each_composition(std::uint64_t k, std::size_t d,
                                 const std::function<void(std::span<const std::uint64_t>)>& visit) {
  std::vector<std::uint64_t> parts(d, 0);
  if (d == 1) {
    parts[0] = k;
    visit(parts);
    return;
  }
  // odometer over the first d-1 parts; the last takes the remainder
  std::uint64_t used = 0;
  while (true) {
    parts[d - 1] = k - used;
    visit(parts);
    std::size_t pos = d - 1;
    while (pos > 0) {
      --pos;
      if (used < k) {
        ++parts[pos];
        ++used;
        break;
      }
      used -= parts[pos];
      parts[pos] = 0;
      if (pos == 0) return;
    }
  }
}

/// Min/max of F over the grid {t_i = k_i * step} of the simplex, mapped to u.
/// The d vertices are evaluated explicitly as well.
inline Interval grid_extrema(const std::function<double(const UPoint&)>& evaluate, const Counts& counts,
                             const IdmConfig& cfg, const GridSpec& grid) {
  const std::uint64_t k = grid.divisions();
  const std::size_t d = counts.size();
  require(simplex_grid_size(k, d) <= grid.max_points, "grid_extrema: grid too large");

  const double n_plus_s = static_cast<double>(counts.total()) + cfg.s;
  UPoint u;
  u.values.resize(d);
  u.n_plus_s = n_plus_s;
  u.sigma = cfg.s / n_plus_s;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  auto consider = [&](double value) {
    lo = std::min(lo, value);
    hi = std::max(hi, value);
  };

  for (std::size_t v = 0; v < d; ++v) consider(evaluate(u_at_vertex(counts, cfg, v)));

  const double kd = static_cast<double>(k);
  for_each_composition(k, d, [&](std::span<const std::uint64_t> parts) {
    for (std::size_t i = 0; i < d; ++i)
      u.values[i] = (static_cast<double>(counts[i]) + cfg.s * (static_cast<double>(parts[i]) / kd)) / n_plus_s;
    consider(evaluate(u));
  });
  return Interval(lo, hi, IntervalKind::oracle);
}

// ---------------------------------------------------------------------------
// Random variates. Everything is built on raw mt19937_64 output so streams
// are reproducible bit for bit given the seed.

using Rng = std::mt19937_64;

/// Uniform on the open interval (0, 1).
inline double uniform_open(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal pair by the Marsaglia polar method.
class NormalSource {
public:
  double operator()(Rng& rng) {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double x, y, r2;
    do {
      x = 2.0 * uniform_open(rng) - 1.0;
      y = 2.0 * uniform_open(rng) - 1.0;
      r2 = x * x + y * y;
    } while (r2 >= 1.0 || r2 == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(r2) / r2);
    spare_ = y * scale;
    has_spare_ = true;
    return x * scale;
  }

private:
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// log of a Gamma(shape, 1) variate. Marsaglia-Tsang squeeze/rejection for
/// shape >= 1; for shape < 1 a Gamma(shape + 1) draw times U^(1/shape),
/// kept in log space so tiny shapes do not underflow.
inline double log_gamma_variate(double shape, Rng& rng, NormalSource& normal) {
  if (shape < 1.0) {
    const double boosted = log_gamma_variate(shape + 1.0, rng, normal);
    return boosted + std::log(uniform_open(rng)) / shape;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open(rng);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d * v);
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return std::log(d * v);
  }
}

class DirichletSampler {
public:
  explicit DirichletSampler(std::vector<double> alpha) : alpha_(std::move(alpha)), logs_(alpha_.size()) {
    require(!alpha_.empty(), "dirichlet: empty parameter vector");
    for (double a : alpha_) require(a > 0.0 && std::isfinite(a), "dirichlet: parameters must be positive");
  }

  std::size_t size() const noexcept { return alpha_.size(); }

  /// Normalized independent Gamma(alpha_i, 1) draws.
  void draw(Rng& rng, std::span<double> out) {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < alpha_.size(); ++i) {
      logs_[i] = log_gamma_variate(alpha_[i], rng, normal_);
      top = std::max(top, logs_[i]);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < alpha_.size(); ++i) sum += (out[i] = std::exp(logs_[i] - top));
    for (std::size_t i = 0; i < alpha_.size(); ++i) out[i] /= sum;
  }

private:
  std::vector<double> alpha_;
  std::vector<double> logs_;
  NormalSource normal_;
};

inline std::vector<double> dirichlet_sample(const std::vector<double>& alpha, Rng& rng) {
  DirichletSampler sampler(alpha);
  std::vector<double> out(alpha.size());
  sampler.draw(rng, out);
  return out;
}

/// Parameters below this are clamped when t sits on the simplex boundary
/// next to an empty category.
inline constexpr double kMinDirichletParameter = 1e-9;

/// Posterior Dirichlet parameters n_i + s t_i.
inline std::vector<double> posterior_parameters(const Counts& counts, const IdmConfig& cfg, const TVector& t) {
  require(t.size() == counts.size(), "posterior parameters: dimension mismatch");
  std::vector<double> alpha(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    alpha[i] = std::max(static_cast<double>(counts[i]) + cfg.s * t[i], kMinDirichletParameter);
  return alpha;
}

/// splitmix64: decorrelated per-task seeds from one master seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct McSpec {
  std::uint64_t n_samples = 100'000;
  std::uint64_t seed = 0;

  McSpec(std::uint64_t n, std::uint64_t s) : n_samples(n), seed(s) {
    require(n_samples >= 100, "mc spec: at least 100 samples are required");
  }
};

struct McResult {
  double mean = 0.0;
  double stddev = 0.0;
  double std_error = 0.0;
  std::vector<double> sorted_samples;
};

using ChanceStatistic = std::function<double(std::span<const double>)>;

/// Samples pi ~ Dirichlet(n + s t) and summarizes stat(pi).
inline McResult mc_functional(const ChanceStatistic& stat, const Counts& counts, const IdmConfig& cfg,
                              const TVector& t, const McSpec& mc) {
  DirichletSampler sampler(posterior_parameters(counts, cfg, t));
  Rng rng(mc.seed);
  std::vector<double> pi(counts.size());
  McResult out;
  out.sorted_samples.resize(mc.n_samples);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t k = 0; k < mc.n_samples; ++k) {
    sampler.draw(rng, pi);
    const double x = stat(pi);
    out.sorted_samples[k] = x;
    const double delta = x - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (x - mean);
  }
  std::sort(out.sorted_samples.begin(), out.sorted_samples.end());
  const double n = static_cast<double>(mc.n_samples);
  out.mean = mean;
  out.stddev = std::sqrt(m2 / (n - 1.0));
  out.std_error = out.stddev / std::sqrt(n);
  return out;
}

/// Plug-in entropy -sum pi log pi (natural log, 0 log 0 = 0).
inline double plugin_entropy(std::span<const double> pi) {
  double sum = 0.0;
  for (double p : pi)
    if (p > 0.0) sum -= p * std::log(p);
  return sum;
}

/// Statistic returning the i-th chance.
inline ChanceStatistic component_statistic(std::size_t i) {
  return [i](std::span<const double> pi) { return pi[i]; };
}

}  // namespace idm
