#pragma once

// Conservative outer bounds and inner witnesses for differentiable
// estimators, from a first-order expansion around the improper base point
// u^0 (t = 0). A bound is carried as F(u^0) plus per-index residues
// sigma * [min, max] of dF/du_i over the relaxed simplex; residues, not
// their max/min, are what propagate through sums and products.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "idm/core.hpp"
#include "idm/exact_concave.hpp"

namespace idm {

/// Shape of the residue index set: a flat vector of d categories, or a
/// rows x cols table flattened row-major.
struct IndexSpace {
  std::size_t rows = 1;
  std::size_t cols = 1;
  bool is_grid = false;

  static IndexSpace flat(std::size_t d) { return {1, d, false}; }
  static IndexSpace grid(std::size_t rows, std::size_t cols) { return {rows, cols, true}; }

  std::size_t size() const noexcept { return rows * cols; }
  friend bool operator==(const IndexSpace&, const IndexSpace&) = default;
};

struct ResidueBundle {
  double f0 = 0.0;
  std::vector<double> resid_ub;
  std::vector<double> resid_lb;
  IndexSpace index_space;

  static constexpr double kOrderSlack = 1e-12;

  ResidueBundle() = default;
  ResidueBundle(double f0_, std::vector<double> ub, std::vector<double> lb, IndexSpace space)
      : f0(f0_), resid_ub(std::move(ub)), resid_lb(std::move(lb)), index_space(space) {
    require(resid_ub.size() == index_space.size() && resid_lb.size() == index_space.size(),
            "residue bundle: residue vectors do not match the index space");
    for (std::size_t i = 0; i < resid_ub.size(); ++i)
      require(!(resid_lb[i] > resid_ub[i] + kOrderSlack), "residue bundle: lower residue exceeds upper");
  }

  std::size_t size() const noexcept { return resid_ub.size(); }
  double max_ub() const { return *std::max_element(resid_ub.begin(), resid_ub.end()); }
  double min_lb() const { return *std::min_element(resid_lb.begin(), resid_lb.end()); }
};

struct Sandwich {
  Interval outer;           // conservative_outer
  double inner_low = 0.0;   // F at vertex i2: an upper bound on the true minimum
  double inner_high = 0.0;  // F at vertex i1: a lower bound on the true maximum
  std::size_t witness_hi = 0;
  std::size_t witness_lo = 0;

  Interval inner() const {
    return Interval(std::min(inner_low, inner_high), std::max(inner_low, inner_high),
                    IntervalKind::inner_witness);
  }
};

/// Concave separable F: f' is decreasing, so over u_i in [u^0_i, u^0_i + sigma]
/// the derivative range is [f'(u^0_i + sigma), f'(u^0_i)].
inline ResidueBundle residues_concave(const SeparableConcave& fc, const Counts& counts, const IdmConfig& cfg) {
  require(fc.concavity_certified, "residues_concave: concavity not certified");
  const UPoint u0 = u_zero(counts, cfg);
  const double sg = u0.sigma;
  std::vector<double> ub(counts.size()), lb(counts.size());
  double f0 = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    f0 += fc.f(u0[i]);
    ub[i] = sg * fc.f_prime(u0[i]);
    lb[i] = sg * fc.f_prime(std::min(1.0, u0[i] + sg));
  }
  return ResidueBundle(f0, std::move(ub), std::move(lb), IndexSpace::flat(counts.size()));
}

inline ResidueBundle entropy_residues(const Counts& counts, const IdmConfig& cfg) {
  return residues_concave(entropy_functional(counts, cfg), counts, cfg);
}

/// Closed range of a partial derivative.
struct DerivativeRange {
  double lower;
  double upper;
};

/// Per-coordinate box [u^0_i, u^0_i + sigma], which encloses the relaxed simplex.
inline std::vector<DerivativeRange> enclosing_box(const Counts& counts, const IdmConfig& cfg) {
  const UPoint u0 = u_zero(counts, cfg);
  std::vector<DerivativeRange> box(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) box[i] = {u0[i], std::min(1.0, u0[i] + u0.sigma)};
  return box;
}

/// Residues from caller-supplied bounds on dF/du_i over the enclosing box.
/// f0 = F(u^0) must be supplied separately since only derivatives are given.
/// Pass a grid index space for table-shaped estimators; flat is the default.
inline ResidueBundle residues_box(std::span<const DerivativeRange> partial_bounds, double f0,
                                  const Counts& counts, const IdmConfig& cfg,
                                  IndexSpace space = IndexSpace{}) {
  if (!space.is_grid) space = IndexSpace::flat(counts.size());
  require(space.size() == counts.size(), "residues_box: index space does not match counts");
  require(partial_bounds.size() == counts.size(), "residues_box: one derivative range per index is required");
  const double sg = sigma(counts, cfg);
  std::vector<double> ub(counts.size()), lb(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    require(partial_bounds[i].lower <= partial_bounds[i].upper,
            "residues_box: derivative lower bound exceeds upper bound");
    ub[i] = sg * partial_bounds[i].upper;
    lb[i] = sg * partial_bounds[i].lower;
  }
  return ResidueBundle(f0, std::move(ub), std::move(lb), space);
}

/// Bundle of the linear functional F(u) = sum_i a_i u_i (exact residues sigma a_i).
inline ResidueBundle linear_bundle(std::span<const double> coeffs, const Counts& counts, const IdmConfig& cfg) {
  require(coeffs.size() == counts.size(), "linear_bundle: dimension mismatch");
  const UPoint u0 = u_zero(counts, cfg);
  double f0 = 0.0;
  std::vector<double> r(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    f0 += coeffs[i] * u0[i];
    r[i] = u0.sigma * coeffs[i];
  }
  return ResidueBundle(f0, r, r, IndexSpace::flat(coeffs.size()));
}

using UFunctional = std::function<double(const UPoint&)>;

inline std::size_t argmax_first(std::span<const double> v) {
  return static_cast<std::size_t>(std::distance(v.begin(), std::max_element(v.begin(), v.end())));
}
inline std::size_t argmin_first(std::span<const double> v) {
  return static_cast<std::size_t>(std::distance(v.begin(), std::min_element(v.begin(), v.end())));
}

/// Outer interval [F0 + min_i lb_i, F0 + max_i ub_i] together with F evaluated
/// at the vertices selected by the largest upper / smallest lower residue.
inline Sandwich sandwich(const ResidueBundle& fb, const UFunctional& evaluate, const Counts& counts,
                         const IdmConfig& cfg) {
  require(fb.index_space.size() == counts.size(), "sandwich: residue bundle does not match counts");
  Sandwich out;
  if (counts.size() == 1) {
    // u = 1 is the only feasible point; the relaxed set [u0, 1] would not collapse
    const double v = evaluate(u_at_vertex(counts, cfg, 0));
    out.outer = Interval(v, v, IntervalKind::conservative_outer);
    out.inner_low = out.inner_high = v;
    return out;
  }
  out.witness_hi = argmax_first(fb.resid_ub);
  out.witness_lo = argmin_first(fb.resid_lb);
  out.outer = Interval(fb.f0 + fb.resid_lb[out.witness_lo], fb.f0 + fb.resid_ub[out.witness_hi],
                       IntervalKind::conservative_outer);
  out.inner_high = evaluate(u_at_vertex(counts, cfg, out.witness_hi));
  out.inner_low = evaluate(u_at_vertex(counts, cfg, out.witness_lo));
  return out;
}

/// Bundle of -F: residues swap roles and change sign.
inline ResidueBundle negate(const ResidueBundle& b) {
  std::vector<double> ub(b.size()), lb(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    ub[i] = -b.resid_lb[i];
    lb[i] = -b.resid_ub[i];
  }
  return ResidueBundle(-b.f0, std::move(ub), std::move(lb), b.index_space);
}

/// alpha G + beta H with alpha, beta >= 0, propagated index by index.
inline ResidueBundle combine_sum(const ResidueBundle& g, const ResidueBundle& h, double alpha = 1.0,
                                 double beta = 1.0) {
  require(alpha >= 0.0 && beta >= 0.0, "combine_sum: coefficients must be nonnegative (use negate)");
  require(g.index_space == h.index_space, "combine_sum: index spaces differ");
  std::vector<double> ub(g.size()), lb(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    ub[i] = alpha * g.resid_ub[i] + beta * h.resid_ub[i];
    lb[i] = alpha * g.resid_lb[i] + beta * h.resid_lb[i];
  }
  return ResidueBundle(alpha * g.f0 + beta * h.f0, std::move(ub), std::move(lb), g.index_space);
}

/// Caller's assertion that both factors are nonnegative with nonnegative
/// partial derivatives on the relaxed simplex.
struct NonnegativeFactors {
  bool g_nonnegative_increasing = false;
  bool h_nonnegative_increasing = false;
};

/// G * H for nonnegative, coordinatewise nondecreasing G and H. The maxima
/// of G, H over the relaxed simplex (t_+ <= 1) are bounded with the total
/// residue clamped at 0, since t = 0 is admissible there.
inline ResidueBundle combine_product(const ResidueBundle& g, const ResidueBundle& h, NonnegativeFactors cert) {
  require(cert.g_nonnegative_increasing && cert.h_nonnegative_increasing,
          "combine_product: both factors must be certified nonnegative with nonnegative partials");
  require(g.index_space == h.index_space, "combine_product: index spaces differ");
  const double g_hi = g.f0 + std::max(0.0, g.max_ub());
  const double h_hi = h.f0 + std::max(0.0, h.max_ub());
  const double g_lo = g.f0 + std::min(0.0, g.min_lb());
  const double h_lo = h.f0 + std::min(0.0, h.min_lb());
  std::vector<double> ub(g.size()), lb(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    ub[i] = g.resid_ub[i] * h_hi + g_hi * h.resid_ub[i];
    lb[i] = g.resid_lb[i] * h_lo + g_lo * h.resid_lb[i];
  }
  return ResidueBundle(g.f0 * h.f0, std::move(ub), std::move(lb), g.index_space);
}

/// Empirical check that a bundle's residues enclose sigma * dF/du_i on
/// random points of the relaxed simplex {u >= u^0, u_+ <= 1}. Returns the
/// largest violation found (0 when the residues hold everywhere sampled).
inline double residue_violation(const ResidueBundle& b,
                                const std::function<double(const UPoint&, std::size_t)>& partial,
                                const Counts& counts, const IdmConfig& cfg, int samples,
                                std::uint64_t seed) {
  require(b.size() == counts.size(), "residue_violation: dimension mismatch");
  const UPoint u0 = u_zero(counts, cfg);
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  double worst = 0.0;
  const std::size_t d = counts.size();
  for (int k = 0; k < samples; ++k) {
    // uniform point of the d+1 simplex; the extra slot is the slack 1 - t_+
    std::vector<double> e(d + 1);
    double sum = 0.0;
    for (double& x : e) sum += (x = expo(rng));
    UPoint u = u0;
    for (std::size_t i = 0; i < d; ++i) u.values[i] += u0.sigma * e[i] / sum;
    for (std::size_t i = 0; i < d; ++i) {
      const double r = u0.sigma * partial(u, i);
      worst = std::max({worst, r - b.resid_ub[i], b.resid_lb[i] - r});
    }
  }
  return worst;
}

}  // namespace idm
