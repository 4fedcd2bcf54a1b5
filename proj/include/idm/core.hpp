#pragma once

// Count data, prior parameters and the count-to-u correspondence
// u_i = (n_i + s t_i) / (n + s) shared by every estimator in the library.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace idm {

/// Thrown for any violated precondition (bad dimensions, bad parameters).
class Error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw Error(message);
}

/// Per-category observation counts n_i.
class Counts {
public:
  Counts() = default;

  explicit Counts(std::vector<std::int64_t> values) : values_(std::move(values)) {
    require(!values_.empty(), "counts: at least one category is required");
    for (auto v : values_) require(v >= 0, "counts: entries must be nonnegative");
    total_ = std::accumulate(values_.begin(), values_.end(), std::int64_t{0});
  }

  Counts(std::initializer_list<std::int64_t> values)
      : Counts(std::vector<std::int64_t>(values)) {}

  /// d zero counts (no data).
  static Counts zeros(std::size_t d) { return Counts(std::vector<std::int64_t>(d, 0)); }

  std::size_t size() const noexcept { return values_.size(); }
  std::int64_t total() const noexcept { return total_; }
  std::int64_t operator[](std::size_t i) const { return values_[i]; }
  std::span<const std::int64_t> values() const noexcept { return values_; }

  friend bool operator==(const Counts&, const Counts&) = default;

private:
  std::vector<std::int64_t> values_;
  std::int64_t total_ = 0;
};

/// IDM hyperparameter s (total prior strength).
struct IdmConfig {
  double s = 1.0;

  explicit IdmConfig(double s_ = 1.0) : s(s_) {
    require(std::isfinite(s) && s > 0.0, "idm config: s must be positive");
  }

  /// Walley's recommended range; values outside it are legal but unusual.
  bool in_recommended_range() const noexcept { return s >= 1.0 && s <= 2.0; }
};

/// A point t of the closed probability simplex.
class TVector {
public:
  static constexpr double kSumTolerance = 1e-12;

  explicit TVector(std::vector<double> values) : values_(std::move(values)) {
    require(!values_.empty(), "t vector: empty");
    double sum = 0.0;
    for (double v : values_) {
      require(v >= 0.0 && v <= 1.0, "t vector: entries must lie in [0,1]");
      sum += v;
    }
    require(std::abs(sum - 1.0) <= kSumTolerance, "t vector: entries must sum to 1");
  }

  static TVector vertex(std::size_t d, std::size_t i) {
    require(i < d, "t vector: vertex index out of range");
    std::vector<double> v(d, 0.0);
    v[i] = 1.0;
    return TVector(std::move(v));
  }

  /// Uniform point 1/d. The sum of d copies of 1/d can miss 1 by a few ulps,
  /// so the last entry absorbs the rounding.
  static TVector center(std::size_t d) {
    require(d >= 1, "t vector: d must be positive");
    std::vector<double> v(d, 1.0 / static_cast<double>(d));
    double head = 0.0;
    for (std::size_t i = 0; i + 1 < d; ++i) head += v[i];
    v.back() = 1.0 - head;
    return TVector(std::move(v));
  }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

private:
  std::vector<double> values_;
};

/// A point u of the shifted simplex (or of its relaxation when
/// `in_simplex` is false, as for the base point u^0).
struct UPoint {
  std::vector<double> values;
  double n_plus_s = 1.0;
  double sigma = 1.0;  // s / (n + s)
  bool in_simplex = true;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double sum() const noexcept { return std::accumulate(values.begin(), values.end(), 0.0); }
};

enum class IntervalKind { exact, conservative_outer, inner_witness, oracle };

inline const char* to_string(IntervalKind kind) noexcept {
  switch (kind) {
    case IntervalKind::exact: return "exact";
    case IntervalKind::conservative_outer: return "conservative_outer";
    case IntervalKind::inner_witness: return "inner_witness";
    case IntervalKind::oracle: return "oracle";
  }
  return "unknown";
}

/// [lower, upper] tagged with the guarantee that comes with it.
struct Interval {
  static constexpr double kOrderSlack = 1e-12;

  double lower = 0.0;
  double upper = 0.0;
  IntervalKind kind = IntervalKind::exact;

  Interval() = default;
  Interval(double lo, double hi, IntervalKind k) : lower(lo), upper(hi), kind(k) {
    require(!(lo > hi + kOrderSlack), "interval: lower exceeds upper");
  }

  double width() const noexcept { return upper - lower; }
  double midpoint() const noexcept { return 0.5 * (lower + upper); }

  bool contains(double x, double slack = 0.0) const noexcept {
    return x >= lower - slack && x <= upper + slack;
  }
  bool contains(const Interval& other, double slack = 0.0) const noexcept {
    return other.lower >= lower - slack && other.upper <= upper + slack;
  }
};

inline double sigma(const Counts& counts, const IdmConfig& cfg) {
  return cfg.s / (static_cast<double>(counts.total()) + cfg.s);
}

/// u_i = (n_i + s t_i) / (n + s).
inline UPoint u_from_t(const Counts& counts, const IdmConfig& cfg, const TVector& t) {
  require(t.size() == counts.size(), "u_from_t: t and counts differ in dimension");
  const double n_plus_s = static_cast<double>(counts.total()) + cfg.s;
  UPoint u;
  u.values.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    u.values[i] = (static_cast<double>(counts[i]) + cfg.s * t[i]) / n_plus_s;
  u.n_plus_s = n_plus_s;
  u.sigma = cfg.s / n_plus_s;
  u.in_simplex = true;
  return u;
}

/// The improper base point t = 0: u^0_i = n_i / (n + s), summing to 1 - sigma.
inline UPoint u_zero(const Counts& counts, const IdmConfig& cfg) {
  const double n_plus_s = static_cast<double>(counts.total()) + cfg.s;
  UPoint u;
  u.values.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    u.values[i] = static_cast<double>(counts[i]) / n_plus_s;
  u.n_plus_s = n_plus_s;
  u.sigma = cfg.s / n_plus_s;
  u.in_simplex = false;
  return u;
}

/// u at the vertex t = e_i.
inline UPoint u_at_vertex(const Counts& counts, const IdmConfig& cfg, std::size_t i) {
  return u_from_t(counts, cfg, TVector::vertex(counts.size(), i));
}

}  // namespace idm
