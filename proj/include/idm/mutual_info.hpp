#pragma once

// Expected mutual information of a d1 x d2 contingency table under the IDM:
// I(u) = H(row marginals) + H(column marginals) - H(joint), each H a sum of
// h terms with the same N = n + s. Tables are flattened row-major so the
// flat-vector machinery applies unchanged.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "idm/conservative.hpp"
#include "idm/core.hpp"
#include "idm/exact_concave.hpp"
#include "idm/oracle.hpp"
#include "idm/specialfn.hpp"

namespace idm {

struct TableDims {
  std::size_t rows = 1;
  std::size_t cols = 1;

  std::size_t cells() const noexcept { return rows * cols; }
  friend bool operator==(const TableDims&, const TableDims&) = default;
};

class JointCounts {
public:
  explicit JointCounts(const std::vector<std::vector<std::int64_t>>& table) {
    require(!table.empty() && !table.front().empty(), "joint counts: empty table");
    dims_ = {table.size(), table.front().size()};
    std::vector<std::int64_t> flat;
    flat.reserve(dims_.cells());
    for (const auto& row : table) {
      require(row.size() == dims_.cols, "joint counts: ragged table");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    init(Counts(std::move(flat)));
  }

  JointCounts(std::initializer_list<std::initializer_list<std::int64_t>> table)
      : JointCounts(std::vector<std::vector<std::int64_t>>(table.begin(), table.end())) {}

  JointCounts(TableDims dims, Counts flat) : dims_(dims) {
    require(dims.rows >= 1 && dims.cols >= 1 && flat.size() == dims.cells(),
            "joint counts: flat counts do not match the table shape");
    init(std::move(flat));
  }

  TableDims dims() const noexcept { return dims_; }
  std::int64_t at(std::size_t i, std::size_t j) const { return flat_[i * dims_.cols + j]; }
  std::int64_t total() const noexcept { return flat_.total(); }
  const Counts& flat() const noexcept { return flat_; }
  const Counts& row_marginals() const noexcept { return rows_; }
  const Counts& col_marginals() const noexcept { return cols_; }

private:
  void init(Counts flat) {
    flat_ = std::move(flat);
    std::vector<std::int64_t> r(dims_.rows, 0), c(dims_.cols, 0);
    for (std::size_t i = 0; i < dims_.rows; ++i)
      for (std::size_t j = 0; j < dims_.cols; ++j) {
        r[i] += flat_[i * dims_.cols + j];
        c[j] += flat_[i * dims_.cols + j];
      }
    rows_ = Counts(std::move(r));
    cols_ = Counts(std::move(c));
  }

  TableDims dims_;
  Counts flat_;
  Counts rows_;
  Counts cols_;
};

/// Row and column marginals of a flattened table point.
inline std::pair<std::vector<double>, std::vector<double>> marginals(std::span<const double> cells, TableDims dims) {
  std::vector<double> r(dims.rows, 0.0), c(dims.cols, 0.0);
  for (std::size_t i = 0; i < dims.rows; ++i)
    for (std::size_t j = 0; j < dims.cols; ++j) {
      r[i] += cells[i * dims.cols + j];
      c[j] += cells[i * dims.cols + j];
    }
  return {std::move(r), std::move(c)};
}

/// sum_i h(u_{i+}) + sum_j h(u_{+j}) - sum_ij h(u_ij), all with N = u.n_plus_s.
inline double expected_mi(const UPoint& u, TableDims dims) {
  require(u.size() == dims.cells(), "expected_mi: point does not match the table shape");
  const EntropyContext ctx(u.n_plus_s);
  auto [r, c] = marginals(u.values, dims);
  // marginal sums miss 1 by a few ulps on the simplex; snap them so h(1) = 0
  const double tol = 4 * std::numeric_limits<double>::epsilon() * static_cast<double>(u.size());
  auto clamp = [tol](double x) { return x >= 1.0 - tol ? 1.0 : x; };
  // with one row (column) the other margin coincides with the cells, so pair
  // those terms to cancel exactly
  if (dims.rows == 1 || dims.cols == 1) {
    const auto& same = dims.rows == 1 ? r : c;
    const auto& other = dims.rows == 1 ? c : r;
    double total = h(clamp(same[0]), ctx);
    for (std::size_t k = 0; k < other.size(); ++k) total += h(clamp(other[k]), ctx) - h(clamp(u.values[k]), ctx);
    return total;
  }
  double total = 0.0;
  for (double x : r) total += h(clamp(x), ctx);
  for (double x : c) total += h(clamp(x), ctx);
  for (double x : u.values) total -= h(clamp(x), ctx);
  return total;
}

/// Plug-in mutual information of a chance table, summed cell by cell as
/// sum pi_ij log(pi_ij / (pi_i+ pi_+j)).
inline double plugin_mutual_information(std::span<const double> pi, TableDims dims) {
  auto [r, c] = marginals(pi, dims);
  double total = 0.0;
  for (std::size_t i = 0; i < dims.rows; ++i)
    for (std::size_t j = 0; j < dims.cols; ++j) {
      const double p = pi[i * dims.cols + j];
      if (p > 0.0) total += p * std::log(p / (r[i] * c[j]));
    }
  return total;
}

/// Bounds from the exact entropy intervals of the three terms, each taken
/// independently. Valid, but blind to the coupling between the terms.
inline Interval mi_crude_interval(const JointCounts& jc, const IdmConfig& cfg) {
  // marginals carry the total n of the table, so N = n + s agrees across all three
  const Interval row = entropy_interval_exact(jc.row_marginals(), cfg);
  const Interval col = entropy_interval_exact(jc.col_marginals(), cfg);
  const Interval joint = entropy_interval_exact(jc.flat(), cfg);
  return Interval(row.lower + col.lower - joint.upper, row.upper + col.upper - joint.lower,
                  IntervalKind::conservative_outer);
}

/// Residues of I over the table cells: each cell's partial derivative is
/// h'(u_{i+}) + h'(u_{+j}) - h'(u_ij), bounded termwise over the enclosing box
/// using that h' is decreasing.
inline ResidueBundle mi_residues(const JointCounts& jc, const IdmConfig& cfg) {
  const TableDims dims = jc.dims();
  const UPoint u0 = u_zero(jc.flat(), cfg);
  const double sg = u0.sigma;
  const EntropyContext ctx(u0.n_plus_s);
  auto [r0, c0] = marginals(u0.values, dims);
  auto hp = [&](double x) { return h_prime(std::min(x, 1.0), ctx); };

  std::vector<double> ub(dims.cells()), lb(dims.cells());
  for (std::size_t i = 0; i < dims.rows; ++i)
    for (std::size_t j = 0; j < dims.cols; ++j) {
      const std::size_t ij = i * dims.cols + j;
      ub[ij] = sg * (hp(r0[i]) + hp(c0[j]) - hp(u0[ij] + sg));
      lb[ij] = sg * (hp(r0[i] + sg) + hp(c0[j] + sg) - hp(u0[ij]));
    }
  return ResidueBundle(expected_mi(u0, dims), std::move(ub), std::move(lb),
                       IndexSpace::grid(dims.rows, dims.cols));
}

inline Sandwich mi_sandwich(const JointCounts& jc, const IdmConfig& cfg) {
  const TableDims dims = jc.dims();
  return sandwich(mi_residues(jc, cfg), [dims](const UPoint& u) { return expected_mi(u, dims); }, jc.flat(), cfg);
}

/// t = row_t (outer) col_t, a point of the product-space prior set.
struct TensorT {
  TVector row_t;
  TVector col_t;

  std::vector<double> outer() const {
    std::vector<double> t(row_t.size() * col_t.size());
    for (std::size_t i = 0; i < row_t.size(); ++i)
      for (std::size_t j = 0; j < col_t.size(); ++j) t[i * col_t.size() + j] = row_t[i] * col_t[j];
    return t;
  }
};

/// Every vertex of the full simplex factorizes as e_i (outer) e_j, so the
/// witness vertices of the sandwich are feasible for the product-space model.
inline TensorT tensor_vertex_check(const JointCounts& jc, std::size_t row, std::size_t col) {
  const TableDims dims = jc.dims();
  require(row < dims.rows && col < dims.cols, "tensor_vertex_check: cell outside the table");
  return TensorT{TVector::vertex(dims.rows, row), TVector::vertex(dims.cols, col)};
}

inline TensorT tensor_vertex_check(const JointCounts& jc, std::size_t flat_cell) {
  require(flat_cell < jc.dims().cells(), "tensor_vertex_check: cell outside the table");
  return tensor_vertex_check(jc, flat_cell / jc.dims().cols, flat_cell % jc.dims().cols);
}

/// Grid extremization of expected MI over t = a (outer) b, with a and b each
/// on a uniform simplex grid of the given step.
inline Interval tensor_oracle_interval(const JointCounts& jc, const IdmConfig& cfg, double grid_step,
                                       std::uint64_t max_points = 20'000'000) {
  const GridSpec grid{grid_step, max_points};
  const std::uint64_t k = grid.divisions();
  const TableDims dims = jc.dims();
  const std::uint64_t na = simplex_grid_size(k, dims.rows);
  const std::uint64_t nb = simplex_grid_size(k, dims.cols);
  require(na <= max_points && nb <= max_points && na * nb <= max_points,
          "tensor_oracle_interval: grid too large");

  std::vector<std::vector<double>> row_points, col_points;
  const double kd = static_cast<double>(k);
  for_each_composition(k, dims.rows, [&](std::span<const std::uint64_t> p) {
    std::vector<double> a(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) a[i] = static_cast<double>(p[i]) / kd;
    row_points.push_back(std::move(a));
  });
  for_each_composition(k, dims.cols, [&](std::span<const std::uint64_t> p) {
    std::vector<double> b(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) b[j] = static_cast<double>(p[j]) / kd;
    col_points.push_back(std::move(b));
  });

  const Counts& flat = jc.flat();
  const double n_plus_s = static_cast<double>(flat.total()) + cfg.s;
  UPoint u;
  u.values.resize(dims.cells());
  u.n_plus_s = n_plus_s;
  u.sigma = cfg.s / n_plus_s;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& a : row_points)
    for (const auto& b : col_points) {
      for (std::size_t i = 0; i < dims.rows; ++i)
        for (std::size_t j = 0; j < dims.cols; ++j) {
          const std::size_t ij = i * dims.cols + j;
          u.values[ij] = (static_cast<double>(flat[ij]) + cfg.s * a[i] * b[j]) / n_plus_s;
        }
      const double value = expected_mi(u, dims);
      lo = std::min(lo, value);
      hi = std::max(hi, value);
    }
  return Interval(lo, hi, IntervalKind::oracle);
}

/// Grid extremization of expected MI over the full simplex of table cells.
inline Interval mi_full_oracle_interval(const JointCounts& jc, const IdmConfig& cfg, const GridSpec& grid) {
  const TableDims dims = jc.dims();
  return grid_extrema([dims](const UPoint& u) { return expected_mi(u, dims); }, jc.flat(), cfg, grid);
}

inline ChanceStatistic mi_statistic(TableDims dims) {
  return [dims](std::span<const double> pi) { return plugin_mutual_information(pi, dims); };
}

}  // namespace idm
