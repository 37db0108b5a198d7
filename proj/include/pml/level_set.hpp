#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pml/common.hpp"
#include "pml/grid.hpp"
#include "pml/linalg.hpp"
#include "pml/profile.hpp"

namespace pml {

/// An l x (k+1) nonnegative matrix whose row i represents the probability
/// level levels[i] and whose column j >= 1 represents the j-th distinct
/// frequency of a profile. Column 0 carries unseen elements.
struct LevelSetMatrix {
  Matrix entries;
  std::vector<double> levels;

  std::size_t rows() const { return entries.rows(); }
  std::size_t cols() const { return entries.cols(); }
};

/// Per-instance constants of the objective: coefficients c_ij = m_j * log r_i
/// (with the column-0 frequency fixed at 0), the probability levels, the
/// profile column targets, and the gradient clamp.
struct ObjectiveContext {
  Matrix coeff;                        // l x (k+1)
  std::vector<double> levels;          // r_i, size l
  std::vector<std::uint64_t> freqs;    // m_j per column, freqs[0] = 0
  std::vector<std::uint64_t> targets;  // phi_j per column, targets[0] = 0 (unconstrained)
  double clamp_delta = 1e-12;

  static ObjectiveContext make(const Profile& profile, const std::vector<double>& levels) {
    ObjectiveContext ctx;
    ctx.levels = levels;
    const std::size_t k = profile.distinct_count();
    ctx.freqs.assign(k + 1, 0);
    ctx.targets.assign(k + 1, 0);
    for (std::size_t j = 0; j < k; ++j) {
      ctx.freqs[j + 1] = profile.entries()[j].frequency;
      ctx.targets[j + 1] = profile.entries()[j].count;
    }
    ctx.coeff = Matrix(levels.size(), k + 1, 0.0);
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (!(levels[i] > 0.0 && levels[i] <= 1.0 + 1e-12))
        throw std::invalid_argument("ObjectiveContext: levels must lie in (0,1]");
      const double logr = std::log(levels[i]);
      for (std::size_t j = 1; j <= k; ++j)
        ctx.coeff(i, j) = static_cast<double>(ctx.freqs[j]) * logr;
    }
    return ctx;
  }
};

/// log g(S) = sum_ij [c_ij x_ij - x_ij log x_ij] + sum_i [X1]_i log [X1]_i,
/// with 0 log 0 = 0.
inline double log_g(const Matrix& s, const ObjectiveContext& ctx) {
  if (s.rows() != ctx.levels.size() || s.cols() != ctx.freqs.size())
    throw std::invalid_argument("log_g: shape mismatch");
  double v = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) {
    double rowsum = 0.0;
    for (std::size_t j = 0; j < s.cols(); ++j) {
      const double x = s(i, j);
      if (!(x >= 0.0) || !std::isfinite(x))
        throw std::invalid_argument("log_g: negative or non-finite entry");
      rowsum += x;
      v += ctx.coeff(i, j) * x - xlogx(x);
    }
    v += xlogx(rowsum);
  }
  return v;
}

inline double log_g(const LevelSetMatrix& s, const ObjectiveContext& ctx) {
  return log_g(s.entries, ctx);
}

/// The i-th row contribution of f = -log g; 1-homogeneous in the row values.
inline double row_neg_log_g(const Matrix& s, const ObjectiveContext& ctx, std::size_t i) {
  double v = 0.0;
  double rowsum = 0.0;
  for (std::size_t j = 0; j < s.cols(); ++j) {
    const double x = s(i, j);
    rowsum += x;
    v += -ctx.coeff(i, j) * x + xlogx(x);
  }
  return v - xlogx(rowsum);
}

/// Gradient of log g. Entries are c_ij - log(ratio) with the ratio
/// x_ij / [X1]_i clamped below at clamp_delta; rows with zero sum evaluate at
/// the clamp.
inline Matrix grad_log_g(const Matrix& s, const ObjectiveContext& ctx) {
  Matrix grad(s.rows(), s.cols(), 0.0);
  for (std::size_t i = 0; i < s.rows(); ++i) {
    double rowsum = 0.0;
    for (std::size_t j = 0; j < s.cols(); ++j) rowsum += s(i, j);
    for (std::size_t j = 0; j < s.cols(); ++j) {
      double ratio;
      if (rowsum <= 0.0) ratio = ctx.clamp_delta;
      else ratio = std::max(s(i, j), ctx.clamp_delta * rowsum) / rowsum;
      grad(i, j) = ctx.coeff(i, j) - std::log(ratio);
    }
  }
  return grad;
}

/// Deviation of a candidate matrix from the feasible sets: per-column
/// residuals against phi, the budget r^T S 1, and row integrality flags.
struct FeasibilityReport {
  std::vector<double> column_residuals;  // j = 1..k
  double budget = 0.0;
  std::vector<bool> integral_rows;

  bool fractional_feasible(double tol) const {
    for (double r : column_residuals)
      if (r > tol) return false;
    return budget <= 1.0 + tol;
  }

  bool integral_feasible(double tol) const {
    if (!fractional_feasible(tol)) return false;
    for (bool f : integral_rows)
      if (!f) return false;
    return true;
  }
};

inline FeasibilityReport check_feasibility(const Matrix& s, const Profile& profile,
                                           const std::vector<double>& levels, double tol) {
  const std::size_t k = profile.distinct_count();
  if (s.cols() != k + 1 || s.rows() != levels.size())
    throw std::invalid_argument("check_feasibility: shape mismatch");
  FeasibilityReport rep;
  const auto cols = s.col_sums();
  rep.column_residuals.resize(k);
  for (std::size_t j = 1; j <= k; ++j)
    rep.column_residuals[j - 1] =
        std::abs(cols[j] - static_cast<double>(profile.entries()[j - 1].count));
  const auto rows = s.row_sums();
  rep.integral_rows.resize(s.rows());
  for (std::size_t i = 0; i < s.rows(); ++i) {
    rep.budget += levels[i] * rows[i];
    rep.integral_rows[i] = near_integer(rows[i], tol);
  }
  return rep;
}

inline FeasibilityReport check_feasibility(const LevelSetMatrix& s, const Profile& profile,
                                           double tol) {
  return check_feasibility(s.entries, profile, s.levels, tol);
}

}  // namespace pml
