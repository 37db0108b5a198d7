#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "pml/level_set.hpp"
#include "pml/linalg.hpp"
#include "pml/profile.hpp"

namespace pml {

namespace detail {

/// Picks a combination of two null directions that is non-increasing in both
/// the objective rate and the budget rate. Above k+1 active rows the null
/// space has dimension >= 2, and such a combination always exists: either the
/// 2x2 rate map is invertible (target both rates at -1) or its kernel gives a
/// direction neutral in both.
inline std::vector<double> doubly_safe_direction(const std::vector<double>& n1,
                                                 const std::vector<double>& n2,
                                                 double r1, double r2, double b1,
                                                 double b2) {
  const double det = r1 * b2 - r2 * b1;
  double c1, c2;
  if (std::abs(det) > 1e-13 * std::max({1.0, std::abs(r1), std::abs(r2),
                                        std::abs(b1), std::abs(b2)})) {
    c1 = (-b2 + r2) / det;  // solves [r1 r2; b1 b2] c = (-1, -1)
    c2 = (b1 - r1) / det;
  } else {
    // rank <= 1: a kernel combination is neutral in both rates
    c1 = r2;
    c2 = -r1;
    if (std::abs(c1) + std::abs(c2) < 1e-13) {
      c1 = b2;
      c2 = -b1;
    }
    if (std::abs(c1) + std::abs(c2) < 1e-13) {
      c1 = 1.0;
      c2 = 0.0;
    }
  }
  std::vector<double> mu(n1.size());
  for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = c1 * n1[i] + c2 * n2[i];
  return mu;
}

}  // namespace detail

/// Reduces a fractional-feasible matrix to at most k+1 nonzero rows without
/// increasing f = -log g and without increasing the budget, by scaling whole
/// rows. Row scaling keeps every per-row objective proportional (the row
/// function is 1-homogeneous), so the search walks null-space directions of
/// the column constraints. While more than k+1 rows are active the direction
/// space is at least two-dimensional and a step that is non-increasing in
/// both f and budget exists; at k+1 rows and below, eliminations are taken
/// only when they keep both monotone. Candidate rows are ordered by
/// decreasing row sum.
inline LevelSetMatrix sparsify(const LevelSetMatrix& sm, const Profile& profile,
                               double tol = 1e-7) {
  const auto rep = check_feasibility(sm, profile, tol);
  if (!rep.fractional_feasible(tol))
    throw std::invalid_argument("sparsify: input is not fractional-feasible");

  const auto ctx = ObjectiveContext::make(profile, sm.levels);
  const Matrix& s = sm.entries;
  const std::size_t l = s.rows(), kp1 = s.cols();
  const std::size_t k = kp1 - 1;

  const auto rowsums = s.row_sums();
  std::vector<double> fvals(l), bvals(l);
  for (std::size_t i = 0; i < l; ++i) {
    fvals[i] = row_neg_log_g(s, ctx, i);
    bvals[i] = sm.levels[i] * rowsums[i];
  }

  std::vector<double> alpha(l, 1.0);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < l; ++i) {
    if (rowsums[i] > 1e-14) order.push_back(i);
    else alpha[i] = 0.0;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (rowsums[a] != rowsums[b]) return rowsums[a] > rowsums[b];
    return a < b;
  });

  auto positives = [&]() {
    std::vector<std::size_t> pos;
    for (std::size_t i : order)
      if (alpha[i] > 0.0) pos.push_back(i);
    return pos;
  };
  auto rate_of = [&](const std::vector<std::size_t>& pos, const std::vector<double>& mu) {
    double r = 0.0;
    for (std::size_t t = 0; t < pos.size(); ++t) r += mu[t] * fvals[pos[t]];
    return r;
  };
  auto brate_of = [&](const std::vector<std::size_t>& pos, const std::vector<double>& mu) {
    double r = 0.0;
    for (std::size_t t = 0; t < pos.size(); ++t) r += mu[t] * bvals[pos[t]];
    return r;
  };
  auto step_along = [&](const std::vector<std::size_t>& pos, const std::vector<double>& mu) {
    double step = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < pos.size(); ++t)
      if (mu[t] < -1e-15) step = std::min(step, alpha[pos[t]] / -mu[t]);
    if (!std::isfinite(step)) return false;
    for (std::size_t t = 0; t < pos.size(); ++t) {
      alpha[pos[t]] += step * mu[t];
      if (alpha[pos[t]] <= 1e-13) alpha[pos[t]] = 0.0;
    }
    return true;
  };
  auto constraint_columns = [&](const std::vector<std::size_t>& pos) {
    Matrix m(k, pos.size(), 0.0);
    for (std::size_t t = 0; t < pos.size(); ++t)
      for (std::size_t j = 1; j <= k; ++j) m(j - 1, t) = s(pos[t], j);
    return m;
  };

  // Phase 1: drive the active count down to k+1 along doubly monotone
  // directions.
  for (std::size_t guard = 0; guard <= l + 2; ++guard) {
    const auto pos = positives();
    if (pos.size() <= k + 1) break;
    const auto basis = null_space_basis(constraint_columns(pos), 1e-10);
    if (basis.size() < 2) break;  // cannot happen with pos > k+1
    const auto& n1 = basis[0];
    const auto& n2 = basis[1];
    const double r1 = rate_of(pos, n1), r2 = rate_of(pos, n2);
    const double b1 = brate_of(pos, n1), b2 = brate_of(pos, n2);
    auto mu = detail::doubly_safe_direction(n1, n2, r1, r2, b1, b2);
    const double scale = std::max({1.0, std::abs(r1), std::abs(r2), std::abs(b1),
                                   std::abs(b2)});
    if (rate_of(pos, mu) > 1e-9 * scale || brate_of(pos, mu) > 1e-9 * scale) {
      // numerically degenerate solve: use the kernel combination instead
      std::vector<double> kmu(n1.size());
      double c1 = r2, c2 = -r1;
      if (std::abs(c1) + std::abs(c2) < 1e-13) {
        c1 = b2;
        c2 = -b1;
      }
      for (std::size_t t = 0; t < kmu.size(); ++t) kmu[t] = c1 * n1[t] + c2 * n2[t];
      mu = std::move(kmu);
    }
    if (!step_along(pos, mu)) break;
  }

  // Phase 2: opportunistic eliminations that keep both f and the budget
  // non-increasing.
  double fscale = 1.0;
  for (std::size_t i = 0; i < l; ++i)
    fscale = std::max({fscale, std::abs(fvals[i]), bvals[i]});
  for (std::size_t guard = 0; guard <= l + 2; ++guard) {
    const auto pos = positives();
    if (pos.empty()) break;
    const auto basis = null_space_basis(constraint_columns(pos), 1e-10);
    bool moved = false;
    for (const auto& n : basis) {
      for (const double sign : {1.0, -1.0}) {
        std::vector<double> mu(n.size());
        for (std::size_t t = 0; t < n.size(); ++t) mu[t] = sign * n[t];
        if (rate_of(pos, mu) > 1e-10 * fscale || brate_of(pos, mu) > 1e-10 * fscale)
          continue;
        if (step_along(pos, mu)) {
          moved = true;
          break;
        }
      }
      if (moved) break;
    }
    if (!moved) break;
  }

  LevelSetMatrix out;
  out.levels = sm.levels;
  out.entries = Matrix(l, kp1, 0.0);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < kp1; ++j)
      out.entries(i, j) = alpha[i] * s(i, j);
  return out;
}

}  // namespace pml
