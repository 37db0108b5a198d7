#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pml/grid.hpp"
#include "pml/level_set.hpp"
#include "pml/profile.hpp"

namespace pml {

struct SolveOptions {
  double gap_tol = 0.0;  // <= 0 selects 1e-4 * max(1, |log g|)
  int max_iters = 5000;
  int line_search_iters = 60;
  bool record_trace = false;
};

struct SolverStep {
  int iteration = 0;
  double log_g_value = 0.0;
  double gap = 0.0;
};

struct RelaxationResult {
  LevelSetMatrix solution;
  bool converged = false;  // warning flag is !converged
  double final_gap = std::numeric_limits<double>::infinity();
  int iterations = 0;
  double log_g_value = 0.0;
  std::vector<SolverStep> trace;
};

namespace detail {

// Column assignment when the budget multiplier is lambda: every constrained
// column puts its full mass on the row with the best reduced cost
// grad(i,j) - lambda * r_i, ties broken toward the smaller level.
struct LambdaAssignment {
  std::vector<std::size_t> row_of_col;  // per column j >= 1
  double budget = 0.0;
};

inline LambdaAssignment assign_at_lambda(const Matrix& grad, const ObjectiveContext& ctx,
                                         double lambda) {
  const std::size_t l = grad.rows(), kp1 = grad.cols();
  LambdaAssignment out;
  out.row_of_col.assign(kp1, 0);
  for (std::size_t j = 1; j < kp1; ++j) {
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < l; ++i) {
      const double score = grad(i, j) - lambda * ctx.levels[i];
      if (score > best_score ||
          (score == best_score && ctx.levels[i] < ctx.levels[best])) {
        best_score = score;
        best = i;
      }
    }
    out.row_of_col[j] = best;
    out.budget += static_cast<double>(ctx.targets[j]) * ctx.levels[best];
  }
  return out;
}

inline Matrix materialize(const LambdaAssignment& asg, const ObjectiveContext& ctx,
                          std::size_t l, std::size_t kp1) {
  Matrix x(l, kp1, 0.0);
  for (std::size_t j = 1; j < kp1; ++j)
    x(asg.row_of_col[j], j) += static_cast<double>(ctx.targets[j]);
  return x;
}

}  // namespace detail

/// Exact linear maximization of <grad, X> over the fractional feasible set
/// {X >= 0, column sums = phi, r^T X 1 <= 1}. The single budget constraint is
/// dualized; 80 bisection steps pin the multiplier and the returned point is
/// exactly feasible (column sums hit phi by construction, budget <= 1).
inline Matrix lp_oracle_matrix(const Matrix& grad, const ObjectiveContext& ctx) {
  const std::size_t l = grad.rows(), kp1 = grad.cols();
  if (l != ctx.levels.size() || kp1 != ctx.freqs.size())
    throw std::invalid_argument("lp_oracle: shape mismatch");
  for (double v : grad.data())
    if (!std::isfinite(v)) throw std::invalid_argument("lp_oracle: non-finite gradient");

  double min_level = ctx.levels[0];
  for (double r : ctx.levels) min_level = std::min(min_level, r);
  double mass = 0.0;
  for (std::size_t j = 1; j < kp1; ++j) mass += static_cast<double>(ctx.targets[j]);
  if (mass * min_level > 1.0 + 1e-9)
    throw std::invalid_argument("lp_oracle: infeasible level-set polytope");

  // Smallest multiplier at which the unseen column stops being attractive.
  double lambda0 = 0.0;
  std::size_t fill_row = l;
  for (std::size_t i = 0; i < l; ++i) {
    if (grad(i, 0) > 0.0 && grad(i, 0) / ctx.levels[i] > lambda0) {
      lambda0 = grad(i, 0) / ctx.levels[i];
      fill_row = i;
    }
  }

  const auto at0 = detail::assign_at_lambda(grad, ctx, lambda0);
  if (at0.budget <= 1.0) {
    Matrix x = detail::materialize(at0, ctx, l, kp1);
    const double slack = 1.0 - at0.budget;
    if (lambda0 > 0.0 && fill_row < l && slack > 0.0)
      x(fill_row, 0) = slack / ctx.levels[fill_row];
    return x;
  }

  // Budget-tight regime: bisect for the crossing multiplier, then mix the two
  // bracketing vertices so the budget lands exactly on 1.
  double lo = lambda0;
  double hi = std::max(1.0, grad.max_abs()) / min_level * 2.0 + lambda0 + 1.0;
  for (int guard = 0; detail::assign_at_lambda(grad, ctx, hi).budget > 1.0; ++guard) {
    if (guard > 200) throw std::invalid_argument("lp_oracle: infeasible level-set polytope");
    hi = hi * 2.0 + 1.0;
  }
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (detail::assign_at_lambda(grad, ctx, mid).budget > 1.0) lo = mid;
    else hi = mid;
  }
  const auto a_lo = detail::assign_at_lambda(grad, ctx, lo);
  const auto a_hi = detail::assign_at_lambda(grad, ctx, hi);
  const double t = (a_lo.budget > a_hi.budget)
                       ? (1.0 - a_hi.budget) / (a_lo.budget - a_hi.budget)
                       : 0.0;
  Matrix x(l, kp1, 0.0);
  for (std::size_t j = 1; j < kp1; ++j) {
    const double phi = static_cast<double>(ctx.targets[j]);
    x(a_hi.row_of_col[j], j) += (1.0 - t) * phi;
    x(a_lo.row_of_col[j], j) += t * phi;
  }
  return x;
}

inline LevelSetMatrix lp_oracle(const Matrix& gradient, const Profile& profile,
                                const std::vector<double>& levels) {
  const auto ctx = ObjectiveContext::make(profile, levels);
  return LevelSetMatrix{lp_oracle_matrix(gradient, ctx), levels};
}

/// Frank-Wolfe maximization of log g over the fractional feasible set with
/// exact line search on each 1-d restriction. Start: every column sits on the
/// smallest level (always feasible for grids built for the profile).
inline RelaxationResult solve_relaxation(const Profile& profile,
                                         const std::vector<double>& levels,
                                         const SolveOptions& opts = {}) {
  const auto ctx = ObjectiveContext::make(profile, levels);
  const std::size_t l = levels.size(), kp1 = ctx.freqs.size();

  double mass = 0.0;
  for (std::size_t j = 1; j < kp1; ++j) mass += static_cast<double>(ctx.targets[j]);
  std::size_t min_row = 0;
  for (std::size_t i = 1; i < l; ++i)
    if (levels[i] < levels[min_row]) min_row = i;
  if (mass * levels[min_row] > 1.0 + 1e-9)
    throw std::invalid_argument("solve_relaxation: grid cannot carry the profile mass");

  Matrix s(l, kp1, 0.0);
  for (std::size_t j = 1; j < kp1; ++j)
    s(min_row, j) = static_cast<double>(ctx.targets[j]);

  RelaxationResult res;
  double cur = log_g(s, ctx);
  int stall = 0;

  for (int it = 0; it < opts.max_iters; ++it) {
    res.iterations = it + 1;
    const Matrix grad = grad_log_g(s, ctx);
    const Matrix v = lp_oracle_matrix(grad, ctx);

    double gap = 0.0;
    for (std::size_t idx = 0; idx < grad.data().size(); ++idx)
      gap += grad.data()[idx] * (v.data()[idx] - s.data()[idx]);
    res.final_gap = gap;
    if (opts.record_trace) res.trace.push_back({it, cur, gap});

    const double tol = opts.gap_tol > 0.0 ? opts.gap_tol
                                          : 1e-4 * std::max(1.0, std::abs(cur));
    if (gap <= tol) {
      res.converged = true;
      break;
    }

    // phi(t) = log g((1-t) S + t V) is concave; bisect phi' for the maximizer.
    auto blend = [&](double t) {
      Matrix m(l, kp1, 0.0);
      for (std::size_t idx = 0; idx < m.data().size(); ++idx)
        m.data()[idx] = (1.0 - t) * s.data()[idx] + t * v.data()[idx];
      return m;
    };
    auto dphi = [&](double t) {
      const Matrix m = blend(t);
      const Matrix g = grad_log_g(m, ctx);
      double d = 0.0;
      for (std::size_t idx = 0; idx < g.data().size(); ++idx)
        d += g.data()[idx] * (v.data()[idx] - s.data()[idx]);
      return d;
    };

    double t = 1.0;
    if (dphi(1.0) < 0.0) {
      double a = 0.0, b = 1.0;
      for (int ls = 0; ls < opts.line_search_iters; ++ls) {
        const double mid = 0.5 * (a + b);
        if (dphi(mid) > 0.0) a = mid;
        else b = mid;
      }
      t = 0.5 * (a + b);
    }

    Matrix snew = blend(t);
    double next = log_g(snew, ctx);
    for (int back = 0; next < cur && back < 60; ++back) {
      t *= 0.5;
      snew = blend(t);
      next = log_g(snew, ctx);
    }
    if (next < cur) break;  // no ascent direction left numerically

    if (next - cur <= 1e-13 * std::max(1.0, std::abs(cur))) {
      if (++stall >= 3) break;
    } else {
      stall = 0;
    }
    s = std::move(snew);
    cur = next;
  }

  res.solution = LevelSetMatrix{std::move(s), levels};
  res.log_g_value = cur;
  return res;
}

inline RelaxationResult solve_relaxation(const Profile& profile,
                                         const DiscretizationGrid& grid,
                                         const SolveOptions& opts = {}) {
  return solve_relaxation(profile, grid.values, opts);
}

}  // namespace pml
