#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pml/grid.hpp"
#include "pml/level_set.hpp"
#include "pml/level_sets.hpp"
#include "pml/matrix_round.hpp"
#include "pml/profile.hpp"
#include "pml/relaxation.hpp"
#include "pml/sparsify.hpp"

namespace pml {

/// Reads off the pseudo-distribution of an integral-row-sum matrix (row i
/// contributes round([S1]_i) elements of probability r_i) and its L1
/// normalization.
inline std::pair<PseudoDistribution, Distribution> distribution_from_matrix(
    const LevelSetMatrix& s, double tol = 1e-7) {
  std::vector<double> weights;
  const auto rows = s.entries.row_sums();
  for (std::size_t i = 0; i < s.rows(); ++i) {
    if (!near_integer(rows[i], tol))
      throw std::invalid_argument("distribution_from_matrix: non-integral row sums");
    const auto count = static_cast<std::uint64_t>(std::llround(rows[i]));
    for (std::uint64_t c = 0; c < count; ++c) weights.push_back(s.levels[i]);
  }
  PseudoDistribution q(std::move(weights));
  Distribution p = q.normalized();
  return {std::move(q), std::move(p)};
}

struct PipelineOptions {
  SolveOptions solver;
  std::optional<DiscretizationGrid> grid;  // overrides the default grid
  std::uint64_t seed = 0;
  double snap_tol = 1e-7;  // row sums this close to an integer are snapped
};

/// Audit trail of one pipeline run.
struct PipelineTrace {
  double log_g_solved = 0.0;
  double log_g_sparsified = 0.0;
  double log_g_final = 0.0;
  double solver_gap = 0.0;
  bool solver_converged = false;
  int solver_iterations = 0;
  std::size_t nonzero_rows = 0;
  double rounding_change = 0.0;       // v1 only
  bool create_conditions_ok = false;  // v1 only
  double rescale_factor = 1.0;        // v2 only
  double first_order_start = 0.0;     // v2: sum c'_ij Y_ij before the sweep
  double first_order_end = 0.0;       // v2: sum c'_ij S_ij after the sweep
  std::vector<SolverStep> solver_steps;
};

struct ApproxPmlResult {
  Distribution distribution;
  PseudoDistribution pseudo;
  LevelSetMatrix final_matrix;
  PipelineTrace trace;
};

namespace detail {

inline double clamp_alpha(double a) { return std::min(0.9, std::max(1e-3, a)); }

/// Keep only rows with positive mass; levels follow.
inline LevelSetMatrix drop_zero_rows(const LevelSetMatrix& s, double eps = 1e-12) {
  std::vector<std::size_t> live;
  const auto rows = s.entries.row_sums();
  for (std::size_t i = 0; i < s.rows(); ++i)
    if (rows[i] > eps) live.push_back(i);
  LevelSetMatrix out;
  out.entries = Matrix(live.size(), s.cols(), 0.0);
  out.levels.resize(live.size());
  for (std::size_t i = 0; i < live.size(); ++i) {
    out.levels[i] = s.levels[live[i]];
    for (std::size_t j = 0; j < s.cols(); ++j)
      out.entries(i, j) = s.entries(live[i], j);
  }
  return out;
}

inline void snap_integral_rows(LevelSetMatrix& s, double tol) {
  const auto rows = s.entries.row_sums();
  for (std::size_t i = 0; i < s.rows(); ++i) {
    if (rows[i] <= 0.0 || !near_integer(rows[i], tol)) continue;
    const double target = std::round(rows[i]);
    if (target == 0.0) {
      for (std::size_t j = 0; j < s.cols(); ++j) s.entries(i, j) = 0.0;
      continue;
    }
    const double f = target / rows[i];
    for (std::size_t j = 0; j < s.cols(); ++j) s.entries(i, j) *= f;
  }
}

/// Floors the unseen-column total to an integer, draining the fractional part
/// from the smallest levels first. The constrained columns already carry
/// integral totals, so this makes the whole matrix carry integral mass and
/// keeps later residue rows integral.
inline void floor_unseen_total(LevelSetMatrix& s) {
  double col0 = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) col0 += s.entries(i, 0);
  double frac = col0 - std::floor(col0 + 1e-9);
  if (frac <= 1e-9) return;
  for (std::size_t i = 0; i < s.rows() && frac > 1e-12; ++i) {
    const double take = std::min(frac, s.entries(i, 0));
    s.entries(i, 0) -= take;
    frac -= take;
  }
}

}  // namespace detail

/// Rows in increasing-level order keep the integral part of their mass and
/// push the fractional remainder (entry-proportionally) into the next row;
/// the last row is floored. Mass only ever moves within its own column.
inline Matrix sweep_fractional_mass(const Matrix& s) {
  const std::size_t l = s.rows(), cols = s.cols();
  Matrix ext(l, cols, 0.0);
  Matrix work = s;
  for (std::size_t i = 0; i < l; ++i) {
    double rs = 0.0;
    for (std::size_t j = 0; j < cols; ++j) rs += work(i, j);
    const double f = rs > 0.0 ? std::floor(rs + 1e-9) / rs : 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      ext(i, j) = work(i, j) * f;
      if (i + 1 < l) work(i + 1, j) += work(i, j) - ext(i, j);
    }
  }
  return ext;
}

/// Full rounding pipeline: maximize the relaxation, sparsify to k+1 rows,
/// round the surviving submatrix to integral row/column sums, absorb the
/// residues into fresh levels, and read off the distribution.
inline ApproxPmlResult approximate_pml_v1(const Profile& profile,
                                          const PipelineOptions& opts = {}) {
  const double n = static_cast<double>(profile.n());
  const double k = static_cast<double>(profile.distinct_count());
  DiscretizationGrid grid =
      opts.grid ? *opts.grid
                : build_grid(profile.n(),
                             detail::clamp_alpha(k * std::log(std::max(2.0, n)) / n),
                             0.0, 1.0);

  PipelineTrace trace;
  auto solved = solve_relaxation(profile, grid.values, opts.solver);
  trace.log_g_solved = solved.log_g_value;
  trace.solver_gap = solved.final_gap;
  trace.solver_converged = solved.converged;
  trace.solver_iterations = solved.iterations;
  trace.solver_steps = std::move(solved.trace);

  const auto ctx_full = ObjectiveContext::make(profile, grid.values);
  LevelSetMatrix sparse = sparsify(solved.solution, profile);
  trace.log_g_sparsified = log_g(sparse, ctx_full);

  LevelSetMatrix sub = detail::drop_zero_rows(sparse);
  trace.nonzero_rows = sub.rows();
  detail::snap_integral_rows(sub, opts.snap_tol);
  detail::floor_unseen_total(sub);

  const auto rounded = matrix_round(sub.entries, opts.seed);
  trace.rounding_change = rounded.total_change;
  if (!rounded.certificate.ok())
    throw std::runtime_error("approximate_pml_v1: rounding certificate failed");

  const auto created = create_new_probability_values(sub, rounded.rounded, profile);
  const auto report = verify_create_conditions(sub, rounded.rounded, profile, created, 1e-6);
  trace.create_conditions_ok = report.exact_conditions_hold();
  const auto ctx_ext = ObjectiveContext::make(profile, created.extended.levels);
  trace.log_g_final = log_g(created.extended, ctx_ext);

  auto [q, p] = distribution_from_matrix(created.extended);
  return ApproxPmlResult{std::move(p), std::move(q), created.extended, std::move(trace)};
}

/// Sequential rounding: push each row's fractional mass to the next (higher)
/// level, then rescale the levels when the budget overshoots 1. The unseen
/// column's total is floored up front so the sweep conserves the constrained
/// columns exactly.
inline ApproxPmlResult approximate_pml_v2(const Profile& profile, double lbound,
                                          double ubound,
                                          const PipelineOptions& opts = {}) {
  if (!(lbound > 0.0 && lbound <= ubound && ubound <= 1.0))
    throw std::invalid_argument("approximate_pml_v2: need 0 < lbound <= ubound <= 1");
  const double n = static_cast<double>(profile.n());
  const double k = static_cast<double>(profile.distinct_count());
  DiscretizationGrid grid;
  if (opts.grid) grid = *opts.grid;
  else if (lbound == ubound) grid = DiscretizationGrid{{lbound}, 0.0};
  else grid = build_grid(profile.n(), detail::clamp_alpha(k / n), lbound, ubound);

  PipelineTrace trace;
  auto solved = solve_relaxation(profile, grid.values, opts.solver);
  trace.log_g_solved = solved.log_g_value;
  trace.solver_gap = solved.final_gap;
  trace.solver_converged = solved.converged;
  trace.solver_iterations = solved.iterations;
  trace.solver_steps = std::move(solved.trace);

  const auto ctx_full = ObjectiveContext::make(profile, grid.values);
  LevelSetMatrix sparse = sparsify(solved.solution, profile);
  trace.log_g_sparsified = log_g(sparse, ctx_full);

  LevelSetMatrix s = detail::drop_zero_rows(sparse);
  trace.nonzero_rows = s.rows();
  detail::snap_integral_rows(s, opts.snap_tol);
  const std::size_t l = s.rows();
  if (l == 0) throw std::runtime_error("approximate_pml_v2: empty solution");

  // Floor the unseen-column total so the whole matrix carries integral mass
  // and the sweep conserves the constrained columns.
  detail::floor_unseen_total(s);

  const auto ctx_sub = ObjectiveContext::make(profile, s.levels);
  auto first_order = [&](const Matrix& m) {
    double v = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) v += ctx_sub.coeff(i, j) * m(i, j);
    return v;
  };
  trace.first_order_start = first_order(s.entries);
  Matrix ext = sweep_fractional_mass(s.entries);
  trace.first_order_end = first_order(ext);

  std::vector<double> levels = s.levels;
  double c = 0.0;
  {
    const auto rows = ext.row_sums();
    for (std::size_t i = 0; i < l; ++i) c += levels[i] * rows[i];
  }
  trace.rescale_factor = c;
  if (c > 1.0 + 1e-12)
    for (double& r : levels) r /= c;

  LevelSetMatrix final_m{std::move(ext), std::move(levels)};
  detail::snap_integral_rows(final_m, 1e-9);
  const auto ctx_final = ObjectiveContext::make(profile, final_m.levels);
  trace.log_g_final = log_g(final_m, ctx_final);

  auto [q, p] = distribution_from_matrix(final_m);
  return ApproxPmlResult{std::move(p), std::move(q), std::move(final_m), std::move(trace)};
}

}  // namespace pml
