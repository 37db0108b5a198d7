#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pml/level_set.hpp"
#include "pml/profile.hpp"

namespace pml {

/// Point-by-point verification data for the level-set extension contract.
struct CreateConditionReport {
  bool old_rows_match_b = false;      // rows 1..l of the output equal B's row sums
  bool diagonal_structure = false;    // new rows touch only their own column
  bool diagonal_values = false;       // new diagonal entries equal the column residues
  bool fractional_feasible = false;   // output feasible, total mass preserved
  bool level_values = false;          // new levels are the residue-weighted averages
  double log_g_before = 0.0;
  double log_g_after = 0.0;

  bool exact_conditions_hold() const {
    return old_rows_match_b && diagonal_structure && diagonal_values &&
           fractional_feasible && level_values;
  }
};

struct CreateResult {
  LevelSetMatrix extended;  // (l + k + 1) x (k+1)
  std::vector<double> column_residues;
};

/// Absorbs the mass that rounding removed into k+1 fresh diagonal levels: the
/// output keeps B's rows, adds one row per column whose residue
/// phi_j - sum_i B_ij sits on the diagonal, and prices each new row at the
/// residue-weighted average of the old levels. Zero-residue columns keep an
/// unused all-zero row priced at the grid minimum.
inline CreateResult create_new_probability_values(const LevelSetMatrix& a, const Matrix& b,
                                                  const Profile& profile,
                                                  double tol = 1e-7) {
  const std::size_t l = a.rows(), kp1 = a.cols();
  const std::size_t k = kp1 - 1;
  if (b.rows() != l || b.cols() != kp1)
    throw std::invalid_argument("create_new_probability_values: shape mismatch");
  if (profile.distinct_count() != k)
    throw std::invalid_argument("create_new_probability_values: profile mismatch");

  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < kp1; ++j) {
      if (b(i, j) < -tol || b(i, j) > a.entries(i, j) + tol)
        throw std::invalid_argument("create_new_probability_values: B must satisfy 0 <= B <= A");
    }
  for (double rs : b.row_sums())
    if (!near_integer(rs, tol))
      throw std::invalid_argument("create_new_probability_values: B needs integral row sums");
  for (double cs : b.col_sums())
    if (!near_integer(cs, tol))
      throw std::invalid_argument("create_new_probability_values: B needs integral column sums");

  double rmin = a.levels.front();
  for (double r : a.levels) rmin = std::min(rmin, r);

  CreateResult out;
  out.extended.entries = Matrix(l + kp1, kp1, 0.0);
  out.extended.levels = a.levels;
  out.extended.levels.resize(l + kp1, rmin);
  out.column_residues.assign(kp1, 0.0);

  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < kp1; ++j) out.extended.entries(i, j) = b(i, j);

  const auto bcols = b.col_sums();
  const auto acols = a.entries.col_sums();
  for (std::size_t j = 0; j < kp1; ++j) {
    const double target = j == 0 ? acols[0] : static_cast<double>(profile.entries()[j - 1].count);
    const double residue = target - bcols[j];
    out.column_residues[j] = residue;

    double weighted = 0.0, total = 0.0;
    for (std::size_t i = 0; i < l; ++i) {
      const double d = a.entries(i, j) - b(i, j);
      weighted += d * a.levels[i];
      total += d;
    }
    if (residue > 1e-12) out.extended.entries(l + j, j) = residue;
    if (total > 1e-12) out.extended.levels[l + j] = weighted / total;
  }
  return out;
}

/// Checks the extension contract mechanically; intended for tests and the
/// pipeline audit trail.
inline CreateConditionReport verify_create_conditions(const LevelSetMatrix& a,
                                                      const Matrix& b,
                                                      const Profile& profile,
                                                      const CreateResult& res,
                                                      double tol = 1e-9) {
  const std::size_t l = a.rows(), kp1 = a.cols();
  CreateConditionReport rep;
  const auto& ext = res.extended.entries;

  rep.old_rows_match_b = true;
  const auto brows = b.row_sums();
  for (std::size_t i = 0; i < l; ++i) {
    double rs = 0.0;
    for (std::size_t j = 0; j < kp1; ++j) rs += ext(i, j);
    if (std::abs(rs - brows[i]) > tol) rep.old_rows_match_b = false;
  }

  rep.diagonal_structure = true;
  for (std::size_t j = 0; j < kp1; ++j)
    for (std::size_t j2 = 0; j2 < kp1; ++j2)
      if (j2 != j && ext(l + j, j2) != 0.0) rep.diagonal_structure = false;

  rep.diagonal_values = true;
  const auto bcols = b.col_sums();
  const auto acols = a.entries.col_sums();
  for (std::size_t j = 0; j < kp1; ++j) {
    const double target =
        j == 0 ? acols[0] : static_cast<double>(profile.entries()[j - 1].count);
    if (std::abs(ext(l + j, j) - (target - bcols[j])) > tol) rep.diagonal_values = false;
  }

  const auto frep = check_feasibility(res.extended, profile, tol);
  const double mass_before = a.entries.sum();
  const double mass_after = ext.sum();
  rep.fractional_feasible =
      frep.fractional_feasible(tol) && std::abs(mass_before - mass_after) <= tol * std::max(1.0, mass_before);

  rep.level_values = true;
  for (std::size_t j = 0; j < kp1; ++j) {
    double weighted = 0.0, total = 0.0;
    for (std::size_t i = 0; i < l; ++i) {
      const double d = a.entries(i, j) - b(i, j);
      weighted += d * a.levels[i];
      total += d;
    }
    if (total > 1e-7 &&
        std::abs(res.extended.levels[l + j] - weighted / total) > tol)
      rep.level_values = false;
  }

  const auto actx = ObjectiveContext::make(profile, a.levels);
  const auto ectx = ObjectiveContext::make(profile, res.extended.levels);
  rep.log_g_before = log_g(a.entries, actx);
  rep.log_g_after = log_g(ext, ectx);
  return rep;
}

}  // namespace pml
