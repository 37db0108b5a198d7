#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "pml/level_set.hpp"
#include "pml/sparsify.hpp"

using namespace pml;

namespace {

struct Instance {
  Profile profile;
  LevelSetMatrix s;
};

Instance random_instance(std::mt19937_64& rng, std::size_t max_rows, std::size_t max_k) {
  const std::size_t l = 2 + uniform_below(rng, max_rows - 1);
  const std::size_t k = 1 + uniform_below(rng, max_k);
  std::vector<ProfileEntry> entries;
  std::uint64_t freq = 0;
  for (std::size_t j = 0; j < k; ++j) {
    freq += 1 + uniform_below(rng, 3);
    entries.push_back({freq, 1 + uniform_below(rng, 4)});
  }
  Profile profile(std::move(entries));

  std::uint64_t support = profile.support_count();
  LevelSetMatrix s;
  s.levels.resize(l);
  double v = 1.0 / (4.0 * static_cast<double>(support) * static_cast<double>(l));
  for (auto& r : s.levels) {
    r = v;
    v *= 1.2 + uniform01(rng);
  }
  for (auto& r : s.levels) r = std::min(r, 0.9 / static_cast<double>(support));

  s.entries = Matrix(l, k + 1, 0.0);
  for (std::size_t j = 1; j <= k; ++j) {
    double z = 0.0;
    for (std::size_t i = 0; i < l; ++i) {
      s.entries(i, j) = uniform01(rng);
      z += s.entries(i, j);
    }
    const double phi = static_cast<double>(profile.entries()[j - 1].count);
    for (std::size_t i = 0; i < l; ++i) s.entries(i, j) *= phi / z;
  }
  // sprinkle some unseen mass without breaking the budget
  double budget = 0.0;
  const auto rows = s.entries.row_sums();
  for (std::size_t i = 0; i < l; ++i) budget += s.levels[i] * rows[i];
  double slack = 1.0 - budget;
  for (std::size_t i = 0; i < l && slack > 0.0; ++i) {
    const double add = uniform01(rng) * slack * 0.4 / s.levels[i];
    s.entries(i, 0) += add;
    slack -= add * s.levels[i];
  }
  return {std::move(profile), std::move(s)};
}

std::vector<std::size_t> nonzero_rows(const Matrix& m) {
  std::vector<std::size_t> out;
  const auto rows = m.row_sums();
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i] > 1e-12) out.push_back(i);
  return out;
}

double total_f(const LevelSetMatrix& s, const ObjectiveContext& ctx) {
  return -log_g(s.entries, ctx);
}

}  // namespace

TEST_CASE("a basic feasible solution is returned unchanged") {
  // two rows with linearly independent constraint columns
  const Profile profile({{1, 2}, {2, 1}});
  LevelSetMatrix s;
  s.levels = {0.1, 0.2};
  s.entries = Matrix(2, 3, 0.0);
  s.entries(0, 1) = 2.0;
  s.entries(1, 2) = 1.0;
  const auto out = sparsify(s, profile);
  REQUIRE(out.entries.data() == s.entries.data());
}

TEST_CASE("proportional rows collapse, f strictly drops, budget does not rise") {
  // Three proportional rows at geometric levels with slack budget: the count
  // exceeds k+1, so an elimination is forced, and draining the extreme rows
  // into the middle one lowers f and the budget at once (log-concavity).
  const Profile profile({{1, 2}});
  LevelSetMatrix s;
  s.levels = {0.1, 0.2, 0.4};
  s.entries = Matrix(3, 2, 0.0);
  for (std::size_t i = 0; i < 3; ++i) s.entries(i, 1) = 2.0 / 3.0;
  const auto ctx = ObjectiveContext::make(profile, s.levels);
  const double f_before = total_f(s, ctx);
  const double budget_before = check_feasibility(s, profile, 1e-9).budget;

  const auto out = sparsify(s, profile);
  REQUIRE(nonzero_rows(out.entries).size() <= 2);
  REQUIRE(nonzero_rows(out.entries).size() < 3);  // at least one row eliminated
  const double f_after = total_f(out, ctx);
  REQUIRE(f_after <= f_before + 1e-9);
  REQUIRE(f_after < f_before - 1e-9);  // strictly better placement exists
  REQUIRE(check_feasibility(out, profile, 1e-9).budget <= budget_before + 1e-9);

  const auto cols = out.entries.col_sums();
  REQUIRE_THAT(cols[1], Catch::Matchers::WithinAbs(2.0, 1e-9));
}

TEST_CASE("unseen-only proportional rows collapse without touching f") {
  // Rows carrying only unseen mass have zero objective contribution; the
  // elimination direction is objective-neutral and prefers the cheaper level.
  const Profile profile({{1, 1}});
  LevelSetMatrix s;
  s.levels = {0.05, 0.1};
  s.entries = Matrix(2, 2, 0.0);
  s.entries(0, 1) = 1.0;  // the constraint column lives in row 0
  s.entries(0, 0) = 1.0;
  s.entries(1, 0) = 2.0;  // unseen-only row
  const auto ctx = ObjectiveContext::make(profile, s.levels);
  const double f_before = total_f(s, ctx);
  const double budget_before = check_feasibility(s, profile, 1e-9).budget;

  const auto out = sparsify(s, profile);
  const auto rows = out.entries.row_sums();
  REQUIRE(rows[1] <= 1e-12);  // the unseen-only row is gone
  REQUIRE(total_f(out, ctx) <= f_before + 1e-9);
  REQUIRE(check_feasibility(out, profile, 1e-9).budget <= budget_before + 1e-9);
}

TEST_CASE("infeasible input is rejected") {
  const Profile profile({{1, 2}});
  LevelSetMatrix s;
  s.levels = {0.1};
  s.entries = Matrix(1, 2, 0.0);
  s.entries(0, 1) = 1.0;  // column sum 1 != phi = 2
  REQUIRE_THROWS_AS(sparsify(s, profile), std::invalid_argument);
}

TEST_CASE("random instances satisfy all postconditions") {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 100; ++rep) {
    const auto inst = random_instance(rng, 30, 5);
    const auto& profile = inst.profile;
    const auto ctx = ObjectiveContext::make(profile, inst.s.levels);
    const auto rep_in = check_feasibility(inst.s, profile, 1e-9);
    REQUIRE(rep_in.fractional_feasible(1e-7));

    const auto out = sparsify(inst.s, profile);

    const std::size_t k = profile.distinct_count();
    REQUIRE(nonzero_rows(out.entries).size() <= k + 1);

    const auto cin = inst.s.entries.col_sums();
    const auto cout_sums = out.entries.col_sums();
    for (std::size_t j = 1; j <= k; ++j)
      REQUIRE_THAT(cout_sums[j], Catch::Matchers::WithinAbs(cin[j], 1e-9));

    const auto rep_out = check_feasibility(out, profile, 1e-9);
    REQUIRE(rep_out.budget <= rep_in.budget + 1e-9);
    REQUIRE(total_f(out, ctx) <= total_f(inst.s, ctx) + 1e-9);

    // scaling form: every output row is a nonnegative multiple of its input
    for (std::size_t i = 0; i < out.entries.rows(); ++i) {
      double ratio = -1.0;
      for (std::size_t j = 0; j < out.entries.cols(); ++j) {
        if (inst.s.entries(i, j) <= 1e-15) {
          REQUIRE(out.entries(i, j) <= 1e-12);
          continue;
        }
        const double r = out.entries(i, j) / inst.s.entries(i, j);
        if (ratio < 0.0) ratio = r;
        REQUIRE_THAT(r, Catch::Matchers::WithinAbs(ratio, 1e-8));
      }
    }
  }
}

TEST_CASE("sparsify is idempotent on the support") {
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 20; ++rep) {
    const auto inst = random_instance(rng, 12, 3);
    const auto once = sparsify(inst.s, inst.profile);
    const auto twice = sparsify(once, inst.profile);
    REQUIRE(nonzero_rows(once.entries) == nonzero_rows(twice.entries));
  }
}
