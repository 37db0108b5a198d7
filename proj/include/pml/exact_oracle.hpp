#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pml/common.hpp"
#include "pml/profile.hpp"

namespace pml {

/// Exact profile probability by brute force, usable as a ground-truth oracle
/// on tiny instances only (domain <= 8, n <= 10).
///
/// Pr(q, phi) = C_phi * sum over ways to pick which domain elements carry each
/// distinct frequency of prod_x q_x^{f(x)}; the multinomial orderings count
/// C_phi is identical for every such assignment.
inline double exact_log_profile_probability(const PseudoDistribution& dist,
                                            const Profile& profile) {
  const std::size_t domain = dist.size();
  if (domain > 8 || profile.n() > 10)
    throw std::invalid_argument("oracle scale exceeded");

  const auto& entries = profile.entries();
  const std::size_t k = entries.size();
  std::vector<std::uint64_t> remaining(k);
  std::uint64_t needed = 0;
  for (std::size_t j = 0; j < k; ++j) {
    remaining[j] = entries[j].count;
    needed += entries[j].count;
  }
  if (needed > domain) return -std::numeric_limits<double>::infinity();

  std::vector<double> logw(domain);
  for (std::size_t x = 0; x < domain; ++x)
    logw[x] = dist.weights()[x] > 0.0 ? std::log(dist.weights()[x])
                                      : -std::numeric_limits<double>::infinity();

  LogSumExp acc;
  // Assign each element a frequency class (k = unused) depth-first.
  auto recurse = [&](auto&& self, std::size_t x, std::uint64_t left, double term) -> void {
    if (left > domain - x) return;  // not enough elements remain
    if (x == domain) {
      acc.add(term);
      return;
    }
    self(self, x + 1, left, term);  // element x unseen
    for (std::size_t j = 0; j < k; ++j) {
      if (remaining[j] == 0) continue;
      if (logw[x] == -std::numeric_limits<double>::infinity()) continue;
      --remaining[j];
      self(self, x + 1, left - 1,
           term + static_cast<double>(entries[j].frequency) * logw[x]);
      ++remaining[j];
    }
  };
  recurse(recurse, 0, needed, 0.0);
  return log_multinomial_coefficient(profile) + acc.value();
}

/// All profiles of length n, i.e. the integer partitions of n. Intended for
/// oracle-scale exhaustive checks.
inline std::vector<Profile> enumerate_profiles(std::uint64_t n) {
  std::vector<Profile> out;
  std::vector<std::uint64_t> parts;
  auto recurse = [&](auto&& self, std::uint64_t rest, std::uint64_t max_part) -> void {
    if (rest == 0) {
      std::vector<ProfileEntry> entries;
      for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
        if (!entries.empty() && entries.back().frequency == *it) ++entries.back().count;
        else entries.push_back({*it, 1});
      }
      out.emplace_back(std::move(entries));
      return;
    }
    for (std::uint64_t p = std::min(rest, max_part); p >= 1; --p) {
      parts.push_back(p);
      self(self, rest - p, p);
      parts.pop_back();
    }
  };
  recurse(recurse, n, n);
  return out;
}

}  // namespace pml
