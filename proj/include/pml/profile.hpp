#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "pml/common.hpp"

namespace pml {

using DomainId = std::uint32_t;

namespace detail {
inline void check_weights(const std::vector<double>& w, double mass_lo,
                          double mass_hi, const char* what) {
  double mass = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x))
      throw std::invalid_argument(std::string(what) + ": negative or non-finite weight");
    mass += x;
  }
  if (mass < mass_lo || mass > mass_hi)
    throw std::invalid_argument(std::string(what) + ": total mass out of range");
}
}  // namespace detail

/// A proper distribution over dense ids 0..size-1. Immutable after
/// construction; total mass must be 1 within 1e-9.
class Distribution {
 public:
  explicit Distribution(std::vector<double> weights) : w_(std::move(weights)) {
    detail::check_weights(w_, 1.0 - 1e-9, 1.0 + 1e-9, "Distribution");
  }

  const std::vector<double>& weights() const { return w_; }
  double weight(DomainId x) const { return x < w_.size() ? w_[x] : 0.0; }
  std::size_t size() const { return w_.size(); }

 private:
  std::vector<double> w_;
};

/// Nonnegative weights with total mass at most 1 (within 1e-9).
class PseudoDistribution {
 public:
  explicit PseudoDistribution(std::vector<double> weights) : w_(std::move(weights)) {
    detail::check_weights(w_, 0.0, 1.0 + 1e-9, "PseudoDistribution");
  }

  const std::vector<double>& weights() const { return w_; }
  double weight(DomainId x) const { return x < w_.size() ? w_[x] : 0.0; }
  std::size_t size() const { return w_.size(); }
  double mass() const {
    double m = 0.0;
    for (double x : w_) m += x;
    return m;
  }

  /// L1 normalization; requires positive mass.
  Distribution normalized() const {
    const double m = mass();
    if (m <= 0.0) throw std::invalid_argument("PseudoDistribution: zero mass");
    std::vector<double> w(w_);
    for (double& x : w) x /= m;
    return Distribution(std::move(w));
  }

 private:
  std::vector<double> w_;
};

struct ProfileEntry {
  std::uint64_t frequency = 0;  // distinct observed frequency, >= 1
  std::uint64_t count = 0;      // number of domain elements at that frequency
  friend bool operator==(const ProfileEntry&, const ProfileEntry&) = default;
};

/// Multiset of observed frequencies: distinct frequencies with multiplicities,
/// sorted ascending. n is the sample size, k the number of distinct
/// frequencies.
class Profile {
 public:
  explicit Profile(std::vector<ProfileEntry> entries) : entries_(std::move(entries)) {
    std::uint64_t prev = 0;
    for (const auto& e : entries_) {
      if (e.frequency <= prev) throw std::invalid_argument("Profile: frequencies must be strictly increasing and >= 1");
      if (e.count == 0) throw std::invalid_argument("Profile: zero count");
      prev = e.frequency;
      n_ += e.frequency * e.count;
    }
    if (entries_.empty()) throw std::invalid_argument("Profile: empty");
  }

  const std::vector<ProfileEntry>& entries() const { return entries_; }
  std::uint64_t n() const { return n_; }
  std::size_t distinct_count() const { return entries_.size(); }  // k

  /// Total number of observed domain elements, sum of phi_j.
  std::uint64_t support_count() const {
    std::uint64_t s = 0;
    for (const auto& e : entries_) s += e.count;
    return s;
  }

  friend bool operator==(const Profile& a, const Profile& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::vector<ProfileEntry> entries_;
  std::uint64_t n_ = 0;
};

/// Profile of a subset of the domain: same entry layout, but the underlying
/// sequence length n may exceed the mass accounted by the entries, and the
/// subset size is carried along.
struct PseudoProfile {
  std::vector<ProfileEntry> entries;  // sorted ascending, may be empty
  std::uint64_t n = 0;                // full sequence length
  std::uint64_t subset_size = 0;      // |S|

  /// Mass accounted by the subset entries: sum m_j * phi_j <= n.
  std::uint64_t subset_sample_count() const {
    std::uint64_t s = 0;
    for (const auto& e : entries) s += e.frequency * e.count;
    return s;
  }
};

/// Tallies a sample into its profile.
inline Profile build_profile(std::span<const DomainId> sequence) {
  if (sequence.empty()) throw std::invalid_argument("empty sample");
  std::unordered_map<DomainId, std::uint64_t> freq;
  for (DomainId x : sequence) ++freq[x];
  std::map<std::uint64_t, std::uint64_t> multiplicity;
  for (const auto& [x, f] : freq) ++multiplicity[f];
  std::vector<ProfileEntry> entries;
  entries.reserve(multiplicity.size());
  for (const auto& [m, phi] : multiplicity) entries.push_back({m, phi});
  return Profile(std::move(entries));
}

inline Profile build_profile(const std::vector<DomainId>& sequence) {
  return build_profile(std::span<const DomainId>(sequence));
}

/// log of n! / prod_j (m_j!)^{phi_j}, the orderings count shared by every
/// sequence with this profile. Computed with lgamma to stay in log space.
inline double log_multinomial_coefficient(const Profile& profile) {
  double v = std::lgamma(static_cast<double>(profile.n()) + 1.0);
  for (const auto& e : profile.entries())
    v -= static_cast<double>(e.count) * std::lgamma(static_cast<double>(e.frequency) + 1.0);
  return v;
}

/// Maps arbitrary string tokens to dense ids in first-appearance order.
class Tokenizer {
 public:
  DomainId id_for(const std::string& token) {
    auto [it, inserted] = ids_.try_emplace(token, static_cast<DomainId>(names_.size()));
    if (inserted) names_.push_back(token);
    return it->second;
  }

  const std::vector<std::string>& names() const { return names_; }

 private:
  std::unordered_map<std::string, DomainId> ids_;
  std::vector<std::string> names_;
};

}  // namespace pml
