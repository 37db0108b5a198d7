#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "pml/common.hpp"
#include "pml/profile.hpp"

namespace pml {

/// Draws n i.i.d. samples from dist. Deterministic given the seed (the
/// generator and the inverse-CDF lookup avoid implementation-defined library
/// distributions).
inline std::vector<DomainId> sample_sequence(const Distribution& dist,
                                             std::uint64_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_sequence: n must be >= 1");
  std::vector<double> cdf(dist.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    acc += dist.weights()[i];
    cdf[i] = acc;
  }
  cdf.back() = 1.0;

  std::mt19937_64 rng(seed);
  std::vector<DomainId> out(n);
  for (std::uint64_t t = 0; t < n; ++t) {
    const double u = uniform01(rng);
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    out[t] = static_cast<DomainId>(it - cdf.begin());
  }
  return out;
}

}  // namespace pml
