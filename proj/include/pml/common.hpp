#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace pml {

inline constexpr double kTinyTol = 1e-9;

/// x*log(x) with the 0*log(0) = 0 convention used throughout the objective.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

inline bool near_integer(double x, double tol) {
  return std::abs(x - std::round(x)) <= tol;
}

/// Numerically stable accumulator for log(sum_i exp(t_i)).
class LogSumExp {
 public:
  void add(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (log_term > max_) {
      if (count_ > 0) rest_ = rest_ * std::exp(max_ - log_term) + 1.0;
      else rest_ = 1.0;
      max_ = log_term;
    } else {
      rest_ += std::exp(log_term - max_);
    }
    ++count_;
  }

  double value() const {
    if (count_ == 0) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(rest_);
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double rest_ = 0.0;
  std::size_t count_ = 0;
};

/// SplitMix64 step; used to derive independent per-trial seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Uniform double in [0,1) with 53 random bits; avoids the
/// implementation-defined std::uniform_real_distribution so that streams are
/// reproducible across platforms.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) via rejection-free scaling (bound << 2^53).
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  return static_cast<std::uint64_t>(uniform01(rng) * static_cast<double>(bound)) % bound;
}

}  // namespace pml
