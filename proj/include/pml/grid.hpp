#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pml/profile.hpp"

namespace pml {

/// Geometric discretization of the probability space: sorted values
/// r_1 < ... < r_l in (0,1], consecutive ratio 1+alpha except possibly the
/// top value, which is clamped to rmax.
struct DiscretizationGrid {
  std::vector<double> values;
  double alpha = 0.0;

  std::size_t size() const { return values.size(); }
  double min_value() const { return values.front(); }
  double max_value() const { return values.back(); }
};

/// Builds the grid r_i = rmin * (1+alpha)^(i-1) up to rmax. Passing rmin <= 0
/// selects the default floor 1/(2n^2). A single-value grid is returned when
/// rmin == rmax.
inline DiscretizationGrid build_grid(std::uint64_t n, double alpha, double rmin,
                                     double rmax) {
  if (rmin <= 0.0) rmin = 1.0 / (2.0 * static_cast<double>(n) * static_cast<double>(n));
  if (rmin > rmax) throw std::invalid_argument("build_grid: rmin > rmax");
  if (rmax > 1.0 + 1e-12) throw std::invalid_argument("build_grid: rmax > 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("build_grid: alpha must be in (0,1)");

  DiscretizationGrid grid;
  grid.alpha = alpha;
  double v = rmin;
  while (v < rmax * (1.0 - 1e-12)) {
    grid.values.push_back(v);
    v *= 1.0 + alpha;
  }
  grid.values.push_back(rmax);
  return grid;
}

/// Floors each nonzero weight to the largest grid value not exceeding it.
/// Weights below the grid minimum are floored up to it so that every support
/// element keeps a nonzero image.
inline PseudoDistribution discretize_distribution(const Distribution& dist,
                                                  const DiscretizationGrid& grid) {
  std::vector<double> w(dist.weights());
  for (double& x : w) {
    if (x <= 0.0) continue;
    auto it = std::upper_bound(grid.values.begin(), grid.values.end(), x + 1e-15);
    x = (it == grid.values.begin()) ? grid.values.front() : *(it - 1);
  }
  return PseudoDistribution(std::move(w));
}

}  // namespace pml
