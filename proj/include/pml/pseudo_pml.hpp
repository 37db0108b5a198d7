#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pml/approx_pml.hpp"
#include "pml/profile.hpp"

namespace pml {

/// Inclusive frequency window selecting which elements the PML side handles.
struct FrequencyWindow {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  bool contains(std::uint64_t f) const { return f >= lo && f <= hi; }
};

struct EstimatorReport {
  double estimate = 0.0;
  double pml_part = 0.0;
  double empirical_part = 0.0;
  double bias_correction = 0.0;
  std::uint64_t subset_size = 0;  // |S|
  std::uint64_t n1 = 0;           // estimation-half mass of S
};

struct SplitSelection {
  std::vector<DomainId> subset;                       // S, sorted
  PseudoProfile pseudo_profile;                       // S frequencies in the estimation half
  std::map<DomainId, std::uint64_t> second_half_counts;  // every observed element
  std::uint64_t estimation_length = 0;                // n of the estimation half
};

/// Selects S from the selection half's frequencies and tallies the estimation
/// half restricted to S. With strict = true, the sample is split in two
/// halves (selection first, estimation second); otherwise both roles use the
/// full sample.
inline SplitSelection split_and_select(std::span<const DomainId> samples,
                                       const FrequencyWindow& window,
                                       bool strict = false) {
  if (samples.empty()) throw std::invalid_argument("split_and_select: empty sample");
  if (strict && (samples.size() < 2 || samples.size() % 2 != 0))
    throw std::invalid_argument("split_and_select: strict mode needs an even sample count >= 2");

  const std::size_t half = samples.size() / 2;
  std::span<const DomainId> selection = strict ? samples.subspan(0, half) : samples;
  std::span<const DomainId> estimation = strict ? samples.subspan(half) : samples;

  std::map<DomainId, std::uint64_t> first_counts, second_counts;
  for (DomainId x : selection) ++first_counts[x];
  for (DomainId x : estimation) ++second_counts[x];

  SplitSelection out;
  out.second_half_counts = second_counts;
  out.estimation_length = estimation.size();

  std::map<DomainId, std::uint64_t> universe = first_counts;
  for (const auto& [x, c] : second_counts) universe.try_emplace(x, 0);
  for (const auto& [x, c] : universe) {
    const std::uint64_t f = first_counts.count(x) ? first_counts[x] : 0;
    if (window.contains(f)) out.subset.push_back(x);
  }

  std::map<std::uint64_t, std::uint64_t> mult;
  for (DomainId x : out.subset) {
    const auto it = second_counts.find(x);
    if (it != second_counts.end() && it->second > 0) ++mult[it->second];
  }
  for (const auto& [m, phi] : mult) out.pseudo_profile.entries.push_back({m, phi});
  out.pseudo_profile.n = estimation.size();
  out.pseudo_profile.subset_size = out.subset.size();
  return out;
}

struct EstimatorOptions {
  std::uint64_t threshold = 18;  // entropy window: frequencies 0..threshold
  double c = 1.0;                // constant inside windows and intervals
  bool strict_split = false;
  SolveOptions solver;
  std::optional<DiscretizationGrid> grid;  // explicit pipeline grid
  bool coarse_grid = true;  // small practical grid sized a bit above k
};

namespace detail {

inline DiscretizationGrid practical_grid(const Profile& restricted, double lo, double hi,
                                         const EstimatorOptions& opts) {
  if (opts.grid) return *opts.grid;
  if (lo >= hi) return DiscretizationGrid{{lo}, 0.0};
  if (!opts.coarse_grid) {
    const double a = std::min(
        0.9, std::max(1e-3, static_cast<double>(restricted.distinct_count()) /
                                static_cast<double>(restricted.n())));
    return build_grid(restricted.n(), a, lo, hi);
  }
  const std::size_t levels =
      std::max<std::size_t>(restricted.distinct_count() + 4, 12);
  double a = std::pow(hi / lo, 1.0 / static_cast<double>(levels - 1)) - 1.0;
  a = std::min(0.95, std::max(1e-6, a));
  DiscretizationGrid g;
  g.alpha = a;
  double v = lo;
  while (v < hi * (1.0 - 1e-12)) {
    g.values.push_back(v);
    v *= 1.0 + a;
  }
  g.values.push_back(hi);
  return g;
}

}  // namespace detail

/// PML on the S-restricted profile: solve over the probability interval, then
/// scale every weight by n1/n. The returned weights carry total mass exactly
/// n1/n (zero slots when the pseudo-profile is empty).
inline std::vector<double> pml_on_subset(const PseudoProfile& pseudo_profile,
                                         double lo_p, double hi_p,
                                         const EstimatorOptions& opts = {}) {
  if (!(lo_p > 0.0 && lo_p <= hi_p))
    throw std::invalid_argument("pml_on_subset: need 0 < lo_p <= hi_p");
  if (pseudo_profile.entries.empty()) return {};
  Profile restricted(pseudo_profile.entries);
  const double scale = static_cast<double>(restricted.n()) /
                       static_cast<double>(pseudo_profile.n);

  PipelineOptions popts;
  popts.solver = opts.solver;
  popts.grid = detail::practical_grid(restricted, lo_p, hi_p, opts);
  const auto res = approximate_pml_v2(restricted, lo_p, hi_p, popts);

  std::vector<double> w = res.distribution.weights();
  for (double& x : w) x *= scale;
  return w;
}

/// Entropy via the windowed split: PML handles frequencies <= threshold,
/// the plug-in with a Miller-Madow style correction handles the rest.
inline EstimatorReport estimate_entropy(std::span<const DomainId> samples,
                                        const EstimatorOptions& opts = {}) {
  const FrequencyWindow window{0, opts.threshold};
  const auto sel = split_and_select(samples, window, opts.strict_split);
  const double n = static_cast<double>(sel.estimation_length);

  EstimatorReport rep;
  rep.subset_size = sel.subset.size();
  rep.n1 = sel.pseudo_profile.subset_sample_count();

  const double lo_p = 1.0 / (2.0 * n * n);
  const double hi_p =
      std::min(1.0, std::max(lo_p, 2.0 * opts.c * std::log(std::max(2.0, n)) / n));
  for (double w : pml_on_subset(sel.pseudo_profile, lo_p, hi_p, opts))
    rep.pml_part -= xlogx(w);

  std::uint64_t kbar = 0;
  double mass_bar = 0.0;
  for (const auto& [x, cnt] : sel.second_half_counts) {
    if (cnt == 0) continue;
    if (std::binary_search(sel.subset.begin(), sel.subset.end(), x)) continue;
    const double p = static_cast<double>(cnt) / n;
    rep.empirical_part -= xlogx(p);
    ++kbar;
    mass_bar += p;
  }
  if (kbar > 0)
    rep.bias_correction = (static_cast<double>(kbar) - mass_bar) / (2.0 * n);

  rep.estimate = rep.pml_part + rep.empirical_part + rep.bias_correction;
  return rep;
}

/// Distance to uniformity over a known domain size N. The window tracks the
/// expected frequency band n/N +- sqrt(c n log n / N); unseen domain slots
/// contribute |0 - 1/N| deterministically on the side that owns frequency 0.
inline EstimatorReport estimate_distance_to_uniformity(std::span<const DomainId> samples,
                                                       std::uint64_t domain_size,
                                                       const EstimatorOptions& opts = {}) {
  if (domain_size < 1)
    throw std::invalid_argument("estimate_distance_to_uniformity: N must be >= 1");
  const double nd = static_cast<double>(opts.strict_split ? samples.size() / 2 : samples.size());
  const double dN = static_cast<double>(domain_size);
  const double band = std::sqrt(opts.c * nd * std::log(std::max(2.0, nd)) / dN);
  const double lo_r = nd / dN - band, hi_r = nd / dN + band;

  FrequencyWindow window{0, 0};
  bool window_empty = hi_r < 0.0 || std::ceil(std::max(0.0, lo_r)) > std::floor(hi_r);
  if (!window_empty) {
    window.lo = static_cast<std::uint64_t>(std::ceil(std::max(0.0, lo_r)));
    window.hi = static_cast<std::uint64_t>(std::floor(hi_r));
  }

  const auto sel = window_empty
                       ? SplitSelection{}
                       : split_and_select(samples, window, opts.strict_split);
  std::map<DomainId, std::uint64_t> all_counts;
  std::uint64_t est_len = samples.size();
  if (window_empty) {
    std::span<const DomainId> estimation =
        opts.strict_split ? samples.subspan(samples.size() / 2) : samples;
    for (DomainId x : estimation) ++all_counts[x];
    est_len = estimation.size();
  } else {
    all_counts = sel.second_half_counts;
    est_len = sel.estimation_length;
  }
  const double n = static_cast<double>(est_len);
  const double uniform_w = 1.0 / dN;

  EstimatorReport rep;
  rep.subset_size = sel.subset.size();
  rep.n1 = sel.pseudo_profile.subset_sample_count();

  const double ib = std::sqrt(2.0 * opts.c * std::log(std::max(2.0, n)) / (n * dN));
  const double lo_p = std::max(1.0 / (2.0 * n * n), uniform_w - ib);
  const double hi_p = std::min(1.0, uniform_w + ib);

  std::size_t atoms = 0;
  if (!window_empty) {
    const auto w = pml_on_subset(sel.pseudo_profile, lo_p, std::max(lo_p, hi_p), opts);
    atoms = w.size();
    for (double x : w) rep.pml_part += std::abs(x - uniform_w);
  }

  std::uint64_t observed_outside = 0;
  for (const auto& [x, cnt] : all_counts) {
    if (cnt == 0) continue;
    if (!window_empty &&
        std::binary_search(sel.subset.begin(), sel.subset.end(), x))
      continue;
    rep.empirical_part += std::abs(static_cast<double>(cnt) / n - uniform_w);
    ++observed_outside;
  }

  // never-sampled domain slots
  const std::uint64_t accounted =
      observed_outside + static_cast<std::uint64_t>(atoms);
  if (domain_size > accounted) {
    const double leftover = static_cast<double>(domain_size - accounted) * uniform_w;
    if (!window_empty && window.lo == 0) rep.pml_part += leftover;
    else rep.empirical_part += leftover;
  }

  rep.estimate = rep.pml_part + rep.empirical_part + rep.bias_correction;
  return rep;
}

/// Plug-in entropy plus the Miller-Madow correction (K-1)/(2n); the
/// baseline everything else is compared against.
inline double empirical_entropy_with_correction(std::span<const DomainId> samples) {
  if (samples.empty())
    throw std::invalid_argument("empirical_entropy_with_correction: empty sample");
  std::map<DomainId, std::uint64_t> counts;
  for (DomainId x : samples) ++counts[x];
  const double n = static_cast<double>(samples.size());
  double h = 0.0;
  for (const auto& [x, c] : counts) h -= xlogx(static_cast<double>(c) / n);
  h += (static_cast<double>(counts.size()) - 1.0) / (2.0 * n);
  return h;
}

}  // namespace pml
