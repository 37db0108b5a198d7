#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "pml/common.hpp"
#include "pml/pseudo_pml.hpp"
#include "pml/sampling.hpp"

namespace pml {

enum class SyntheticKind { uniform, mix2, zipf };

inline SyntheticKind synthetic_kind_from_name(const std::string& name) {
  if (name == "uniform") return SyntheticKind::uniform;
  if (name == "mix2") return SyntheticKind::mix2;
  if (name == "zipf") return SyntheticKind::zipf;
  throw std::invalid_argument("unknown distribution kind: " + name);
}

/// Synthetic benchmark distributions: uniform; a two-uniform mixture with
/// half the mass on the first N/10 symbols and half on the rest; Zipf with
/// weight 1/i^alpha.
inline Distribution make_distribution(SyntheticKind kind, std::size_t domain_size,
                                      double alpha = 1.0) {
  if (domain_size < 1) throw std::invalid_argument("make_distribution: N must be >= 1");
  std::vector<double> w(domain_size, 0.0);
  switch (kind) {
    case SyntheticKind::uniform: {
      for (double& x : w) x = 1.0 / static_cast<double>(domain_size);
      break;
    }
    case SyntheticKind::mix2: {
      if (domain_size < 10) throw std::invalid_argument("make_distribution: mix2 needs N >= 10");
      const std::size_t head = domain_size / 10;
      for (std::size_t i = 0; i < head; ++i) w[i] = 0.5 / static_cast<double>(head);
      for (std::size_t i = head; i < domain_size; ++i)
        w[i] = 0.5 / static_cast<double>(domain_size - head);
      break;
    }
    case SyntheticKind::zipf: {
      double z = 0.0;
      for (std::size_t i = 0; i < domain_size; ++i) {
        w[i] = 1.0 / std::pow(static_cast<double>(i + 1), alpha);
        z += w[i];
      }
      for (double& x : w) x /= z;
      break;
    }
  }
  return Distribution(std::move(w));
}

inline double true_entropy(const Distribution& dist) {
  double h = 0.0;
  for (double w : dist.weights()) h -= xlogx(w);
  return h;
}

struct TrialConfig {
  SyntheticKind distribution = SyntheticKind::zipf;
  double zipf_alpha = 1.0;
  std::size_t domain_size = 1000;
  std::vector<std::uint64_t> sample_sizes = {300, 1000, 3000};
  int trials = 20;
  std::vector<std::string> estimators = {"pseudopml", "mle"};  // also: "truth"
  std::uint64_t seed = 1;
  EstimatorOptions estimator;
  unsigned threads = 0;       // 0: hardware concurrency
  bool with_timings = false;  // keep runtime_ms at 0 for reproducible output
};

struct TrialRow {
  std::string estimator;
  std::uint64_t n = 0;
  double rmse = 0.0;
  double mean_abs_err = 0.0;
  double runtime_ms = 0.0;
};

struct RmseTable {
  std::vector<TrialRow> rows;
};

/// Entropy-estimation RMSE harness. Trials fan out over worker threads with
/// per-trial derived seeds; reduction is by trial index, so the table is
/// deterministic for a fixed seed (timings are opt-in and excluded from the
/// deterministic payload by default).
inline RmseTable run_trials(const TrialConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("run_trials: trials must be >= 1");
  const Distribution dist =
      make_distribution(config.distribution, config.domain_size, config.zipf_alpha);
  const double truth = true_entropy(dist);

  struct Cell {
    double err = 0.0;
    double ms = 0.0;
  };
  // errors[estimator][n-index][trial]
  std::vector<std::vector<std::vector<Cell>>> cells(
      config.estimators.size(),
      std::vector<std::vector<Cell>>(config.sample_sizes.size(),
                                     std::vector<Cell>(config.trials)));

  struct Task {
    std::size_t n_idx;
    int trial;
  };
  std::vector<Task> tasks;
  for (std::size_t ni = 0; ni < config.sample_sizes.size(); ++ni)
    for (int t = 0; t < config.trials; ++t) tasks.push_back({ni, t});

  auto run_task = [&](const Task& task) {
    const std::uint64_t n = config.sample_sizes[task.n_idx];
    const std::uint64_t trial_seed =
        mix_seed(config.seed, n * 1000003ull + static_cast<std::uint64_t>(task.trial));
    const auto sample = sample_sequence(dist, n, trial_seed);
    for (std::size_t e = 0; e < config.estimators.size(); ++e) {
      const auto t0 = std::chrono::steady_clock::now();
      double est = 0.0;
      if (config.estimators[e] == "pseudopml")
        est = estimate_entropy(sample, config.estimator).estimate;
      else if (config.estimators[e] == "mle")
        est = empirical_entropy_with_correction(sample);
      else if (config.estimators[e] == "truth")
        est = truth;
      else
        throw std::invalid_argument("run_trials: unknown estimator " + config.estimators[e]);
      const auto t1 = std::chrono::steady_clock::now();
      auto& cell = cells[e][task.n_idx][task.trial];
      cell.err = est - truth;
      cell.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
  };

  unsigned workers = config.threads ? config.threads : std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(tasks.size()));
  if (workers <= 1) {
    for (const auto& t : tasks) run_task(t);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w]() {
        for (std::size_t i = w; i < tasks.size(); i += workers) run_task(tasks[i]);
      });
    for (auto& th : pool) th.join();
  }

  RmseTable table;
  for (std::size_t e = 0; e < config.estimators.size(); ++e)
    for (std::size_t ni = 0; ni < config.sample_sizes.size(); ++ni) {
      TrialRow row;
      row.estimator = config.estimators[e];
      row.n = config.sample_sizes[ni];
      double sq = 0.0, ab = 0.0, ms = 0.0;
      for (const auto& cell : cells[e][ni]) {
        sq += cell.err * cell.err;
        ab += std::abs(cell.err);
        ms += cell.ms;
      }
      row.rmse = std::sqrt(sq / config.trials);
      row.mean_abs_err = ab / config.trials;
      row.runtime_ms = config.with_timings ? ms : 0.0;
      table.rows.push_back(std::move(row));
    }
  return table;
}

}  // namespace pml
