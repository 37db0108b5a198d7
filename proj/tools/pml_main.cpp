// Command-line front end: profile construction, approximate PML, matrix
// rounding, property estimation, and the synthetic benchmark harness.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pml/pml.hpp"

namespace {

void write_output(const std::string& payload, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << payload;
    if (!payload.empty() && payload.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::invalid_argument("cannot open output file: " + out_path);
  out << payload;
}

std::vector<std::uint64_t> parse_size_list(const std::string& csv) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stoull(cell));
  if (out.empty()) throw std::invalid_argument("empty sample-size list");
  return out;
}

std::vector<std::string> parse_name_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"instance-based approximate profile maximum likelihood"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out_path;
  std::string format = "json";
  app.add_option("--seed", seed, "random seed for all stochastic steps");
  app.add_option("--out", out_path, "write the primary output to this file");
  app.add_option("--format", format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  // profile <samples.txt>
  auto* cmd_profile = app.add_subcommand("profile", "tally a sample file into a profile");
  std::string profile_samples;
  cmd_profile->add_option("samples", profile_samples, "whitespace-separated token file")
      ->required();

  // approx-pml <profile.json>
  auto* cmd_approx = app.add_subcommand("approx-pml", "compute an approximate PML distribution");
  std::string approx_profile, approx_algo = "v1", approx_trace;
  double lbound = 0.0, ubound = 1.0;
  cmd_approx->add_option("profile", approx_profile, "profile JSON file")->required();
  cmd_approx->add_option("--algo", approx_algo, "pipeline variant")
      ->check(CLI::IsMember({"v1", "v2"}));
  cmd_approx->add_option("--lbound", lbound, "probability lower bound (v2)");
  cmd_approx->add_option("--ubound", ubound, "probability upper bound (v2)");
  cmd_approx->add_option("--trace", approx_trace, "write the solver trace (JSON lines) here");

  // round-matrix <in.csv>
  auto* cmd_round = app.add_subcommand("round-matrix", "round a matrix to integral margins");
  std::string round_in, round_out;
  cmd_round->add_option("matrix", round_in, "input matrix CSV")->required();
  cmd_round->add_option("--out", round_out, "write the rounded matrix CSV here");

  // estimate entropy|uniformity <samples.txt>
  auto* cmd_estimate = app.add_subcommand("estimate", "estimate a symmetric property");
  std::string est_property, est_samples;
  std::uint64_t est_domain = 0, est_threshold = 18;
  bool strict_split = false;
  cmd_estimate->add_option("property", est_property, "entropy or uniformity")
      ->required()
      ->check(CLI::IsMember({"entropy", "uniformity"}));
  cmd_estimate->add_option("samples", est_samples, "whitespace-separated token file")
      ->required();
  cmd_estimate->add_option("--N", est_domain, "domain size (required for uniformity)");
  cmd_estimate->add_option("--threshold", est_threshold, "entropy frequency threshold");
  cmd_estimate->add_flag("--strict-split", strict_split,
                         "use disjoint halves for selection and estimation");

  // bench
  auto* cmd_bench = app.add_subcommand("bench", "synthetic RMSE benchmark");
  std::string bench_dist = "zipf", bench_sizes = "300,1000,3000",
              bench_estimators = "pseudopml,mle";
  double bench_alpha = 1.0;
  std::uint64_t bench_domain = 1000;
  int bench_trials = 20;
  unsigned bench_threads = 0;
  bool bench_timings = false;
  cmd_bench->add_option("--dist", bench_dist, "uniform, mix2, or zipf")
      ->check(CLI::IsMember({"uniform", "mix2", "zipf"}));
  cmd_bench->add_option("--zipf-alpha", bench_alpha, "Zipf exponent");
  cmd_bench->add_option("--N", bench_domain, "domain size");
  cmd_bench->add_option("--samples", bench_sizes, "comma-separated sample sizes");
  cmd_bench->add_option("--trials", bench_trials, "trials per data point");
  cmd_bench->add_option("--estimators", bench_estimators,
                        "comma-separated: pseudopml, mle, truth");
  cmd_bench->add_option("--threads", bench_threads, "worker threads (0 = auto)");
  cmd_bench->add_flag("--timings", bench_timings,
                      "record wall-clock timings (breaks byte-for-byte determinism)");

  try {
    app.parse(argc, argv);

    if (*cmd_profile) {
      const auto seq = pml::read_sample_file(profile_samples);
      const auto profile = pml::build_profile(seq);
      write_output(pml::profile_to_json(profile).dump(2), out_path);
      return 0;
    }

    if (*cmd_approx) {
      const auto profile = pml::read_profile_file(approx_profile);
      pml::PipelineOptions opts;
      opts.seed = seed;
      opts.solver.record_trace = !approx_trace.empty();
      const auto res = approx_algo == "v1"
                           ? pml::approximate_pml_v1(profile, opts)
                           : pml::approximate_pml_v2(profile, lbound, ubound, opts);
      if (!approx_trace.empty()) {
        std::ofstream tr(approx_trace);
        if (!tr) throw std::invalid_argument("cannot open trace file: " + approx_trace);
        tr << pml::solver_trace_to_json_lines(res.trace.solver_steps);
      }
      write_output(pml::distribution_to_json(res.distribution).dump(2), out_path);
      return 0;
    }

    if (*cmd_round) {
      const auto a = pml::read_matrix_csv_file(round_in);
      const auto res = pml::matrix_round(a, seed);
      if (!round_out.empty()) {
        std::ofstream out(round_out);
        if (!out) throw std::invalid_argument("cannot open output file: " + round_out);
        out << pml::matrix_to_csv(res.rounded);
      }
      std::cout << pml::rounding_result_to_json(res).dump(2) << "\n";
      return 0;
    }

    if (*cmd_estimate) {
      const auto seq = pml::read_sample_file(est_samples);
      pml::EstimatorOptions opts;
      opts.threshold = est_threshold;
      opts.strict_split = strict_split;
      pml::EstimatorReport rep;
      if (est_property == "entropy") {
        rep = pml::estimate_entropy(seq, opts);
      } else {
        if (est_domain == 0)
          throw std::invalid_argument("uniformity estimation needs --N");
        rep = pml::estimate_distance_to_uniformity(seq, est_domain, opts);
      }
      write_output(pml::estimator_report_to_json(rep).dump(2), out_path);
      return 0;
    }

    if (*cmd_bench) {
      pml::TrialConfig config;
      config.distribution = pml::synthetic_kind_from_name(bench_dist);
      config.zipf_alpha = bench_alpha;
      config.domain_size = bench_domain;
      config.sample_sizes = parse_size_list(bench_sizes);
      config.trials = bench_trials;
      config.estimators = parse_name_list(bench_estimators);
      config.seed = seed;
      config.threads = bench_threads;
      config.with_timings = bench_timings;
      const auto table = pml::run_trials(config);
      if (format == "csv")
        write_output(pml::rmse_table_to_csv(table), out_path);
      else
        write_output(pml::rmse_table_to_json(table).dump(2), out_path);
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
