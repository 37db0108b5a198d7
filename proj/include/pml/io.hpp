#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pml/approx_pml.hpp"
#include "pml/bench.hpp"
#include "pml/linalg.hpp"
#include "pml/matrix_round.hpp"
#include "pml/profile.hpp"
#include "pml/pseudo_pml.hpp"

namespace pml {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Sample files: UTF-8, whitespace-separated tokens, one sequence per file.
inline std::vector<DomainId> read_sample_file(const std::string& path,
                                              Tokenizer* tokenizer = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open sample file: " + path);
  Tokenizer local;
  Tokenizer& tok = tokenizer ? *tokenizer : local;
  std::vector<DomainId> seq;
  std::string token;
  while (in >> token) seq.push_back(tok.id_for(token));
  if (seq.empty()) throw std::invalid_argument("empty sample");
  return seq;
}

inline nlohmann::json profile_to_json(const Profile& profile) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : profile.entries())
    entries.push_back({e.frequency, e.count});
  return {{"n", profile.n()}, {"entries", entries}};
}

inline Profile profile_from_json(const nlohmann::json& j) {
  std::vector<ProfileEntry> entries;
  for (const auto& e : j.at("entries"))
    entries.push_back({e.at(0).get<std::uint64_t>(), e.at(1).get<std::uint64_t>()});
  Profile p(std::move(entries));
  if (j.contains("n") && j.at("n").get<std::uint64_t>() != p.n())
    throw std::invalid_argument("profile JSON: n does not match entries");
  return p;
}

inline Profile read_profile_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open profile file: " + path);
  nlohmann::json j;
  in >> j;
  return profile_from_json(j);
}

/// Matrix CSV: first line "rows=R cols=C", then row-major comma-separated
/// values.
inline std::string matrix_to_csv(const Matrix& m) {
  std::ostringstream out;
  out << "rows=" << m.rows() << " cols=" << m.cols() << "\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j)
      out << (j ? "," : "") << format_double(m(i, j));
    out << "\n";
  }
  return out.str();
}

inline Matrix matrix_from_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument("matrix CSV: empty input");
  std::size_t rows = 0, cols = 0;
  if (std::sscanf(header.c_str(), "rows=%zu cols=%zu", &rows, &cols) != 2)
    throw std::invalid_argument("matrix CSV: bad header, expected 'rows=R cols=C'");
  Matrix m(rows, cols, 0.0);
  std::string line;
  for (std::size_t i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw std::invalid_argument("matrix CSV: missing rows");
    std::istringstream ls(line);
    std::string cell;
    for (std::size_t j = 0; j < cols; ++j) {
      if (!std::getline(ls, cell, ',')) throw std::invalid_argument("matrix CSV: missing cells");
      m(i, j) = std::stod(cell);
    }
  }
  return m;
}

inline Matrix read_matrix_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open matrix file: " + path);
  return matrix_from_csv(in);
}

inline nlohmann::json distribution_to_json(const Distribution& dist) {
  nlohmann::json weights = nlohmann::json::array();
  for (double w : dist.weights()) weights.push_back(w);
  return {{"weights", weights}};
}

inline nlohmann::json rounding_result_to_json(const RoundingResult& res) {
  return {{"total_change", res.total_change},
          {"certificate",
           {{"dominated", res.certificate.dominated},
            {"integral_rows", res.certificate.integral_rows},
            {"integral_cols", res.certificate.integral_cols},
            {"zeros_preserved", res.certificate.zeros_preserved},
            {"ok", res.certificate.ok()}}}};
}

inline nlohmann::json estimator_report_to_json(const EstimatorReport& rep) {
  return {{"estimate", rep.estimate},
          {"pml_part", rep.pml_part},
          {"empirical_part", rep.empirical_part},
          {"bias_correction", rep.bias_correction},
          {"subset_size", rep.subset_size},
          {"n1", rep.n1}};
}

/// Solver trace as JSON lines: {"iteration":..,"log_g":..,"gap":..} per line.
inline std::string solver_trace_to_json_lines(const std::vector<SolverStep>& steps) {
  std::ostringstream out;
  for (const auto& s : steps) {
    nlohmann::json j{{"iteration", s.iteration}, {"log_g", s.log_g_value}, {"gap", s.gap}};
    out << j.dump() << "\n";
  }
  return out.str();
}

inline std::string rmse_table_to_csv(const RmseTable& table) {
  std::ostringstream out;
  out << "estimator,n,rmse,mean_abs_err,runtime_ms\n";
  for (const auto& r : table.rows)
    out << r.estimator << "," << r.n << "," << format_double(r.rmse) << ","
        << format_double(r.mean_abs_err) << "," << format_double(r.runtime_ms) << "\n";
  return out.str();
}

inline nlohmann::json rmse_table_to_json(const RmseTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows)
    rows.push_back({{"estimator", r.estimator},
                    {"n", r.n},
                    {"rmse", r.rmse},
                    {"mean_abs_err", r.mean_abs_err},
                    {"runtime_ms", r.runtime_ms}});
  return {{"rows", rows}};
}

}  // namespace pml
