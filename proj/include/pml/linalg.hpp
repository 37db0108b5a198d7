#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace pml {

/// Small dense row-major matrix. All level-set computations are desk scale,
/// so no effort is spent on blocking or vectorization.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::vector<double> row_sums() const {
    std::vector<double> s(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) s[i] += (*this)(i, j);
    return s;
  }

  std::vector<double> col_sums() const {
    std::vector<double> s(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) s[j] += (*this)(i, j);
    return s;
  }

  double sum() const {
    double t = 0.0;
    for (double v : a_) t += v;
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
  }

  const std::vector<double>& data() const { return a_; }
  std::vector<double>& data() { return a_; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

/// Basis of the null space of M (one vector per free column), computed by
/// Gaussian elimination with partial pivoting; rank decisions at
/// rel_tol * max|M|. Empty result means full column rank.
inline std::vector<std::vector<double>> null_space_basis(const Matrix& m, double rel_tol) {
  const std::size_t nr = m.rows(), nc = m.cols();
  if (nc == 0) return {};
  const double tol = rel_tol * std::max(1.0, m.max_abs());

  Matrix w = m;
  std::vector<std::size_t> pivot_col;  // pivot column per elimination row
  std::vector<std::size_t> pivot_row;
  std::vector<bool> col_used(nc, false);

  std::size_t r = 0;
  for (std::size_t c = 0; c < nc && r < nr; ++c) {
    std::size_t best = r;
    for (std::size_t i = r; i < nr; ++i)
      if (std::abs(w(i, c)) > std::abs(w(best, c))) best = i;
    if (std::abs(w(best, c)) <= tol) continue;  // free column
    if (best != r)
      for (std::size_t j = 0; j < nc; ++j) std::swap(w(r, j), w(best, j));
    for (std::size_t i = 0; i < nr; ++i) {
      if (i == r) continue;
      const double f = w(i, c) / w(r, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < nc; ++j) w(i, j) -= f * w(r, j);
    }
    pivot_col.push_back(c);
    pivot_row.push_back(r);
    col_used[c] = true;
    ++r;
  }

  std::vector<std::vector<double>> basis;
  for (std::size_t free_col = 0; free_col < nc; ++free_col) {
    if (col_used[free_col]) continue;
    std::vector<double> mu(nc, 0.0);
    mu[free_col] = 1.0;
    for (std::size_t t = 0; t < pivot_col.size(); ++t) {
      const std::size_t pc = pivot_col[t], pr = pivot_row[t];
      mu[pc] = -w(pr, free_col) / w(pr, pc);
    }
    basis.push_back(std::move(mu));
  }
  return basis;
}

/// First null-space vector, or empty when the columns are independent.
inline std::vector<double> null_space_vector(const Matrix& m, double rel_tol) {
  auto basis = null_space_basis(m, rel_tol);
  return basis.empty() ? std::vector<double>{} : std::move(basis.front());
}

}  // namespace pml
