#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pml/graph.hpp"
#include "pml/linalg.hpp"
#include "pml/orientation.hpp"
#include "pml/tree_packing.hpp"

namespace pml {

/// Entrywise floor to the lattice (1/k)Z, returned as integer multiplicities:
/// C_ij / k <= A_ij < (C_ij + 1) / k. Total loss is at most
/// rows * cols / k.
inline Matrix quantize_to_lattice(const Matrix& a, std::uint64_t k) {
  if (k < 1) throw std::invalid_argument("quantize_to_lattice: k must be >= 1");
  Matrix c(a.rows(), a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (!(a(i, j) >= 0.0) || !std::isfinite(a(i, j)))
        throw std::invalid_argument("quantize_to_lattice: entries must be finite and >= 0");
      c(i, j) = std::floor(a(i, j) * static_cast<double>(k) + 1e-9);
    }
  return c;
}

struct ModKResult {
  BipartiteMultigraph kept;          // F, as surviving multiplicities
  std::uint64_t removed_edges = 0;   // |E - F|
};

namespace detail {

/// Exhaustive maximum-|F| search for tiny edge counts: choose how many copies
/// of each pair survive so every degree is 0 mod k.
inline ModKResult mod_k_exact(const BipartiteMultigraph& g, std::uint64_t k) {
  struct Pair {
    std::size_t l, r;
    std::uint64_t mult;
  };
  std::vector<Pair> pairs;
  for (std::size_t l = 0; l < g.left_count; ++l)
    for (std::size_t r = 0; r < g.right_count; ++r)
      if (g.multiplicity(l, r) > 0) pairs.push_back({l, r, g.multiplicity(l, r)});

  // last pair index touching each vertex, for residue pruning
  std::vector<std::size_t> last_left(g.left_count, 0), last_right(g.right_count, 0);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    last_left[pairs[p].l] = p;
    last_right[pairs[p].r] = p;
  }

  std::vector<std::uint64_t> deg(g.vertex_count(), 0);
  std::vector<std::uint64_t> kept(pairs.size(), 0), best_kept;
  std::uint64_t best = 0;
  bool found = false;

  std::vector<std::uint64_t> suffix(pairs.size() + 1, 0);
  for (std::size_t p = pairs.size(); p-- > 0;) suffix[p] = suffix[p + 1] + pairs[p].mult;

  auto recurse = [&](auto&& self, std::size_t p, std::uint64_t total) -> void {
    if (found && total + suffix[p] <= best) return;
    if (p == pairs.size()) {
      if (!found || total > best) {
        best = total;
        best_kept = kept;
        found = true;
      }
      return;
    }
    const auto& pr = pairs[p];
    for (std::uint64_t c = pr.mult + 1; c-- > 0;) {
      deg[pr.l] += c;
      deg[g.left_count + pr.r] += c;
      kept[p] = c;
      const bool left_ok = last_left[pr.l] != p || deg[pr.l] % k == 0;
      const bool right_ok = last_right[pr.r] != p || deg[g.left_count + pr.r] % k == 0;
      if (left_ok && right_ok) self(self, p + 1, total + c);
      deg[pr.l] -= c;
      deg[g.left_count + pr.r] -= c;
    }
    kept[p] = 0;
  };
  recurse(recurse, 0, 0);

  ModKResult out;
  out.kept = BipartiteMultigraph(g.left_count, g.right_count);
  for (std::size_t p = 0; p < pairs.size(); ++p)
    out.kept.multiplicity(pairs[p].l, pairs[p].r) = best_kept.empty() ? 0 : best_kept[p];
  out.removed_edges = g.edge_count() - out.kept.edge_count();
  return out;
}

}  // namespace detail

/// Extracts F <= E with every degree divisible by k and |E - F| <= 9 k |V|:
/// decompose into 6k-edge-connected pieces, pack 3k disjoint spanning trees H
/// per piece, keep everything outside H, and fix the residues inside H via a
/// mod-2k orientation (edges oriented left-to-right survive).
inline ModKResult mod_k_zero_subgraph(const BipartiteMultigraph& g, std::uint64_t k,
                                      std::uint64_t seed = 0) {
  if (k < 1) throw std::invalid_argument("mod_k_zero_subgraph: k must be >= 1");
  ModKResult out;
  out.kept = g;
  if (k == 1) return out;

  bool all_zero = true;
  for (std::size_t v = 0; v < g.vertex_count() && all_zero; ++v)
    if (g.degree(v) % k != 0) all_zero = false;
  if (all_zero) return out;

  if (g.edge_count() <= 18) return detail::mod_k_exact(g, k);

  const auto decomp = decompose_highly_connected(g, 6 * k);
  BipartiteMultigraph kept(g.left_count, g.right_count);

  for (const auto& comp : decomp.components) {
    if (comp.size() < 2) continue;
    // induced piece, re-indexed
    std::vector<std::uint32_t> lefts, rights;
    for (auto v : comp)
      (v < g.left_count ? lefts : rights).push_back(v);
    BipartiteMultigraph piece(lefts.size(), rights.size());
    for (std::size_t a = 0; a < lefts.size(); ++a)
      for (std::size_t b = 0; b < rights.size(); ++b)
        piece.multiplicity(a, b) =
            decomp.residual.multiplicity(lefts[a], rights[b] - g.left_count);

    const auto trees = pack_spanning_trees(piece, 3 * k);
    BipartiteMultigraph h(piece.left_count, piece.right_count);
    for (const auto& tree : trees)
      for (const auto& e : tree) ++h.multiplicity(e.left, e.right);

    BipartiteMultigraph hc = piece;  // complement of H inside the piece
    for (std::size_t a = 0; a < piece.left_count; ++a)
      for (std::size_t b = 0; b < piece.right_count; ++b)
        hc.multiplicity(a, b) -= h.multiplicity(a, b);

    // Needed degrees inside H: f(v) = -deg_{H^c}(v) mod k. Encoded as a
    // mod-2k orientation target so that the left-to-right edges of any valid
    // orientation of H realize f on both sides.
    const std::uint64_t k2 = 2 * k;
    std::vector<std::uint32_t> beta(piece.vertex_count(), 0);
    for (std::size_t v = 0; v < piece.vertex_count(); ++v) {
      const std::uint64_t f = (k - hc.degree(v) % k) % k;
      const std::uint64_t degh = h.degree(v);
      if (v < piece.left_count)
        beta[v] = static_cast<std::uint32_t>(((2 * f + k2 - degh % k2) % k2));
      else
        beta[v] = static_cast<std::uint32_t>(((degh % k2 + k2 - (2 * f) % k2) % k2));
    }
    const auto oriented = orientation_mod_k(h, beta, k2, mix_seed(seed, comp.front()));

    for (std::size_t a = 0; a < piece.left_count; ++a)
      for (std::size_t b = 0; b < piece.right_count; ++b)
        kept.multiplicity(lefts[a], rights[b] - g.left_count) += hc.multiplicity(a, b);
    for (const auto& e : oriented)
      if (e.to_right)
        ++kept.multiplicity(lefts[e.left], rights[e.right] - g.left_count);
  }

  out.kept = std::move(kept);
  out.removed_edges = g.edge_count() - out.kept.edge_count();
  return out;
}

struct RoundingCertificate {
  bool dominated = false;       // B <= A entrywise
  bool integral_rows = false;   // row sums of B integral (1e-9)
  bool integral_cols = false;
  bool zeros_preserved = false;

  bool ok() const { return dominated && integral_rows && integral_cols && zeros_preserved; }
};

struct RoundingResult {
  Matrix rounded;
  double total_change = 0.0;
  RoundingCertificate certificate;
};

/// Rounds A down to a matrix with integral row and column sums. The total
/// change is bounded by quantization loss (at most max(s',t')) plus the mod-k
/// edge removals (at most 9(s'+t')), for at most 10 (s'+t') overall, where
/// s',t' count nonzero rows and columns.
inline RoundingResult matrix_round(const Matrix& a, std::uint64_t seed = 0) {
  const std::size_t s = a.rows(), t = a.cols();
  RoundingResult out;
  out.rounded = Matrix(s, t, 0.0);

  std::vector<std::size_t> live_rows, live_cols;
  {
    const auto rs = a.row_sums();
    const auto cs = a.col_sums();
    for (std::size_t i = 0; i < s; ++i)
      if (rs[i] > 0.0) live_rows.push_back(i);
    for (std::size_t j = 0; j < t; ++j)
      if (cs[j] > 0.0) live_cols.push_back(j);
  }

  if (!live_rows.empty()) {
    const std::uint64_t k =
        static_cast<std::uint64_t>(std::min(live_rows.size(), live_cols.size()));
    Matrix sub(live_rows.size(), live_cols.size(), 0.0);
    for (std::size_t i = 0; i < live_rows.size(); ++i)
      for (std::size_t j = 0; j < live_cols.size(); ++j)
        sub(i, j) = a(live_rows[i], live_cols[j]);

    const Matrix c = quantize_to_lattice(sub, k);
    BipartiteMultigraph g(live_rows.size(), live_cols.size());
    for (std::size_t i = 0; i < live_rows.size(); ++i)
      for (std::size_t j = 0; j < live_cols.size(); ++j)
        g.multiplicity(i, j) = static_cast<std::uint64_t>(c(i, j));

    const auto f = mod_k_zero_subgraph(g, k, seed);
    for (std::size_t i = 0; i < live_rows.size(); ++i)
      for (std::size_t j = 0; j < live_cols.size(); ++j)
        out.rounded(live_rows[i], live_cols[j]) =
            static_cast<double>(f.kept.multiplicity(i, j)) / static_cast<double>(k);
  }

  out.total_change = a.sum() - out.rounded.sum();

  auto& cert = out.certificate;
  cert.dominated = true;
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < t; ++j)
      if (out.rounded(i, j) > a(i, j) + 1e-9) cert.dominated = false;
  cert.integral_rows = cert.integral_cols = true;
  for (double v : out.rounded.row_sums())
    if (!near_integer(v, 1e-9)) cert.integral_rows = false;
  for (double v : out.rounded.col_sums())
    if (!near_integer(v, 1e-9)) cert.integral_cols = false;
  cert.zeros_preserved = true;
  {
    const auto rs = a.row_sums();
    const auto cs = a.col_sums();
    const auto rs2 = out.rounded.row_sums();
    const auto cs2 = out.rounded.col_sums();
    for (std::size_t i = 0; i < s; ++i)
      if (rs[i] == 0.0 && rs2[i] != 0.0) cert.zeros_preserved = false;
    for (std::size_t j = 0; j < t; ++j)
      if (cs[j] == 0.0 && cs2[j] != 0.0) cert.zeros_preserved = false;
  }
  return out;
}

}  // namespace pml
