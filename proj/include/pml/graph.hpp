#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pml/common.hpp"

namespace pml {

/// Bipartite multigraph stored as a dense multiplicity table. Unified vertex
/// ids place the left side first: left vertex i is id i, right vertex j is id
/// left_count + j.
struct BipartiteMultigraph {
  std::size_t left_count = 0;
  std::size_t right_count = 0;
  std::vector<std::uint64_t> mult;  // row-major left x right

  BipartiteMultigraph() = default;
  BipartiteMultigraph(std::size_t l, std::size_t r)
      : left_count(l), right_count(r), mult(l * r, 0) {}

  std::uint64_t& multiplicity(std::size_t l, std::size_t r) {
    return mult[l * right_count + r];
  }
  std::uint64_t multiplicity(std::size_t l, std::size_t r) const {
    return mult[l * right_count + r];
  }

  std::size_t vertex_count() const { return left_count + right_count; }

  std::uint64_t degree(std::size_t v) const {
    std::uint64_t d = 0;
    if (v < left_count) {
      for (std::size_t r = 0; r < right_count; ++r) d += multiplicity(v, r);
    } else {
      const std::size_t r = v - left_count;
      for (std::size_t l = 0; l < left_count; ++l) d += multiplicity(l, r);
    }
    return d;
  }

  std::uint64_t edge_count() const {
    std::uint64_t e = 0;
    for (auto m : mult) e += m;
    return e;
  }

  std::uint64_t weight_between(std::size_t u, std::size_t v) const {
    if (u > v) std::swap(u, v);
    if (u < left_count && v >= left_count) return multiplicity(u, v - left_count);
    return 0;
  }
};

/// A cut: one side of the vertex partition together with the number of
/// crossing edges (multiplicities counted).
struct CutSet {
  std::vector<std::uint32_t> side;
  std::uint64_t crossing_edges = 0;
};

namespace detail {

/// Stoer-Wagner global minimum cut on the induced subgraph over `verts`
/// (unified ids). Returns the cut value and fills `side` with one shore.
/// Deterministic; assumes the induced subgraph is connected.
inline std::uint64_t stoer_wagner_min_cut(const BipartiteMultigraph& g,
                                          std::vector<std::uint32_t> verts,
                                          std::vector<std::uint32_t>* side) {
  const std::size_t n0 = verts.size();
  if (n0 < 2) throw std::invalid_argument("min cut needs at least two vertices");

  std::vector<std::vector<std::uint64_t>> w(n0, std::vector<std::uint64_t>(n0, 0));
  for (std::size_t a = 0; a < n0; ++a)
    for (std::size_t b = a + 1; b < n0; ++b)
      w[a][b] = w[b][a] = g.weight_between(verts[a], verts[b]);

  std::vector<std::vector<std::uint32_t>> groups(n0);
  for (std::size_t a = 0; a < n0; ++a) groups[a] = {verts[a]};
  std::vector<std::size_t> alive(n0);
  for (std::size_t a = 0; a < n0; ++a) alive[a] = a;

  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint32_t> best_side;

  while (alive.size() > 1) {
    // maximum adjacency order
    std::vector<std::uint64_t> conn(n0, 0);
    std::vector<bool> added(n0, false);
    std::size_t prev = alive[0], last = alive[0];
    added[alive[0]] = true;
    for (std::size_t a : alive)
      if (a != alive[0]) conn[a] = w[alive[0]][a];
    for (std::size_t step = 1; step < alive.size(); ++step) {
      std::size_t pick = n0;
      for (std::size_t a : alive)
        if (!added[a] && (pick == n0 || conn[a] > conn[pick])) pick = a;
      added[pick] = true;
      prev = last;
      last = pick;
      for (std::size_t a : alive)
        if (!added[a]) conn[a] += w[pick][a];
    }
    const std::uint64_t cut_of_phase = conn[last];
    if (cut_of_phase < best) {
      best = cut_of_phase;
      best_side = groups[last];
    }
    // merge last into prev
    for (std::size_t a : alive) {
      if (a == last || a == prev) continue;
      w[prev][a] += w[last][a];
      w[a][prev] = w[prev][a];
    }
    groups[prev].insert(groups[prev].end(), groups[last].begin(), groups[last].end());
    alive.erase(std::find(alive.begin(), alive.end(), last));
  }

  if (side) *side = std::move(best_side);
  return best;
}

/// Connected components of the induced subgraph over `verts`.
inline std::vector<std::vector<std::uint32_t>> components_of(
    const BipartiteMultigraph& g, const std::vector<std::uint32_t>& verts) {
  std::vector<std::vector<std::uint32_t>> comps;
  std::vector<bool> seen(g.vertex_count(), true);
  for (auto v : verts) seen[v] = false;
  for (auto v : verts) {
    if (seen[v]) continue;
    std::vector<std::uint32_t> comp, stack{v};
    seen[v] = true;
    while (!stack.empty()) {
      const std::uint32_t u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (auto x : verts)
        if (!seen[x] && g.weight_between(u, x) > 0) {
          seen[x] = true;
          stack.push_back(x);
        }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

}  // namespace detail

/// Global minimum cut of the whole (connected) graph.
inline std::uint64_t global_min_cut(const BipartiteMultigraph& g,
                                    std::vector<std::uint32_t>* side = nullptr) {
  std::vector<std::uint32_t> verts(g.vertex_count());
  for (std::size_t v = 0; v < verts.size(); ++v) verts[v] = static_cast<std::uint32_t>(v);
  return detail::stoer_wagner_min_cut(g, std::move(verts), side);
}

struct DecompositionResult {
  std::vector<std::vector<std::uint32_t>> components;
  std::uint64_t removed_edges = 0;
  BipartiteMultigraph residual;  // input graph minus the removed cut edges
};

/// Repeatedly removes cuts smaller than `threshold` until every remaining
/// component is threshold-edge-connected or a single vertex.
inline DecompositionResult decompose_highly_connected(const BipartiteMultigraph& g,
                                                      std::uint64_t threshold) {
  if (threshold < 1) throw std::invalid_argument("decompose: threshold must be >= 1");
  DecompositionResult out;
  out.residual = g;

  std::vector<std::uint32_t> all(g.vertex_count());
  for (std::size_t v = 0; v < all.size(); ++v) all[v] = static_cast<std::uint32_t>(v);
  std::vector<std::vector<std::uint32_t>> work = detail::components_of(out.residual, all);

  while (!work.empty()) {
    std::vector<std::uint32_t> comp = std::move(work.back());
    work.pop_back();
    if (comp.size() == 1) {
      out.components.push_back(std::move(comp));
      continue;
    }
    std::vector<std::uint32_t> side;
    const std::uint64_t cut = detail::stoer_wagner_min_cut(out.residual, comp, &side);
    if (cut >= threshold) {
      out.components.push_back(std::move(comp));
      continue;
    }
    std::vector<bool> in_side(out.residual.vertex_count(), false);
    for (auto v : side) in_side[v] = true;
    for (auto u : comp)
      for (auto v : comp) {
        if (u >= v || in_side[u] == in_side[v]) continue;
        const std::size_t lu = std::min<std::size_t>(u, v), rv = std::max<std::size_t>(u, v);
        if (lu < out.residual.left_count && rv >= out.residual.left_count) {
          out.removed_edges += out.residual.multiplicity(lu, rv - out.residual.left_count);
          out.residual.multiplicity(lu, rv - out.residual.left_count) = 0;
        }
      }
    for (auto& piece : detail::components_of(out.residual, comp))
      work.push_back(std::move(piece));
  }

  std::sort(out.components.begin(), out.components.end());
  return out;
}

/// Every cut with at most `size_bound` crossing edges, by exhaustive subset
/// enumeration. Each unordered partition appears once, keyed by the side
/// containing vertex 0. Desk scale only.
inline std::vector<CutSet> enumerate_small_cuts(const BipartiteMultigraph& g,
                                                std::uint64_t size_bound) {
  const std::size_t n = g.vertex_count();
  if (n > 20) throw std::invalid_argument("enumeration scale exceeded");
  if (n < 2) throw std::invalid_argument("enumerate_small_cuts: need >= 2 vertices");
  {
    std::vector<std::uint32_t> all(n);
    for (std::size_t v = 0; v < n; ++v) all[v] = static_cast<std::uint32_t>(v);
    if (detail::components_of(g, all).size() != 1)
      throw std::invalid_argument("enumerate_small_cuts: graph must be connected");
  }

  std::vector<CutSet> cuts;
  const std::uint64_t limit = 1ull << (n - 1);
  for (std::uint64_t mask = 0; mask + 1 < limit; ++mask) {
    const std::uint64_t side_mask = (mask << 1) | 1ull;  // vertex 0 always inside
    std::uint64_t crossing = 0;
    for (std::size_t l = 0; l < g.left_count; ++l)
      for (std::size_t r = 0; r < g.right_count; ++r) {
        const bool a = (side_mask >> l) & 1ull;
        const bool b = (side_mask >> (g.left_count + r)) & 1ull;
        if (a != b) crossing += g.multiplicity(l, r);
      }
    if (crossing <= size_bound) {
      CutSet c;
      c.crossing_edges = crossing;
      for (std::size_t v = 0; v < n; ++v)
        if ((side_mask >> v) & 1ull) c.side.push_back(static_cast<std::uint32_t>(v));
      cuts.push_back(std::move(c));
    }
  }
  return cuts;
}

}  // namespace pml
