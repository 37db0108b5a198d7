#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <random>
#include <stdexcept>
#include <vector>

#include "pml/common.hpp"
#include "pml/graph.hpp"

namespace pml {

/// One edge copy with its assigned direction; to_right means left -> right.
struct OrientedEdge {
  std::uint32_t left = 0;
  std::uint32_t right = 0;  // right-side index, not unified
  bool to_right = true;
};

namespace detail {

inline std::vector<std::pair<std::uint32_t, std::uint32_t>> expand_copies(
    const BipartiteMultigraph& g) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::size_t l = 0; l < g.left_count; ++l)
    for (std::size_t r = 0; r < g.right_count; ++r)
      for (std::uint64_t t = 0; t < g.multiplicity(l, r); ++t)
        edges.push_back({static_cast<std::uint32_t>(l),
                         static_cast<std::uint32_t>(g.left_count + r)});
  return edges;
}

/// Can the residue at v still be met with `remaining` undirected edges? Each
/// remaining edge shifts the imbalance by +-1.
inline bool residue_reachable(std::int64_t need_mod_k, std::int64_t remaining,
                              std::int64_t k) {
  for (std::int64_t d = -remaining; d <= remaining; d += 2)
    if (((d - need_mod_k) % k + k) % k == 0) return true;
  return false;
}

inline bool orient_exact(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                         std::size_t nv, const std::vector<std::uint32_t>& beta,
                         std::uint64_t k, std::vector<bool>& dir) {
  std::vector<std::int64_t> imbalance(nv, 0);
  std::vector<std::int64_t> remaining(nv, 0);
  for (auto [u, w] : edges) {
    ++remaining[u];
    ++remaining[w];
  }
  const std::int64_t ik = static_cast<std::int64_t>(k);

  auto ok = [&](std::size_t v) {
    return residue_reachable(static_cast<std::int64_t>(beta[v]) - imbalance[v],
                             remaining[v], ik);
  };

  auto recurse = [&](auto&& self, std::size_t e) -> bool {
    if (e == edges.size()) return true;
    const auto [u, w] = edges[e];
    --remaining[u];
    --remaining[w];
    for (int choice = 0; choice < 2; ++choice) {
      const bool to_right = choice == 0;
      const int du = to_right ? 1 : -1;
      imbalance[u] += du;
      imbalance[w] -= du;
      if (ok(u) && ok(w) && self(self, e + 1)) {
        dir[e] = to_right;
        imbalance[u] -= du;
        imbalance[w] += du;
        ++remaining[u];
        ++remaining[w];
        return true;
      }
      imbalance[u] -= du;
      imbalance[w] += du;
    }
    ++remaining[u];
    ++remaining[w];
    return false;
  };
  return recurse(recurse, 0);
}

}  // namespace detail

/// Orients every edge copy so that (deg_out - deg_in) mod k == beta(v) at
/// every vertex (beta over unified ids, values in {0..k-1}). Exhaustive search
/// below 25 edge copies; larger instances use directed-path flips, which
/// transfer imbalance in steps of two between vertex pairs, with random
/// directed-cycle perturbations when a path is missing. Throws
/// "orientation search exhausted" when no orientation is found.
inline std::vector<OrientedEdge> orientation_mod_k(const BipartiteMultigraph& g,
                                                   const std::vector<std::uint32_t>& beta,
                                                   std::uint64_t k,
                                                   std::uint64_t seed = 0) {
  const std::size_t nv = g.vertex_count();
  if (k < 1) throw std::invalid_argument("orientation_mod_k: k must be >= 1");
  if (beta.size() != nv) throw std::invalid_argument("orientation_mod_k: beta size mismatch");

  std::uint64_t beta_sum = 0;
  for (auto b : beta) {
    if (b >= k) throw std::invalid_argument("orientation_mod_k: beta out of range");
    beta_sum += b;
  }
  if (beta_sum % k != 0)
    throw std::invalid_argument("orientation_mod_k: beta must sum to 0 mod k");

  auto edges = detail::expand_copies(g);
  std::vector<bool> dir(edges.size(), true);

  auto emit = [&]() {
    std::vector<OrientedEdge> out;
    out.reserve(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e)
      out.push_back({edges[e].first,
                     static_cast<std::uint32_t>(edges[e].second - g.left_count),
                     dir[e]});
    return out;
  };

  if (k == 1) return emit();

  // Parity: an orientation's imbalance matches the degree parity at every
  // vertex, which pins beta's parity when k is even.
  if (k % 2 == 0) {
    for (std::size_t v = 0; v < nv; ++v)
      if ((static_cast<std::uint64_t>(g.degree(v)) + beta[v]) % 2 != 0)
        throw std::runtime_error("orientation search exhausted");
  }

  if (edges.size() <= 24) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    std::vector<bool> sdir(sorted.size(), true);
    if (!detail::orient_exact(sorted, nv, beta, k, sdir))
      throw std::runtime_error("orientation search exhausted");
    // map directions back to the original copy order (copies of a pair are
    // interchangeable, so count per pair suffices)
    std::vector<std::size_t> cursor(sorted.size(), 0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto it = std::lower_bound(sorted.begin(), sorted.end(), edges[e]);
      std::size_t base = static_cast<std::size_t>(it - sorted.begin());
      dir[e] = sdir[base + cursor[base]++];
    }
    return emit();
  }

  // Directed-path repair: flipping a directed path a ~> b moves two units of
  // imbalance from a to b and leaves interior vertices untouched.
  std::mt19937_64 rng(mix_seed(seed, 0x0f1e2d3c));
  const std::int64_t ik = static_cast<std::int64_t>(k);

  std::vector<std::vector<std::uint32_t>> out_adj(nv);
  std::vector<std::int64_t> imbalance(nv, 0);
  auto reset_state = [&]() {
    for (auto& lst : out_adj) lst.clear();
    std::fill(imbalance.begin(), imbalance.end(), 0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      dir[e] = uniform01(rng) < 0.5;
      const auto [u, w] = edges[e];
      const std::uint32_t from = dir[e] ? u : w;
      const std::uint32_t to = dir[e] ? w : u;
      out_adj[from].push_back(static_cast<std::uint32_t>(e));
      imbalance[from] += 1;
      imbalance[to] -= 1;
    }
  };
  auto flip_edge = [&](std::uint32_t e) {
    const auto [u, w] = edges[e];
    const std::uint32_t from = dir[e] ? u : w;
    const std::uint32_t to = dir[e] ? w : u;
    auto& lst = out_adj[from];
    lst.erase(std::find(lst.begin(), lst.end(), e));
    out_adj[to].push_back(e);
    dir[e] = !dir[e];
    imbalance[from] -= 2;
    imbalance[to] += 2;
  };
  auto head_of = [&](std::uint32_t e) { return dir[e] ? edges[e].second : edges[e].first; };
  // Directed path a ~> b in the current orientation; flips it when found.
  auto push = [&](std::uint32_t a, std::uint32_t b) {
    std::vector<std::int32_t> via(nv, -1);
    std::deque<std::uint32_t> q{a};
    via[a] = static_cast<std::int32_t>(edges.size());
    while (!q.empty() && via[b] < 0) {
      const std::uint32_t x = q.front();
      q.pop_front();
      for (std::uint32_t e : out_adj[x]) {
        const std::uint32_t y = head_of(e);
        if (via[y] < 0) {
          via[y] = static_cast<std::int32_t>(e);
          q.push_back(y);
        }
      }
    }
    if (via[b] < 0) return false;
    std::uint32_t x = b;
    while (x != a) {
      const std::uint32_t e = static_cast<std::uint32_t>(via[x]);
      const std::uint32_t tail = dir[e] ? edges[e].first : edges[e].second;
      flip_edge(e);
      x = tail;
    }
    return true;
  };
  auto perturb = [&]() {
    // flip a random directed cycle: residues are untouched
    const std::uint32_t start = static_cast<std::uint32_t>(uniform_below(rng, nv));
    std::vector<std::int32_t> seen(nv, -1);
    std::uint32_t x = start;
    std::vector<std::uint32_t> walk;
    for (std::size_t step = 0; step < 4 * nv; ++step) {
      if (out_adj[x].empty()) return;
      const std::uint32_t e =
          out_adj[x][uniform_below(rng, out_adj[x].size())];
      if (seen[x] >= 0) {
        // close the cycle from first visit of x
        for (std::size_t i = static_cast<std::size_t>(seen[x]); i < walk.size(); ++i)
          flip_edge(walk[i]);
        return;
      }
      seen[x] = static_cast<std::int32_t>(walk.size());
      walk.push_back(e);
      x = head_of(e);
    }
  };

  auto residue_of = [&](std::uint32_t v) {
    return ((static_cast<std::int64_t>(beta[v]) - imbalance[v]) % ik + ik) % ik;
  };

  for (int attempt = 0; attempt < 40; ++attempt) {
    reset_state();
    // Drain one vertex at a time into an accumulator (the busiest remaining
    // vertex); the final accumulator closes automatically because the
    // residues sum to zero mod k.
    bool failed = false;
    while (!failed) {
      std::vector<std::uint32_t> active;
      for (std::size_t v = 0; v < nv; ++v)
        if (residue_of(static_cast<std::uint32_t>(v)) != 0)
          active.push_back(static_cast<std::uint32_t>(v));
      if (active.size() <= 1) break;
      std::uint32_t target = active[0];
      for (auto v : active)
        if (g.degree(v) > g.degree(target)) target = v;
      std::uint32_t donor = active[0] == target ? active[1] : active[0];

      // Either path direction empties the donor with the complementary
      // number of two-unit pushes. Stick with whichever direction last
      // worked: flipping a path exposes its reverse, and alternating would
      // undo every step.
      std::int64_t guard = 6 * ik + 16;
      int prefer = -1;  // -1: target->donor pushes, +1: donor->target pushes
      while (residue_of(donor) != 0 && !failed) {
        if (--guard < 0) {
          failed = true;
          break;
        }
        bool moved;
        if (prefer < 0) {
          moved = push(target, donor);
          if (!moved && push(donor, target)) {
            prefer = 1;
            moved = true;
          }
        } else {
          moved = push(donor, target);
          if (!moved && push(target, donor)) {
            prefer = -1;
            moved = true;
          }
        }
        if (!moved) perturb();
      }
    }
    if (failed) continue;
    bool all_zero = true;
    for (std::size_t v = 0; v < nv; ++v)
      if (residue_of(static_cast<std::uint32_t>(v)) != 0) all_zero = false;
    if (all_zero) return emit();
  }
  throw std::runtime_error("orientation search exhausted");
}

}  // namespace pml
