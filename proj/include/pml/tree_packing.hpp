#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "pml/graph.hpp"

namespace pml {

struct PackedEdge {
  std::uint32_t left = 0;   // left vertex id
  std::uint32_t right = 0;  // right vertex id (not unified)
  friend bool operator==(const PackedEdge&, const PackedEdge&) = default;
};

namespace detail {

struct DisjointSet {
  std::vector<std::uint32_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0u);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); }
};

}  // namespace detail

/// Packs `count` edge-disjoint spanning trees into the (connected) multigraph
/// via matroid-union augmentation on the graphic matroid: greedy insertion
/// first, exchange-path search when an edge is blocked in every forest.
/// Requires min cut >= 2*count (tree-packing sufficiency); violations raise an
/// error quoting a witness cut.
inline std::vector<std::vector<PackedEdge>> pack_spanning_trees(
    const BipartiteMultigraph& g, std::size_t count) {
  if (count < 1) throw std::invalid_argument("pack_spanning_trees: count must be >= 1");
  const std::size_t nv = g.vertex_count();
  if (nv < 2) throw std::invalid_argument("pack_spanning_trees: need >= 2 vertices");

  // Expand edge copies; more than `count` parallel copies of a pair can never
  // be used (a forest holds at most one). Copies are streamed round-robin
  // over the pairs so the greedy pass grows diverse forests instead of
  // stacking parallel edges.
  struct Copy {
    std::uint32_t u, w;  // unified ids
    std::uint32_t pair;
    int forest = -1;
  };
  std::vector<Copy> copies;
  std::uint64_t max_copies = 0;
  for (std::size_t l = 0; l < g.left_count; ++l)
    for (std::size_t r = 0; r < g.right_count; ++r)
      max_copies = std::max<std::uint64_t>(
          max_copies, std::min<std::uint64_t>(g.multiplicity(l, r), count));
  for (std::uint64_t t = 0; t < max_copies; ++t)
    for (std::size_t l = 0; l < g.left_count; ++l)
      for (std::size_t r = 0; r < g.right_count; ++r)
        if (t < std::min<std::uint64_t>(g.multiplicity(l, r), count))
          copies.push_back({static_cast<std::uint32_t>(l),
                            static_cast<std::uint32_t>(g.left_count + r),
                            static_cast<std::uint32_t>(l * g.right_count + r), -1});

  std::vector<detail::DisjointSet> dsu(count, detail::DisjointSet(nv));
  // adjacency per forest: vertex -> list of (neighbor, copy index)
  std::vector<std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>>> adj(
      count, std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>>(nv));
  std::vector<std::size_t> forest_size(count, 0);
  std::size_t complete = 0;

  auto insert_edge = [&](std::size_t f, std::uint32_t e) {
    adj[f][copies[e].u].push_back({copies[e].w, e});
    adj[f][copies[e].w].push_back({copies[e].u, e});
    copies[e].forest = static_cast<int>(f);
    if (++forest_size[f] == nv - 1) ++complete;
  };
  auto remove_edge = [&](std::size_t f, std::uint32_t e) {
    auto strip = [&](std::uint32_t v) {
      auto& lst = adj[f][v];
      for (std::size_t i = 0; i < lst.size(); ++i)
        if (lst[i].second == e) {
          lst[i] = lst.back();
          lst.pop_back();
          return;
        }
    };
    strip(copies[e].u);
    strip(copies[e].w);
    copies[e].forest = -1;
    if (forest_size[f]-- == nv - 1) --complete;
  };
  auto rebuild_dsu = [&](std::size_t f) {
    dsu[f] = detail::DisjointSet(nv);
    for (std::size_t v = 0; v < nv; ++v)
      for (auto [w, e] : adj[f][v])
        if (v < w) dsu[f].unite(static_cast<std::uint32_t>(v), w);
  };
  // Path between a and b inside forest f, as copy indices; empty if
  // disconnected.
  auto forest_path = [&](std::size_t f, std::uint32_t a, std::uint32_t b) {
    std::vector<int> via(nv, -1);
    std::vector<std::uint32_t> via_edge(nv, 0);
    std::deque<std::uint32_t> q{a};
    via[a] = static_cast<int>(a);
    while (!q.empty() && via[b] < 0) {
      const std::uint32_t x = q.front();
      q.pop_front();
      for (auto [y, e] : adj[f][x])
        if (via[y] < 0) {
          via[y] = static_cast<int>(x);
          via_edge[y] = e;
          q.push_back(y);
        }
    }
    std::vector<std::uint32_t> path;
    if (via[b] < 0) return path;
    for (std::uint32_t x = b; x != a; x = static_cast<std::uint32_t>(via[x]))
      path.push_back(via_edge[x]);
    return path;
  };

  auto try_augment = [&](std::uint32_t e0) {
    std::vector<int> parent_edge(copies.size(), -1);
    std::vector<bool> visited(copies.size(), false);
    std::deque<std::uint32_t> q{e0};
    visited[e0] = true;
    while (!q.empty()) {
      const std::uint32_t x = q.front();
      q.pop_front();
      for (std::size_t f = 0; f < count; ++f) {
        if (static_cast<int>(f) == copies[x].forest) continue;
        if (dsu[f].find(copies[x].u) != dsu[f].find(copies[x].w)) {
          // augmenting chain found; cascade the swaps back to e0
          std::uint32_t cur = x;
          std::size_t target = f;
          std::vector<std::size_t> touched{target};
          while (true) {
            const int old_forest = copies[cur].forest;
            if (old_forest >= 0) {
              remove_edge(static_cast<std::size_t>(old_forest), cur);
              touched.push_back(static_cast<std::size_t>(old_forest));
            }
            insert_edge(target, cur);
            if (parent_edge[cur] < 0) break;
            const std::uint32_t nxt = static_cast<std::uint32_t>(parent_edge[cur]);
            target = static_cast<std::size_t>(old_forest);
            cur = nxt;
          }
          for (std::size_t tf : touched) rebuild_dsu(tf);
          return true;
        }
        for (std::uint32_t y : forest_path(f, copies[x].u, copies[x].w))
          if (!visited[y]) {
            visited[y] = true;
            parent_edge[y] = static_cast<int>(x);
            q.push_back(y);
          }
      }
    }
    return false;
  };

  // A copy that cannot be augmented stays unaugmentable until the packing
  // changes (matroid monotonicity), so parallel copies share a failure stamp.
  std::uint64_t version = 0;
  std::vector<std::uint64_t> failed_at(g.left_count * g.right_count,
                                       std::numeric_limits<std::uint64_t>::max());
  for (std::uint32_t e = 0; e < copies.size() && complete < count; ++e) {
    bool placed = false;
    for (std::size_t f = 0; f < count && !placed; ++f) {
      if (dsu[f].find(copies[e].u) != dsu[f].find(copies[e].w)) {
        dsu[f].unite(copies[e].u, copies[e].w);
        insert_edge(f, e);
        placed = true;
        ++version;
      }
    }
    if (!placed) {
      if (failed_at[copies[e].pair] == version) continue;
      if (try_augment(e)) ++version;
      else failed_at[copies[e].pair] = version;
    }
  }

  if (complete < count) {
    // Packing failed: the 2*count edge-connectivity precondition must have
    // been violated; report the offending cut.
    std::vector<std::uint32_t> witness;
    const std::uint64_t cut = global_min_cut(g, &witness);
    std::ostringstream msg;
    msg << "pack_spanning_trees: packing impossible, min cut " << cut << " < "
        << 2 * count << "; witness side {";
    for (std::size_t i = 0; i < witness.size(); ++i)
      msg << (i ? "," : "") << witness[i];
    msg << "}";
    throw std::runtime_error(msg.str());
  }

  std::vector<std::vector<PackedEdge>> trees(count);
  for (const auto& c : copies)
    if (c.forest >= 0)
      trees[static_cast<std::size_t>(c.forest)].push_back(
          {c.u, static_cast<std::uint32_t>(c.w - g.left_count)});
  return trees;
}

}  // namespace pml
