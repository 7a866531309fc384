// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <numeric>

#include "cktkit/ordering.hpp"

namespace cktkit {

namespace {

// Recursive bisection over subsets of a fixed symmetric graph. Membership of
// the current subset is tested through a stamp array so the adjacency is
// never copied.
struct Dissector {
  const SparseMatrix& g;
  index_t leaf;
  std::vector<index_t> group;
  index_t next_group = 0;

  std::vector<std::uint32_t> in_set;
  std::uint32_t set_stamp = 0;
  std::vector<index_t> bfs_level;
  std::vector<index_t> queue;
  std::vector<char> side;  // 0 = part A, 1 = part B (valid for current subset)

  explicit Dissector(const SparseMatrix& graph, index_t leaf_threshold)
      : g(graph), leaf(leaf_threshold) {
    group.assign(g.n, 0);
    in_set.assign(g.n, 0);
    bfs_level.assign(g.n, -1);
    side.assign(g.n, 0);
  }

  void stamp_set(const std::vector<index_t>& verts) {
    ++set_stamp;
    for (const index_t v : verts) in_set[v] = set_stamp;
  }

  bool member(index_t v) const { return in_set[v] == set_stamp; }

  // BFS from r within the current subset; fills bfs_level for reached
  // vertices and returns them in discovery order.
  std::vector<index_t> bfs(index_t r, const std::vector<index_t>& verts) {
    for (const index_t v : verts) bfs_level[v] = -1;
    std::vector<index_t> order;
    order.reserve(verts.size());
    bfs_level[r] = 0;
    order.push_back(r);
    for (std::size_t h = 0; h < order.size(); ++h) {
      const index_t v = order[h];
      for (index_t p = g.row_ptr[v]; p < g.row_ptr[v + 1]; ++p) {
        const index_t w = g.col_idx[p];
        if (w == v || !member(w) || bfs_level[w] >= 0) continue;
        bfs_level[w] = bfs_level[v] + 1;
        order.push_back(w);
      }
    }
    return order;
  }

  index_t pseudo_peripheral(const std::vector<index_t>& verts) {
    index_t r = verts[0];
    for (int pass = 0; pass < 2; ++pass) {
      auto order = bfs(r, verts);
      index_t best = r, best_lv = -1;
      for (const index_t v : order)
        if (bfs_level[v] > best_lv || (bfs_level[v] == best_lv && v < best)) {
          best = v;
          best_lv = bfs_level[v];
        }
      r = best;
    }
    return r;
  }

  void dissect(std::vector<index_t> verts) {
    const index_t m = static_cast<index_t>(verts.size());
    if (m == 0) return;
    if (m <= leaf) {
      const index_t gidx = next_group++;
      for (const index_t v : verts) group[v] = gidx;
      return;
    }

    stamp_set(verts);
    auto comp0 = bfs(pseudo_peripheral(verts), verts);
    if (static_cast<index_t>(comp0.size()) < m) {
      split_components(std::move(verts));
      return;
    }

    // Level-set split: A = shallow levels, minimal prefix holding >= half.
    std::sort(verts.begin(), verts.end());
    index_t max_lv = 0;
    for (const index_t v : verts) max_lv = std::max(max_lv, bfs_level[v]);
    std::vector<index_t> lv_count(max_lv + 1, 0);
    for (const index_t v : verts) ++lv_count[bfs_level[v]];
    index_t cum = 0, cut_lv = 0;
    for (index_t l = 0; l <= max_lv; ++l) {
      cum += lv_count[l];
      if (2 * cum >= m) {
        cut_lv = l;
        break;
      }
    }
    index_t size_a = 0;
    for (const index_t v : verts) {
      side[v] = bfs_level[v] <= cut_lv ? 0 : 1;
      size_a += side[v] == 0;
    }
    index_t size_b = m - size_a;
    if (size_b == 0) {
      // Degenerate split (e.g. a clique); peel the deepest level instead.
      for (const index_t v : verts)
        if (bfs_level[v] == max_lv) {
          side[v] = 1;
          --size_a;
          ++size_b;
        }
      if (size_b == 0 || size_a == 0) {
        const index_t gidx = next_group++;
        for (const index_t v : verts) group[v] = gidx;
        return;
      }
    }

    // One boundary-greedy refinement sweep.
    for (const index_t v : verts) {
      index_t internal = 0, external = 0;
      for (index_t p = g.row_ptr[v]; p < g.row_ptr[v + 1]; ++p) {
        const index_t w = g.col_idx[p];
        if (w == v || !member(w)) continue;
        (side[w] == side[v] ? internal : external) += 1;
      }
      if (external > internal) {
        const index_t from_sz = side[v] == 0 ? size_a : size_b;
        if (4 * (from_sz - 1) >= m) {  // keep both sides at >= 25%
          if (side[v] == 0) {
            side[v] = 1;
            --size_a;
            ++size_b;
          } else {
            side[v] = 0;
            ++size_a;
            --size_b;
          }
        }
      }
    }

    // Separator: the cut's smaller endpoint set; ties prefer shrinking the
    // larger part.
    std::vector<index_t> ea, eb;
    for (const index_t v : verts) {
      bool boundary = false;
      for (index_t p = g.row_ptr[v]; p < g.row_ptr[v + 1] && !boundary; ++p) {
        const index_t w = g.col_idx[p];
        boundary = (w != v && member(w) && side[w] != side[v]);
      }
      if (boundary) (side[v] == 0 ? ea : eb).push_back(v);
    }
    bool take_a;
    if (ea.size() != eb.size())
      take_a = ea.size() < eb.size();
    else
      take_a = size_a >= size_b;
    const std::vector<index_t>& sep = take_a ? ea : eb;

    std::vector<index_t> part_a, part_b, sep_copy(sep);
    ++set_stamp;
    for (const index_t v : sep_copy) in_set[v] = set_stamp;  // reuse as "in separator" mark
    for (const index_t v : verts) {
      if (in_set[v] == set_stamp) continue;
      (side[v] == 0 ? part_a : part_b).push_back(v);
    }

    dissect(std::move(part_a));
    dissect(std::move(part_b));
    if (!sep_copy.empty()) {
      const index_t gidx = next_group++;
      for (const index_t v : sep_copy) group[v] = gidx;
    }
  }

  void split_components(std::vector<index_t> verts) {
    // Gather components, then pack them into two halves balanced by size.
    stamp_set(verts);
    std::vector<std::vector<index_t>> comps;
    ++set_stamp;  // visited mark
    const std::uint32_t visited = set_stamp;
    --set_stamp;  // member tests still use the previous stamp
    std::vector<std::uint32_t> seen(g.n, 0);
    for (const index_t s : verts) {
      if (seen[s] == visited) continue;
      std::vector<index_t> comp;
      comp.push_back(s);
      seen[s] = visited;
      for (std::size_t h = 0; h < comp.size(); ++h) {
        const index_t v = comp[h];
        for (index_t p = g.row_ptr[v]; p < g.row_ptr[v + 1]; ++p) {
          const index_t w = g.col_idx[p];
          if (w == v || !member(w) || seen[w] == visited) continue;
          seen[w] = visited;
          comp.push_back(w);
        }
      }
      comps.push_back(std::move(comp));
    }
    std::sort(comps.begin(), comps.end(),
              [](const auto& x, const auto& y) { return x.size() > y.size(); });
    std::vector<index_t> half0, half1;
    for (auto& c : comps) {
      auto& dst = half0.size() <= half1.size() ? half0 : half1;
      dst.insert(dst.end(), c.begin(), c.end());
    }
    dissect(std::move(half0));
    dissect(std::move(half1));
  }
};

}  // namespace

DissectionInfo nd_dissect(const SparseMatrix& pattern, index_t leaf_threshold) {
  Dissector d(pattern, std::max<index_t>(1, leaf_threshold));
  std::vector<index_t> all(pattern.n);
  std::iota(all.begin(), all.end(), index_t{0});
  d.dissect(std::move(all));
  DissectionInfo info;
  info.group = std::move(d.group);
  info.n_groups = d.next_group;
  return info;
}

Permutation order_nd_cmd(const SparseMatrix& pattern, index_t leaf_threshold) {
  const DissectionInfo info = nd_dissect(pattern, leaf_threshold);
  return mindeg_order(pattern, MdScore::Degree, &info.group);
}

}  // namespace cktkit
