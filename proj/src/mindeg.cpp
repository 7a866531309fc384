// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cstdint>
#include <queue>
#include <tuple>

#include "cktkit/errors.hpp"
#include "cktkit/ordering.hpp"

namespace cktkit {

namespace {

// Quotient-graph state for one elimination run. Eliminated pivots become
// elements; cliques are represented by element membership instead of explicit
// edges. Indistinguishable variables are merged into supervariables.
struct QuotientGraph {
  index_t n;
  MdScore score_kind;
  const std::vector<index_t>* groups;

  enum State : std::uint8_t { kVariable, kElement, kDead };
  std::vector<State> state;
  std::vector<index_t> sv_size;                 // supervariable weight; 0 once merged
  std::vector<std::vector<index_t>> members;    // merge history, principal first
  std::vector<std::vector<index_t>> adj_var;    // variable neighbours (lazily pruned)
  std::vector<std::vector<index_t>> adj_el;     // adjacent elements (lazily pruned)
  std::vector<std::vector<index_t>> elem_nodes; // element structures
  std::vector<std::int64_t> score;
  std::vector<std::uint32_t> version;

  std::vector<std::uint32_t> mark;       // Lp membership stamps
  std::uint32_t stamp = 0;
  std::vector<std::uint32_t> wstamp;     // element weight-pass stamps
  std::vector<std::int64_t> wval;        // |Le \ Lp| weights

  // (group, score, version, vertex): on equal scores the least recently
  // rescored vertex is eliminated first.
  using Key = std::tuple<index_t, std::int64_t, std::uint32_t, index_t>;
  std::priority_queue<Key, std::vector<Key>, std::greater<Key>> heap;

  explicit QuotientGraph(const SparseMatrix& pattern, MdScore kind,
                         const std::vector<index_t>* grp)
      : n(pattern.n), score_kind(kind), groups(grp) {
    state.assign(n, kVariable);
    sv_size.assign(n, 1);
    members.resize(n);
    adj_var.resize(n);
    adj_el.resize(n);
    elem_nodes.resize(n);
    score.assign(n, 0);
    version.assign(n, 0);
    mark.assign(n, 0);
    wstamp.assign(n, 0);
    wval.assign(n, 0);
    for (index_t v = 0; v < n; ++v) {
      members[v].push_back(v);
      for (index_t p = pattern.row_ptr[v]; p < pattern.row_ptr[v + 1]; ++p)
        if (pattern.col_idx[p] != v) adj_var[v].push_back(pattern.col_idx[p]);
      score[v] = initial_score(v);
      heap.push(key_of(v));
    }
  }

  index_t group_of(index_t v) const { return groups ? (*groups)[v] : 0; }
  Key key_of(index_t v) const { return {group_of(v), score[v], version[v], v}; }

  std::int64_t initial_score(index_t v) const {
    const std::int64_t d = static_cast<std::int64_t>(adj_var[v].size());
    if (score_kind == MdScore::Degree) return d;
    return d * (d - 1) / 2;
  }

  std::int64_t deficiency(std::int64_t d, std::int64_t known_pairs) const {
    return std::max<std::int64_t>(0, d * (d - 1) / 2 - known_pairs);
  }

  // Prunes dead members of element e and returns its live weight.
  std::int64_t prune_element(index_t e) {
    auto& nodes = elem_nodes[e];
    std::int64_t w = 0;
    std::size_t out = 0;
    for (const index_t x : nodes)
      if (state[x] == kVariable && sv_size[x] > 0) {
        nodes[out++] = x;
        w += sv_size[x];
      }
    nodes.resize(out);
    return w;
  }

  void eliminate(index_t p, std::vector<index_t>& order_out) {
    ++stamp;
    mark[p] = stamp;

    // Element structure Lp: live variable neighbours plus live members of
    // adjacent elements.
    std::vector<index_t> lp;
    std::int64_t lp_weight = 0;
    auto add = [&](index_t w) {
      if (mark[w] != stamp && state[w] == kVariable && sv_size[w] > 0) {
        mark[w] = stamp;
        lp.push_back(w);
        lp_weight += sv_size[w];
      }
    };
    for (const index_t w : adj_var[p]) add(w);
    for (const index_t e : adj_el[p]) {
      if (state[e] != kElement) continue;
      for (const index_t w : elem_nodes[e]) add(w);
      state[e] = kDead;  // absorbed into the new element
    }

    // External weights |Le \ Lp| for elements adjacent to Lp members.
    ++stamp;  // separate stamp space for the weight pass marks below
    const std::uint32_t wpass = stamp;
    for (const index_t w : lp) {
      for (const index_t e : adj_el[w]) {
        if (state[e] != kElement) continue;
        if (wstamp[e] != wpass) {
          wstamp[e] = wpass;
          wval[e] = prune_element(e);
        }
        wval[e] -= sv_size[w];
      }
    }
    // Restore the Lp stamp (the weight pass reused the counter, not the marks).
    const std::uint32_t lp_stamp = stamp - 1;

    for (const index_t w : lp) {
      // Prune adj_el: drop dead and fully absorbed elements.
      {
        auto& els = adj_el[w];
        std::size_t out = 0;
        for (const index_t e : els) {
          if (state[e] != kElement) continue;
          if (wstamp[e] == wpass && wval[e] <= 0) {
            state[e] = kDead;
            continue;
          }
          els[out++] = e;
        }
        els.resize(out);
        els.push_back(p);
      }
      // Prune adj_var: drop dead variables and edges covered by the new element.
      std::int64_t var_weight = 0;
      {
        auto& vars = adj_var[w];
        std::size_t out = 0;
        for (const index_t x : vars) {
          if (state[x] != kVariable || sv_size[x] == 0) continue;
          if (mark[x] == lp_stamp) continue;  // inside Lp, covered by element p
          vars[out++] = x;
          var_weight += sv_size[x];
        }
        vars.resize(out);
      }

      std::int64_t d = var_weight + (lp_weight - sv_size[w]);
      std::int64_t known = 0;
      for (const index_t e : adj_el[w]) {
        if (e == p || state[e] != kElement) continue;
        const std::int64_t ext = (wstamp[e] == wpass) ? std::max<std::int64_t>(wval[e], 0) : 0;
        d += ext;
        known += ext * (ext - 1) / 2;
      }
      {
        const std::int64_t covered = lp_weight - sv_size[w];
        known += covered * (covered - 1) / 2;
      }
      score[w] = (score_kind == MdScore::Degree) ? d : deficiency(d, known);
    }

    merge_indistinguishable(lp, lp_stamp);

    std::int64_t live = 0;
    std::size_t out = 0;
    for (const index_t w : lp)
      if (state[w] == kVariable && sv_size[w] > 0) {
        lp[out++] = w;
        live += sv_size[w];
      }
    lp.resize(out);
    (void)live;

    elem_nodes[p] = std::move(lp);
    state[p] = kElement;
    adj_var[p].clear();
    adj_el[p].clear();
    for (const index_t m : members[p]) order_out.push_back(m);

    for (const index_t w : elem_nodes[p]) {
      ++version[w];
      heap.push(key_of(w));
    }
  }

  // Hash Lp members by their list contents; merge exact duplicates
  // (same variable and element adjacency, same group).
  void merge_indistinguishable(std::vector<index_t>& lp, std::uint32_t lp_stamp) {
    (void)lp_stamp;
    if (lp.size() < 2) return;
    std::vector<std::pair<std::uint64_t, index_t>> hashes;
    hashes.reserve(lp.size());
    for (const index_t w : lp) {
      if (state[w] != kVariable || sv_size[w] == 0) continue;
      std::uint64_t h = 0;
      for (const index_t x : adj_var[w])
        if (state[x] == kVariable && sv_size[x] > 0) h += 0x9e3779b97f4a7c15ull * (x + 1);
      for (const index_t e : adj_el[w])
        if (state[e] == kElement) h += 0xc2b2ae3d27d4eb4full * (e + 1);
      hashes.emplace_back(h, w);
    }
    std::sort(hashes.begin(), hashes.end());
    for (std::size_t i = 0; i + 1 < hashes.size(); ++i) {
      const index_t x = hashes[i].second;
      if (state[x] != kVariable || sv_size[x] == 0) continue;
      for (std::size_t k = i + 1; k < hashes.size() && hashes[k].first == hashes[i].first; ++k) {
        const index_t y = hashes[k].second;
        if (state[y] != kVariable || sv_size[y] == 0) continue;
        if (group_of(x) != group_of(y)) continue;
        if (!same_adjacency(x, y)) continue;
        // Merge y into x.
        const std::int64_t wy = sv_size[y];
        sv_size[x] += sv_size[y];
        sv_size[y] = 0;
        state[y] = kDead;
        members[x].insert(members[x].end(), members[y].begin(), members[y].end());
        members[y].clear();
        if (score_kind == MdScore::Degree) score[x] = std::max<std::int64_t>(0, score[x] - wy);
      }
    }
  }

  bool same_adjacency(index_t x, index_t y) {
    auto live_vars = [&](index_t v, std::vector<index_t>& out) {
      out.clear();
      for (const index_t w : adj_var[v])
        if (state[w] == kVariable && sv_size[w] > 0 && w != x && w != y) out.push_back(w);
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
    };
    auto live_els = [&](index_t v, std::vector<index_t>& out) {
      out.clear();
      for (const index_t e : adj_el[v])
        if (state[e] == kElement) out.push_back(e);
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
    };
    std::vector<index_t> ax, ay;
    live_vars(x, ax);
    live_vars(y, ay);
    if (ax != ay) return false;
    live_els(x, ax);
    live_els(y, ay);
    return ax == ay;
  }

  std::vector<index_t> run() {
    std::vector<index_t> order;
    order.reserve(n);
    while (!heap.empty()) {
      const auto [g, s, ver, v] = heap.top();
      heap.pop();
      (void)g;
      (void)s;
      if (state[v] != kVariable || sv_size[v] == 0 || ver != version[v]) continue;
      eliminate(v, order);
    }
    if (static_cast<index_t>(order.size()) != n)
      throw Error("minimum degree ordering lost vertices");
    return order;
  }
};

}  // namespace

Permutation mindeg_order(const SparseMatrix& pattern, MdScore score,
                         const std::vector<index_t>* groups) {
  QuotientGraph qg(pattern, score, groups);
  return Permutation(qg.run());
}

Permutation order_amd(const SparseMatrix& pattern) {
  return mindeg_order(pattern, MdScore::Degree);
}

Permutation order_amf(const SparseMatrix& pattern) {
  return mindeg_order(pattern, MdScore::Deficiency);
}

const char* ordering_method_name(OrderingMethod m) {
  switch (m) {
    case OrderingMethod::AMD: return "AMD";
    case OrderingMethod::AMF: return "AMF";
    case OrderingMethod::ND_CMD: return "ND_CMD";
  }
  return "?";
}

}  // namespace cktkit
