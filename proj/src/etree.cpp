// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#include "cktkit/etree.hpp"

#include <algorithm>

#include "cktkit/errors.hpp"

namespace cktkit {

ETree build_etree(const SparseMatrix& a) {
  const index_t n = a.n;
  ETree t;
  t.parent.assign(n, -1);
  std::vector<index_t> ancestor(n, -1);
  std::vector<index_t> prev_row(n, -1);  // last processed row containing each column

  for (index_t k = 0; k < n; ++k) {
    for (index_t p = a.row_ptr[k]; p < a.row_ptr[k + 1]; ++p) {
      index_t i = prev_row[a.col_idx[p]];
      while (i != -1 && i < k) {
        const index_t next = ancestor[i];
        ancestor[i] = k;
        if (next == -1) {
          t.parent[i] = k;
          break;
        }
        i = next;
      }
      prev_row[a.col_idx[p]] = k;
    }
  }

  // Postorder via first-child/next-sibling lists, children visited ascending.
  std::vector<index_t> head(n + 1, -1), next(n, -1);
  for (index_t i = n - 1; i >= 0; --i) {
    const index_t par = t.parent[i] == -1 ? n : t.parent[i];
    next[i] = head[par];
    head[par] = i;
  }
  t.postorder.reserve(n);
  std::vector<index_t> stack;
  for (index_t r = head[n]; r != -1; r = next[r]) {
    stack.push_back(r);
    while (!stack.empty()) {
      const index_t v = stack.back();
      if (head[v] != -1) {
        const index_t c = head[v];
        head[v] = next[c];
        stack.push_back(c);
      } else {
        t.postorder.push_back(v);
        stack.pop_back();
      }
    }
  }
  return t;
}

Levelization levelize_etree(const ETree& t) {
  const index_t n = static_cast<index_t>(t.parent.size());
  Levelization lv;
  lv.level_of.assign(n, 0);
  for (index_t i = 0; i < n; ++i)
    if (t.parent[i] != -1)
      lv.level_of[t.parent[i]] = std::max(lv.level_of[t.parent[i]], lv.level_of[i] + 1);

  lv.n_levels = 0;
  for (index_t i = 0; i < n; ++i) lv.n_levels = std::max(lv.n_levels, lv.level_of[i] + 1);
  if (n == 0) lv.n_levels = 0;

  lv.level_ptr.assign(lv.n_levels + 1, 0);
  for (index_t i = 0; i < n; ++i) ++lv.level_ptr[lv.level_of[i] + 1];
  for (index_t l = 0; l < lv.n_levels; ++l) lv.level_ptr[l + 1] += lv.level_ptr[l];
  lv.level_nodes.resize(n);
  std::vector<index_t> cursor(lv.level_ptr.begin(), lv.level_ptr.end() - 1);
  for (index_t i = 0; i < n; ++i) lv.level_nodes[cursor[lv.level_of[i]]++] = i;
  lv.dividing_level = lv.n_levels;
  return lv;
}

index_t dividing_level(const Levelization& lv, int n_threads, double alpha) {
  const double bound = n_threads * alpha;
  for (index_t l = 0; l < lv.n_levels; ++l)
    if (static_cast<double>(lv.level_size(l)) < bound) return l;
  return lv.n_levels;
}

std::vector<index_t> restart_rows(const ETree& t, const std::vector<char>& finished) {
  const index_t n = static_cast<index_t>(t.parent.size());
  if (static_cast<index_t>(finished.size()) != n)
    throw DimensionError("finish flag array size mismatch");
  std::vector<char> in_set(n, 0);
  for (index_t i = 0; i < n; ++i) {
    if (finished[i]) continue;
    for (index_t x = i; x != -1 && !in_set[x]; x = t.parent[x]) in_set[x] = 1;
  }
  std::vector<index_t> rows;
  for (index_t i = 0; i < n; ++i)
    if (in_set[i]) rows.push_back(i);
  return rows;
}

}  // namespace cktkit
