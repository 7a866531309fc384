// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#include "cktkit/matching.hpp"

#include <cmath>
#include <limits>
#include <queue>

#include "cktkit/errors.hpp"

namespace cktkit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

StaticPivotResult max_weight_matching(const SparseMatrix& a, bool want_scaling) {
  const index_t n = a.n;

  // Arc costs c(i,j) = log(max|row i|) - log|a(i,j)| >= 0. Zero-valued
  // entries are excluded. Minimizing the assignment cost maximizes the
  // product of diagonal magnitudes.
  std::vector<double> cost(a.nnz(), kInf);
  std::vector<double> lmax(n, -kInf);
  for (index_t i = 0; i < n; ++i) {
    for (index_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
      const double av = std::abs(a.values[p]);
      if (av > 0.0 && std::log(av) > lmax[i]) lmax[i] = std::log(av);
    }
    if (lmax[i] == -kInf) throw StructurallySingular("row " + std::to_string(i) + " has no nonzero values");
    for (index_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
      const double av = std::abs(a.values[p]);
      if (av > 0.0) cost[p] = lmax[i] - std::log(av);
    }
  }

  std::vector<double> u(n, 0.0), v(n, 0.0);
  std::vector<index_t> match_col(n, -1), match_row(n, -1);

  for (index_t i = 0; i < n; ++i) {
    double m = kInf;
    for (index_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) m = std::min(m, cost[p]);
    u[i] = m;
  }
  std::vector<double> vmin(n, kInf);
  for (index_t i = 0; i < n; ++i)
    for (index_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
      if (cost[p] < kInf) vmin[a.col_idx[p]] = std::min(vmin[a.col_idx[p]], cost[p] - u[i]);
  for (index_t j = 0; j < n; ++j) v[j] = (vmin[j] == kInf) ? 0.0 : vmin[j];

  // Greedy pass on tight arcs.
  for (index_t i = 0; i < n; ++i) {
    for (index_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
      const index_t j = a.col_idx[p];
      if (cost[p] < kInf && match_row[j] == -1 && cost[p] - u[i] - v[j] <= 0.0) {
        match_col[i] = j;
        match_row[j] = i;
        break;
      }
    }
  }

  // Shortest augmenting path per unmatched row, with dual updates keeping
  // reduced costs nonnegative.
  std::vector<double> dist(n, kInf);
  std::vector<index_t> pred(n, -1);
  std::vector<char> settled(n, 0);
  std::vector<index_t> touched;
  std::vector<index_t> settled_list;
  using QE = std::pair<double, index_t>;
  std::priority_queue<QE, std::vector<QE>, std::greater<QE>> heap;

  for (index_t r = 0; r < n; ++r) {
    if (match_col[r] != -1) continue;

    touched.clear();
    settled_list.clear();
    while (!heap.empty()) heap.pop();

    for (index_t p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) {
      if (cost[p] == kInf) continue;
      const index_t j = a.col_idx[p];
      const double rd = cost[p] - u[r] - v[j];
      if (rd < dist[j]) {
        dist[j] = rd;
        pred[j] = r;
        touched.push_back(j);
        heap.push({rd, j});
      }
    }

    index_t found = -1;
    double delta = kInf;
    while (!heap.empty()) {
      const auto [d, j] = heap.top();
      heap.pop();
      if (settled[j] || d > dist[j]) continue;
      settled[j] = 1;
      settled_list.push_back(j);
      if (match_row[j] == -1) {
        found = j;
        delta = d;
        break;
      }
      const index_t i = match_row[j];
      for (index_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
        if (cost[p] == kInf) continue;
        const index_t j2 = a.col_idx[p];
        if (settled[j2]) continue;
        const double nd = d + cost[p] - u[i] - v[j2];
        if (nd < dist[j2]) {
          dist[j2] = nd;
          pred[j2] = i;
          touched.push_back(j2);
          heap.push({nd, j2});
        }
      }
    }

    if (found == -1) throw StructurallySingular("no perfect matching covers row " + std::to_string(r));

    u[r] += delta;
    for (const index_t j : settled_list) {
      if (j == found) continue;
      const double shift = delta - dist[j];
      u[match_row[j]] += shift;
      v[j] -= shift;
    }

    for (index_t j = found; ; ) {
      const index_t i = pred[j];
      match_row[j] = i;
      const index_t jnext = match_col[i];
      match_col[i] = j;
      if (i == r) break;
      j = jnext;
    }

    for (const index_t j : touched) {
      dist[j] = kInf;
      pred[j] = -1;
      settled[j] = 0;
    }
  }

  StaticPivotResult res;
  res.row_perm = Permutation(std::vector<index_t>(match_row.begin(), match_row.end()));
  res.matched.assign(n, 1);
  if (want_scaling) {
    res.scaling.row_scale.resize(n);
    res.scaling.col_scale.resize(n);
    for (index_t k = 0; k < n; ++k) {
      const index_t i = match_row[k];
      res.scaling.row_scale[k] = std::exp(u[i] - lmax[i]);
      res.scaling.col_scale[k] = std::exp(v[k]);
    }
  } else {
    res.scaling = ScalingPair::ones(n);
  }
  return res;
}

}  // namespace cktkit
