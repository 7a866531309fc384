// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#include "cktkit/sparse.hpp"

#include <algorithm>
#include <numeric>

#include "cktkit/errors.hpp"

namespace cktkit {

Permutation::Permutation(std::vector<index_t> p) : perm(std::move(p)) {
  inverse.assign(perm.size(), -1);
  for (index_t i = 0; i < size(); ++i) inverse[perm[i]] = i;
}

Permutation Permutation::identity(index_t n) {
  std::vector<index_t> p(n);
  std::iota(p.begin(), p.end(), index_t{0});
  return Permutation(std::move(p));
}

bool Permutation::valid() const {
  const index_t n = size();
  if (static_cast<index_t>(inverse.size()) != n) return false;
  std::vector<char> seen(n, 0);
  for (index_t i = 0; i < n; ++i) {
    const index_t p = perm[i];
    if (p < 0 || p >= n || seen[p]) return false;
    seen[p] = 1;
    if (inverse[p] != i) return false;
  }
  return true;
}

Permutation compose(const Permutation& outer, const Permutation& inner) {
  if (outer.size() != inner.size()) throw DimensionError("permutation size mismatch");
  std::vector<index_t> p(outer.size());
  for (index_t i = 0; i < outer.size(); ++i) p[i] = inner.perm[outer.perm[i]];
  return Permutation(std::move(p));
}

ScalingPair ScalingPair::ones(index_t n) {
  ScalingPair s;
  s.row_scale.assign(n, 1.0);
  s.col_scale.assign(n, 1.0);
  return s;
}

bool SparseMatrix::check_invariants() const {
  if (static_cast<index_t>(row_ptr.size()) != n + 1) return false;
  if (row_ptr[0] != 0 || row_ptr[n] != nnz()) return false;
  if (values.size() != col_idx.size()) return false;
  for (index_t i = 0; i < n; ++i) {
    if (row_ptr[i] > row_ptr[i + 1]) return false;
    for (index_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      if (col_idx[p] < 0 || col_idx[p] >= n) return false;
      if (p > row_ptr[i] && col_idx[p] <= col_idx[p - 1]) return false;
    }
  }
  return true;
}

SparseMatrix to_csr(const Triplets& t) {
  if (t.n_rows != t.n_cols) throw DimensionError("matrix is not square");
  const index_t n = t.n_rows;

  SparseMatrix a;
  a.n = n;
  a.row_ptr.assign(n + 1, 0);

  for (const auto& e : t.entries) {
    if (e.row < 0 || e.row >= n || e.col < 0 || e.col >= n)
      throw DimensionError("triplet index out of bounds");
    ++a.row_ptr[e.row + 1];
  }
  for (index_t i = 0; i < n; ++i) a.row_ptr[i + 1] += a.row_ptr[i];

  std::vector<index_t> cols(t.entries.size());
  std::vector<double> vals(t.entries.size());
  std::vector<index_t> next(a.row_ptr.begin(), a.row_ptr.end() - 1);
  for (const auto& e : t.entries) {
    const index_t p = next[e.row]++;
    cols[p] = e.col;
    vals[p] = e.value;
  }

  // Sort each row, then collapse duplicates in place.
  a.col_idx.reserve(cols.size());
  a.values.reserve(vals.size());
  std::vector<index_t> order;
  std::vector<index_t> out_ptr(n + 1, 0);
  for (index_t i = 0; i < n; ++i) {
    const index_t lo = a.row_ptr[i], hi = a.row_ptr[i + 1];
    order.resize(hi - lo);
    std::iota(order.begin(), order.end(), lo);
    std::sort(order.begin(), order.end(),
              [&](index_t x, index_t y) { return cols[x] < cols[y]; });
    for (index_t k = 0; k < static_cast<index_t>(order.size()); ++k) {
      const index_t p = order[k];
      if (!a.col_idx.empty() && static_cast<index_t>(a.col_idx.size()) > out_ptr[i] &&
          a.col_idx.back() == cols[p]) {
        a.values.back() += vals[p];
      } else {
        a.col_idx.push_back(cols[p]);
        a.values.push_back(vals[p]);
      }
    }
    out_ptr[i + 1] = static_cast<index_t>(a.col_idx.size());
  }
  a.row_ptr = std::move(out_ptr);
  return a;
}

SparseMatrix permute(const SparseMatrix& a, const Permutation& row_perm,
                     const Permutation& col_perm) {
  if (row_perm.size() != a.n || col_perm.size() != a.n)
    throw DimensionError("permutation size mismatch");

  SparseMatrix b;
  b.n = a.n;
  b.row_ptr.assign(a.n + 1, 0);
  b.col_idx.resize(a.nnz());
  b.values.resize(a.nnz());

  std::vector<std::pair<index_t, double>> row;
  index_t out = 0;
  for (index_t i = 0; i < a.n; ++i) {
    const index_t src = row_perm.perm[i];
    row.clear();
    for (index_t p = a.row_ptr[src]; p < a.row_ptr[src + 1]; ++p)
      row.emplace_back(col_perm.inverse[a.col_idx[p]], a.values[p]);
    std::sort(row.begin(), row.end());
    for (const auto& [c, v] : row) {
      b.col_idx[out] = c;
      b.values[out] = v;
      ++out;
    }
    b.row_ptr[i + 1] = out;
  }
  return b;
}

SparseMatrix apply_scaling(const SparseMatrix& a, const ScalingPair& s) {
  SparseMatrix b = a;
  for (index_t i = 0; i < a.n; ++i)
    for (index_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
      b.values[p] = s.row_scale[i] * a.values[p] * s.col_scale[a.col_idx[p]];
  return b;
}

SparseMatrix symmetrize_pattern(const SparseMatrix& a) {
  Triplets t;
  t.n_rows = t.n_cols = a.n;
  t.entries.reserve(2 * a.col_idx.size() + a.n);
  for (index_t i = 0; i < a.n; ++i) {
    t.entries.push_back({i, i, 1.0});
    for (index_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
      const index_t j = a.col_idx[p];
      if (j == i) continue;
      t.entries.push_back({i, j, 1.0});
      t.entries.push_back({j, i, 1.0});
    }
  }
  SparseMatrix s = to_csr(t);
  std::fill(s.values.begin(), s.values.end(), 1.0);
  return s;
}

SparseMatrix transpose(const SparseMatrix& a) {
  SparseMatrix b;
  b.n = a.n;
  b.row_ptr.assign(a.n + 1, 0);
  b.col_idx.resize(a.nnz());
  b.values.resize(a.nnz());
  for (index_t p = 0; p < a.nnz(); ++p) ++b.row_ptr[a.col_idx[p] + 1];
  for (index_t i = 0; i < a.n; ++i) b.row_ptr[i + 1] += b.row_ptr[i];
  std::vector<index_t> next(b.row_ptr.begin(), b.row_ptr.end() - 1);
  for (index_t i = 0; i < a.n; ++i)
    for (index_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
      const index_t q = next[a.col_idx[p]]++;
      b.col_idx[q] = i;
      b.values[q] = a.values[p];
    }
  return b;
}

}  // namespace cktkit
