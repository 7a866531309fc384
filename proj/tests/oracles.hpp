// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles: dense reference implementations kept independent of the
// sparse code paths they check.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "cktkit/factor.hpp"
#include "cktkit/sparse.hpp"

namespace oracles {

using cktkit::index_t;
using Dense = std::vector<std::vector<double>>;

inline Dense dense_zero(index_t n) { return Dense(n, std::vector<double>(n, 0.0)); }

inline Dense dense_of(const cktkit::SparseMatrix& a) {
  Dense d = dense_zero(a.n);
  for (index_t i = 0; i < a.n; ++i)
    for (index_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
      d[i][a.col_idx[p]] += a.values[p];
  return d;
}

inline Dense dense_of(const cktkit::Triplets& t) {
  Dense d = dense_zero(t.n_rows);
  for (const auto& e : t.entries) d[e.row][e.col] += e.value;
  return d;
}

inline double max_abs(const Dense& a) {
  double m = 0.0;
  for (const auto& r : a)
    for (double v : r) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs_diff(const Dense& a, const Dense& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
  return m;
}

/// Dense up-looking LU with threshold pivoting by column exchange, tracking
/// the position -> original-column map. Satisfies W = L*U where
/// W[r][p] = A[r][perm[p]].
struct DenseLU {
  Dense l, u;                  // u rows normalized by the pivot
  std::vector<index_t> perm;   // position -> original column
  bool singular = false;
};

/// `choose` picks the pivot position for a row given (row, x, position->column
/// map); nullptr uses the threshold rule.
inline DenseLU dense_lu_threshold(
    const Dense& a, double eps,
    const std::function<index_t(index_t, const std::vector<double>&,
                                const std::vector<index_t>&)>& choose = nullptr) {
  const index_t n = static_cast<index_t>(a.size());
  DenseLU r;
  r.l = dense_zero(n);
  r.u = dense_zero(n);
  r.perm.resize(n);
  for (index_t i = 0; i < n; ++i) r.perm[i] = i;
  Dense w = a;

  for (index_t i = 0; i < n; ++i) {
    std::vector<double> x = w[i];
    for (index_t j = 0; j < i; ++j) {
      const double xj = x[j];
      r.l[i][j] = xj;
      for (index_t k = j + 1; k < n; ++k) x[k] -= xj * r.u[j][k];
    }
    index_t m = -1;
    if (choose) {
      m = choose(i, x, r.perm);
    } else {
      double mx = 0.0;
      index_t am = -1;
      for (index_t k = i + 1; k < n; ++k)
        if (std::abs(x[k]) > mx) {
          mx = std::abs(x[k]);
          am = k;
        }
      if (x[i] == 0.0 && mx == 0.0) {
        r.singular = true;
        return r;
      }
      m = (std::abs(x[i]) < eps * mx) ? am : i;
    }
    if (m != i) {
      std::swap(r.perm[i], r.perm[m]);
      std::swap(x[i], x[m]);
      for (index_t rr = 0; rr < n; ++rr) std::swap(w[rr][i], w[rr][m]);
      for (index_t j = 0; j < i; ++j) std::swap(r.u[j][i], r.u[j][m]);
    }
    if (x[i] == 0.0) {
      r.singular = true;
      return r;
    }
    r.l[i][i] = x[i];
    r.u[i][i] = 1.0;
    for (index_t k = i + 1; k < n; ++k) r.u[i][k] = x[k] / x[i];
  }
  return r;
}

/// Reconstruction of A_pre from sparse factors: B[i][c] = sum_j L(i,j)*U(j,c)
/// (U under original column ids, so no permutation bookkeeping is needed).
inline Dense reconstruct_dense(const cktkit::LUFactors& lu) {
  Dense b = dense_zero(lu.n);
  for (index_t i = 0; i < lu.n; ++i) {
    for (std::size_t k = 0; k < lu.l_cols[i].size(); ++k) {
      const index_t j = lu.l_cols[i][k];
      const double lv = lu.l_vals[i][k];
      for (std::size_t q = 0; q < lu.u_cols[j].size(); ++q)
        b[i][lu.u_cols[j][q]] += lv * lu.u_vals[j][q];
    }
    for (std::size_t q = 0; q < lu.u_cols[i].size(); ++q)
      b[i][lu.u_cols[i][q]] += lu.diag[i] * lu.u_vals[i][q];
  }
  return b;
}

/// Relative max-norm reconstruction error of the factors against A_pre.
inline double reconstruction_error(const cktkit::LUFactors& lu, const cktkit::SparseMatrix& a_pre) {
  const Dense b = reconstruct_dense(lu);
  const Dense a = dense_of(a_pre);
  const double den = std::max(max_abs(a), 1e-300);
  return max_abs_diff(a, b) / den;
}

/// Structural up-looking factorization with diagonal pivots on a dense
/// boolean pattern; returns NNZ(L+U-I) and the MAC/divide count.
struct FillOracle {
  std::int64_t fill = 0;
  std::int64_t flops = 0;
  bool zero_diag = false;
};

inline FillOracle dense_fill_count(const std::vector<std::vector<bool>>& pattern) {
  const index_t n = static_cast<index_t>(pattern.size());
  std::vector<std::vector<bool>> b = pattern;
  FillOracle res;
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = 0; j < i; ++j)
      if (b[i][j])
        for (index_t k = j + 1; k < n; ++k)
          if (b[j][k]) b[i][k] = true;
    if (!b[i][i]) {
      res.zero_diag = true;
      return res;
    }
  }
  for (index_t i = 0; i < n; ++i) {
    index_t urow = 0;
    for (index_t k = i + 1; k < n; ++k)
      if (b[i][k]) ++urow;
    for (index_t j = 0; j < i; ++j)
      if (b[i][j]) {
        index_t uj = 0;
        for (index_t k = j + 1; k < n; ++k)
          if (b[j][k]) ++uj;
        res.flops += 2 * uj;
        ++res.fill;
      }
    res.flops += urow;
    res.fill += urow + 1;
  }
  return res;
}

inline std::vector<std::vector<bool>> pattern_of(const cktkit::SparseMatrix& a) {
  std::vector<std::vector<bool>> p(a.n, std::vector<bool>(a.n, false));
  for (index_t i = 0; i < a.n; ++i)
    for (index_t q = a.row_ptr[i]; q < a.row_ptr[i + 1]; ++q) p[i][a.col_idx[q]] = true;
  return p;
}

/// Random square matrix with a full structural diagonal. `dominance` > 0
/// makes it diagonally dominant by that margin; 0 leaves all values uniform
/// in [-1,1] so threshold pivoting actually fires.
inline cktkit::SparseMatrix random_sparse(index_t n, index_t extra, std::mt19937_64& rng,
                                          double dominance = 0.0) {
  std::uniform_int_distribution<index_t> pick(0, n - 1);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  cktkit::Triplets t;
  t.n_rows = t.n_cols = n;
  std::vector<double> rowsum(n, 0.0);
  for (index_t k = 0; k < extra; ++k) {
    const index_t i = pick(rng), j = pick(rng);
    if (i == j) continue;
    const double v = val(rng);
    t.entries.push_back({i, j, v});
    rowsum[i] += std::abs(v);
  }
  for (index_t i = 0; i < n; ++i) {
    double d = val(rng);
    if (dominance > 0.0) d = (d >= 0 ? 1.0 : -1.0) * (rowsum[i] + dominance);
    if (d == 0.0) d = 0.5;
    t.entries.push_back({i, i, d});
  }
  return to_csr(t);
}

inline std::vector<double> random_vector(index_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = val(rng);
  return v;
}

}  // namespace oracles
