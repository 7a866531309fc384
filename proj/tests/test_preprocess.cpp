// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cktkit/errors.hpp"
#include "cktkit/matching.hpp"
#include "cktkit/ordering.hpp"
#include "oracles.hpp"

using namespace cktkit;

namespace {

SparseMatrix from_dense(const oracles::Dense& d) {
  Triplets t;
  t.n_rows = t.n_cols = static_cast<index_t>(d.size());
  for (index_t i = 0; i < t.n_rows; ++i)
    for (index_t j = 0; j < t.n_cols; ++j)
      if (d[i][j] != 0.0) t.entries.push_back({i, j, d[i][j]});
  return to_csr(t);
}

// Brute-force maximum of sum(log|a(p(i),i)|) over all row permutations.
double brute_best_log_product(const oracles::Dense& d) {
  const index_t n = static_cast<index_t>(d.size());
  std::vector<index_t> p(n);
  std::iota(p.begin(), p.end(), index_t{0});
  double best = -1e300;
  do {
    double s = 0.0;
    bool ok = true;
    for (index_t i = 0; i < n && ok; ++i) {
      const double v = std::abs(d[p[i]][i]);
      if (v == 0.0)
        ok = false;
      else
        s += std::log(v);
    }
    if (ok) best = std::max(best, s);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

double log_product_of(const SparseMatrix& a, const Permutation& rp) {
  const auto d = oracles::dense_of(a);
  double s = 0.0;
  for (index_t i = 0; i < a.n; ++i) s += std::log(std::abs(d[rp.perm[i]][i]));
  return s;
}

SparseMatrix pattern_matrix(index_t n, const std::vector<std::pair<index_t, index_t>>& edges) {
  Triplets t;
  t.n_rows = t.n_cols = n;
  for (index_t i = 0; i < n; ++i) t.entries.push_back({i, i, 1.0});
  for (auto [i, j] : edges) {
    t.entries.push_back({i, j, 1.0});
    t.entries.push_back({j, i, 1.0});
  }
  return to_csr(t);
}

std::int64_t natural_order_fill(const SparseMatrix& a) {
  return symbolic_fill_count(a, Permutation::identity(a.n)).fill_nnz;
}

}  // namespace

TEST_CASE("matching keeps a dominant diagonal in place") {
  oracles::Dense d = {{5, 1, 0}, {0.5, 7, 1}, {1, 0, 9}};
  const StaticPivotResult r = max_weight_matching(from_dense(d), false);
  for (index_t i = 0; i < 3; ++i) CHECK(r.row_perm.perm[i] == i);
  CHECK(std::all_of(r.matched.begin(), r.matched.end(), [](char c) { return c; }));
}

TEST_CASE("matching swaps the 2x2 with a dominant anti-diagonal") {
  oracles::Dense d = {{0.1, 5}, {4, 0.2}};
  const StaticPivotResult r = max_weight_matching(from_dense(d), false);
  CHECK(r.row_perm.perm[0] == 1);  // row 1 (value 4) lands on column 0
  CHECK(r.row_perm.perm[1] == 0);
}

TEST_CASE("matching log-product equals the brute-force optimum") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 40; ++trial) {
    const index_t n = 2 + static_cast<index_t>(rng() % 7);
    const SparseMatrix a = oracles::random_sparse(n, 2 * n, rng);
    const StaticPivotResult r = max_weight_matching(a, false);
    CHECK(r.row_perm.valid());
    const double got = log_product_of(a, r.row_perm);
    const double best = brute_best_log_product(oracles::dense_of(a));
    CHECK(got == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("matching scaling bound holds on random instances") {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 20; ++trial) {
    const index_t n = 5 + static_cast<index_t>(rng() % 30);
    const SparseMatrix a = oracles::random_sparse(n, 4 * n, rng);
    const StaticPivotResult r = max_weight_matching(a, true);
    SparseMatrix b = permute(a, r.row_perm, Permutation::identity(n));
    b = apply_scaling(b, r.scaling);
    const auto d = oracles::dense_of(b);
    for (index_t i = 0; i < n; ++i) {
      CHECK(std::abs(std::abs(d[i][i]) - 1.0) <= 1e-9);
      for (index_t j = 0; j < n; ++j) CHECK(std::abs(d[i][j]) <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("matching rejects structurally singular input") {
  // column 2 empty
  Triplets t;
  t.n_rows = t.n_cols = 3;
  t.entries = {{0, 0, 1}, {1, 1, 1}, {2, 0, 1}, {2, 1, 1}};
  CHECK_THROWS_AS(max_weight_matching(to_csr(t), false), StructurallySingular);

  // structural entries exist but one row has only zero values
  Triplets z;
  z.n_rows = z.n_cols = 2;
  z.entries = {{0, 0, 0.0}, {0, 1, 0.0}, {1, 0, 1.0}, {1, 1, 1.0}};
  CHECK_THROWS_AS(max_weight_matching(to_csr(z), false), StructurallySingular);
}

TEST_CASE("amd: diagonal matrix orders as identity") {
  const SparseMatrix a = pattern_matrix(6, {});
  const Permutation q = order_amd(a);
  for (index_t i = 0; i < 6; ++i) CHECK(q.perm[i] == i);
}

TEST_CASE("amd: tridiagonal ordering has zero fill") {
  std::vector<std::pair<index_t, index_t>> edges;
  for (index_t i = 0; i + 1 < 10; ++i) edges.push_back({i, i + 1});
  const SparseMatrix a = pattern_matrix(10, edges);
  const Permutation q = order_amd(a);
  CHECK(q.valid());
  const FillStats st = symbolic_fill_count(a, q);
  CHECK(st.fill_nnz == 3 * 10 - 2);
  CHECK(st.flops == symbolic_fill_count(a, Permutation::identity(10)).flops);
}

TEST_CASE("amd beats the natural order on a grid") {
  std::vector<std::pair<index_t, index_t>> edges;
  const index_t k = 8;
  for (index_t r = 0; r < k; ++r)
    for (index_t c = 0; c < k; ++c) {
      if (r + 1 < k) edges.push_back({r * k + c, (r + 1) * k + c});
      if (c + 1 < k) edges.push_back({r * k + c, r * k + c + 1});
    }
  const SparseMatrix a = pattern_matrix(k * k, edges);
  const Permutation q = order_amd(a);
  CHECK(symbolic_fill_count(a, q).fill_nnz < natural_order_fill(a));
}

TEST_CASE("amf: diagonal matrix orders as identity") {
  const SparseMatrix a = pattern_matrix(5, {});
  const Permutation q = order_amf(a);
  for (index_t i = 0; i < 5; ++i) CHECK(q.perm[i] == i);
}

TEST_CASE("amf: star hub is eliminated last") {
  std::vector<std::pair<index_t, index_t>> edges;
  const index_t hub = 3;
  for (index_t i = 0; i < 9; ++i)
    if (i != hub) edges.push_back({hub, i});
  const SparseMatrix a = pattern_matrix(9, edges);
  const Permutation q = order_amf(a);
  CHECK(q.valid());
  CHECK(q.perm[8] == hub);
}

TEST_CASE("amf: random circuit-like pattern gives a valid permutation") {
  std::mt19937_64 rng(107);
  const SparseMatrix raw = oracles::random_sparse(100, 300, rng);
  const SparseMatrix a = symmetrize_pattern(raw);
  const Permutation q = order_amf(a);
  CHECK(q.valid());
  const FillStats st = symbolic_fill_count(a, q);
  CHECK(st.fill_nnz >= a.n);
}

TEST_CASE("nd: path graph puts the center vertex in the top separator, ordered last") {
  std::vector<std::pair<index_t, index_t>> edges;
  for (index_t i = 0; i + 1 < 7; ++i) edges.push_back({i, i + 1});
  const SparseMatrix a = pattern_matrix(7, edges);
  const DissectionInfo info = nd_dissect(a, 3);
  const index_t top_group = info.n_groups - 1;
  CHECK(info.group[3] == top_group);
  for (index_t v = 0; v < 7; ++v)
    if (v != 3) CHECK(info.group[v] < top_group);
  const Permutation q = order_nd_cmd(a, 3);
  CHECK(q.perm[6] == 3);
}

TEST_CASE("nd: cut vertex of two cliques becomes the separator") {
  std::vector<std::pair<index_t, index_t>> edges;
  for (index_t i = 0; i <= 4; ++i)
    for (index_t j = i + 1; j <= 4; ++j) edges.push_back({i, j});
  for (index_t i = 4; i <= 8; ++i)
    for (index_t j = i + 1; j <= 8; ++j) edges.push_back({i, j});
  const SparseMatrix a = pattern_matrix(9, edges);
  const DissectionInfo info = nd_dissect(a, 4);
  CHECK(info.group[4] == info.n_groups - 1);

  // each clique ordered contiguously before the cut vertex
  const Permutation q = order_nd_cmd(a, 4);
  CHECK(q.perm[8] == 4);
  std::vector<index_t> groups_seen;
  for (index_t k = 0; k < 9; ++k) groups_seen.push_back(info.group[q.perm[k]]);
  CHECK(std::is_sorted(groups_seen.begin(), groups_seen.end()));
}

TEST_CASE("nd_cmd group monotonicity along the elimination order") {
  std::mt19937_64 rng(109);
  const SparseMatrix a = symmetrize_pattern(oracles::random_sparse(120, 360, rng));
  const DissectionInfo info = nd_dissect(a, 16);
  const Permutation q = order_nd_cmd(a, 16);
  CHECK(q.valid());
  std::vector<index_t> seq;
  for (index_t k = 0; k < a.n; ++k) seq.push_back(info.group[q.perm[k]]);
  CHECK(std::is_sorted(seq.begin(), seq.end()));
}

TEST_CASE("nd_cmd fill is within 2x of amd on a 16x16 grid") {
  std::vector<std::pair<index_t, index_t>> edges;
  const index_t k = 16;
  for (index_t r = 0; r < k; ++r)
    for (index_t c = 0; c < k; ++c) {
      if (r + 1 < k) edges.push_back({r * k + c, (r + 1) * k + c});
      if (c + 1 < k) edges.push_back({r * k + c, r * k + c + 1});
    }
  const SparseMatrix a = pattern_matrix(k * k, edges);
  const std::int64_t amd_fill = symbolic_fill_count(a, order_amd(a)).fill_nnz;
  const std::int64_t nd_fill = symbolic_fill_count(a, order_nd_cmd(a, 64)).fill_nnz;
  CHECK(nd_fill <= 2 * amd_fill);
}

TEST_CASE("fill count: identity") {
  const SparseMatrix a = pattern_matrix(5, {});
  const FillStats st = symbolic_fill_count(a, Permutation::identity(5));
  CHECK(st.fill_nnz == 5);
  CHECK(st.flops == 0);
}

TEST_CASE("fill count: dense 3x3 matches the dense elimination oracle") {
  oracles::Dense d(3, std::vector<double>(3, 1.0));
  const SparseMatrix a = from_dense(d);
  const FillStats st = symbolic_fill_count(a, Permutation::identity(3));
  const auto oracle = oracles::dense_fill_count(oracles::pattern_of(a));
  CHECK(st.fill_nnz == 9);
  CHECK(st.fill_nnz == oracle.fill);
  CHECK(st.flops == oracle.flops);
}

TEST_CASE("fill count: tridiagonal natural order has no fill") {
  std::vector<std::pair<index_t, index_t>> edges;
  for (index_t i = 0; i + 1 < 12; ++i) edges.push_back({i, i + 1});
  const SparseMatrix a = pattern_matrix(12, edges);
  CHECK(natural_order_fill(a) == 3 * 12 - 2);
}

TEST_CASE("fill count matches the dense oracle under random permutations") {
  std::mt19937_64 rng(113);
  for (int trial = 0; trial < 25; ++trial) {
    const index_t n = 4 + static_cast<index_t>(rng() % 12);
    SparseMatrix a = oracles::random_sparse(n, 3 * n, rng);
    std::vector<index_t> p(n);
    std::iota(p.begin(), p.end(), index_t{0});
    std::shuffle(p.begin(), p.end(), rng);
    const Permutation q(p);
    const SparseMatrix b = permute(a, q, q);
    if (![&] {  // oracle needs a full structural diagonal post-permutation
          for (index_t i = 0; i < n; ++i) {
            bool has = false;
            for (index_t s = b.row_ptr[i]; s < b.row_ptr[i + 1]; ++s)
              if (b.col_idx[s] == i) has = true;
            if (!has) return false;
          }
          return true;
        }())
      continue;
    const FillStats st = symbolic_fill_count(a, q);
    const auto oracle = oracles::dense_fill_count(oracles::pattern_of(b));
    CHECK(st.fill_nnz == oracle.fill);
    CHECK(st.flops == oracle.flops);
  }
}

TEST_CASE("fill count rejects a missing structural diagonal") {
  Triplets t;
  t.n_rows = t.n_cols = 2;
  t.entries = {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}};  // (1,1) missing, no fill reaches it
  CHECK_THROWS_AS(symbolic_fill_count(to_csr(t), Permutation::identity(2)), ZeroDiagonal);
}

TEST_CASE("portfolio on a diagonal matrix picks AMD by tie-break") {
  Triplets t;
  t.n_rows = t.n_cols = 8;
  for (index_t i = 0; i < 8; ++i) t.entries.push_back({i, i, 2.0});
  const PreprocessResult pre = run_portfolio(to_csr(t), true);
  for (const auto& c : pre.candidates) CHECK(c.fill_nnz == 8);
  CHECK(pre.chosen().method == OrderingMethod::AMD);
}

TEST_CASE("portfolio on tridiagonal reaches the 3n-2 floor") {
  Triplets t;
  t.n_rows = t.n_cols = 50;
  for (index_t i = 0; i < 50; ++i) {
    t.entries.push_back({i, i, 4.0});
    if (i > 0) t.entries.push_back({i, i - 1, -1.0});
    if (i + 1 < 50) t.entries.push_back({i, i + 1, -1.0});
  }
  const PreprocessResult pre = run_portfolio(to_csr(t), true);
  CHECK(pre.chosen().fill_nnz == 3 * 50 - 2);
}

TEST_CASE("portfolio choice equals the minimum over its candidates") {
  std::mt19937_64 rng(127);
  for (int trial = 0; trial < 6; ++trial) {
    const SparseMatrix a = oracles::random_sparse(80, 320, rng, /*dominance=*/0.5);
    const PreprocessResult pre = run_portfolio(a, trial % 2 == 0, 16);
    std::int64_t mn = pre.candidates[0].fill_nnz;
    for (const auto& c : pre.candidates) mn = std::min(mn, c.fill_nnz);
    CHECK(pre.chosen().fill_nnz == mn);
    CHECK(pre.A_pre.check_invariants());

    // re-run each method alone and confirm the recorded fill
    SparseMatrix a1 = permute(a, pre.pivot.row_perm, Permutation::identity(a.n));
    if (pre.scaled) a1 = apply_scaling(a1, pre.pivot.scaling);
    const SparseMatrix sym = symmetrize_pattern(a1);
    CHECK(symbolic_fill_count(a1, order_amd(sym)).fill_nnz == pre.candidates[0].fill_nnz);
    CHECK(symbolic_fill_count(a1, order_amf(sym)).fill_nnz == pre.candidates[1].fill_nnz);
    CHECK(symbolic_fill_count(a1, order_nd_cmd(sym, 16)).fill_nnz == pre.candidates[2].fill_nnz);
  }
}

TEST_CASE("every ordering returns a bijection") {
  std::mt19937_64 rng(131);
  for (int trial = 0; trial < 10; ++trial) {
    const index_t n = 10 + static_cast<index_t>(rng() % 60);
    const SparseMatrix a = symmetrize_pattern(oracles::random_sparse(n, 3 * n, rng));
    CHECK(order_amd(a).valid());
    CHECK(order_amf(a).valid());
    CHECK(order_nd_cmd(a, 8).valid());
  }
}

TEST_CASE("symbolic fill equals the pattern of an actual pivot-free factorization") {
  std::mt19937_64 rng(137);
  for (int trial = 0; trial < 15; ++trial) {
    const index_t n = 6 + static_cast<index_t>(rng() % 20);
    // diagonally dominant so diagonal pivots never exchange
    const SparseMatrix a = oracles::random_sparse(n, 3 * n, rng, /*dominance=*/1.0);
    const FillStats st = symbolic_fill_count(a, Permutation::identity(n));
    const LUFactors lu = factor_full(a, 1e-12, 1);
    for (index_t i = 0; i < n; ++i) CHECK(lu.pivot.col_at(i) == i);  // no exchanges happened
    CHECK(lu.fill_nnz == st.fill_nnz);
    CHECK(lu.flops == st.flops);

    // entry-by-entry pattern equality against the dense symbolic oracle
    const auto filled = [&] {
      auto p = oracles::pattern_of(a);
      for (index_t i = 0; i < n; ++i)
        for (index_t j = 0; j < i; ++j)
          if (p[i][j])
            for (index_t k = j + 1; k < n; ++k)
              if (p[j][k]) p[i][k] = true;
      return p;
    }();
    std::vector<std::vector<bool>> got(n, std::vector<bool>(n, false));
    for (index_t i = 0; i < n; ++i) {
      got[i][i] = true;
      for (const index_t j : lu.l_cols[i]) got[i][j] = true;
      for (std::size_t q = 1; q < lu.u_cols[i].size(); ++q) got[i][lu.u_cols[i][q]] = true;
    }
    CHECK(got == filled);
  }
}

TEST_CASE("A_pre composes the pivoting, scaling and ordering exactly") {
  std::mt19937_64 rng(139);
  const SparseMatrix a = oracles::random_sparse(25, 120, rng);
  for (const bool scaling : {false, true}) {
    const PreprocessResult pre = run_portfolio(a, scaling, 8);
    SparseMatrix a1 = permute(a, pre.pivot.row_perm, Permutation::identity(a.n));
    if (scaling) a1 = apply_scaling(a1, pre.pivot.scaling);
    const SparseMatrix expect = permute(a1, pre.chosen().sym_perm, pre.chosen().sym_perm);
    CHECK(oracles::max_abs_diff(oracles::dense_of(pre.A_pre), oracles::dense_of(expect)) == 0.0);
  }
}
