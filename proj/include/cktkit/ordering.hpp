// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "cktkit/matching.hpp"
#include "cktkit/sparse.hpp"

namespace cktkit {

enum class MdScore { Degree, Deficiency };

/// Greedy elimination ordering on a symmetric pattern (full diagonal assumed),
/// driven by a quotient graph with supervariable compression. With a non-null
/// `groups` array, pivots are eliminated in non-decreasing group order and
/// only vertices of the same group are merged.
Permutation mindeg_order(const SparseMatrix& pattern, MdScore score,
                         const std::vector<index_t>* groups = nullptr);

/// Approximate minimum degree.
Permutation order_amd(const SparseMatrix& pattern);

/// Approximate minimum deficiency (new-fill estimate as the greedy score).
Permutation order_amf(const SparseMatrix& pattern);

/// Incomplete nested dissection by recursive bisection: parts are numbered
/// before their separator. Output of the dissection alone; vertices keep
/// their group index.
struct DissectionInfo {
  std::vector<index_t> group;
  index_t n_groups = 0;
};
DissectionInfo nd_dissect(const SparseMatrix& pattern, index_t leaf_threshold);

/// Nested dissection groups followed by a group-constrained minimum degree
/// pass over the whole matrix. Parts below `leaf_threshold` vertices are not
/// dissected further.
Permutation order_nd_cmd(const SparseMatrix& pattern, index_t leaf_threshold = 256);

struct FillStats {
  std::int64_t fill_nnz = 0;  // NNZ(L+U-I)
  std::int64_t flops = 0;     // 2 per multiply-accumulate + 1 per off-diagonal division
};

/// Pivoting-free up-looking symbolic factorization of the symmetrically
/// permuted pattern. Throws ZeroDiagonal when a pivot slot is structurally
/// absent.
FillStats symbolic_fill_count(const SparseMatrix& pattern, const Permutation& sym_perm);

enum class OrderingMethod { AMD = 0, AMF = 1, ND_CMD = 2 };
const char* ordering_method_name(OrderingMethod m);

struct OrderingCandidate {
  OrderingMethod method;
  Permutation sym_perm;
  std::int64_t fill_nnz = 0;
  std::int64_t flops = 0;
};

struct PreprocessResult {
  std::vector<OrderingCandidate> candidates;  // AMD, AMF, ND_CMD
  int chosen_index = 0;
  StaticPivotResult pivot;
  bool scaled = false;
  SparseMatrix A_pre;  // Q * (S_r P A S_c) * Q^T, or Q * (P A) * Q^T without scaling

  const OrderingCandidate& chosen() const { return candidates[chosen_index]; }
};

/// Static pivoting once, then the three orderings concurrently on the pivoted
/// pattern; the candidate with minimum fill wins (ties: lower flops, then
/// AMD < AMF < ND_CMD).
PreprocessResult run_portfolio(const SparseMatrix& a, bool want_scaling,
                               index_t nd_leaf_threshold = 256);

}  // namespace cktkit
