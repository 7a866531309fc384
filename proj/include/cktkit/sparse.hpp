// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "cktkit/types.hpp"

namespace cktkit {

/// Coordinate-form entries as ingested. Duplicates allowed; summed on conversion.
struct Triplets {
  struct Entry {
    index_t row;
    index_t col;
    double value;
  };

  index_t n_rows = 0;
  index_t n_cols = 0;
  std::vector<Entry> entries;
};

/// Compressed row-major sparse matrix. Square; within each row the column
/// indices are strictly increasing. Explicit zeros are kept as structural
/// entries: circuit stampers produce value-zero slots whose values change
/// between iterations.
struct SparseMatrix {
  index_t n = 0;
  std::vector<index_t> row_ptr;  // size n+1, row_ptr[0] == 0
  std::vector<index_t> col_idx;  // size nnz
  std::vector<double> values;    // size nnz

  index_t nnz() const { return static_cast<index_t>(col_idx.size()); }
  bool check_invariants() const;
};

/// Sum duplicates, sort rows by column. Throws DimensionError on non-square input.
SparseMatrix to_csr(const Triplets& t);

/// B[i][j] = A[row_perm.perm[i]][col_perm.perm[j]].
SparseMatrix permute(const SparseMatrix& a, const Permutation& row_perm,
                     const Permutation& col_perm);

/// B[i][j] = row_scale[i] * A[i][j] * col_scale[j]. Pattern unchanged.
SparseMatrix apply_scaling(const SparseMatrix& a, const ScalingPair& s);

/// Pattern of A + A^T with a full diagonal; values set to 1. Input for the
/// symmetric ordering methods.
SparseMatrix symmetrize_pattern(const SparseMatrix& a);

SparseMatrix transpose(const SparseMatrix& a);

}  // namespace cktkit
