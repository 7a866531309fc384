// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "cktkit/sparse.hpp"

namespace cktkit {

/// Static pivoting result. `row_perm.perm[k]` is the original row placed at
/// position k, so permute(A, row_perm, identity) has the matched entries on
/// its diagonal. When scaling was requested, `scaling.row_scale` is indexed by
/// the PERMUTED row position and `scaling.col_scale` by column, so applying it
/// to the permuted matrix gives |diagonal| = 1 and all |entries| <= 1.
struct StaticPivotResult {
  Permutation row_perm;
  ScalingPair scaling;
  std::vector<char> matched;
};

/// Row permutation maximizing the absolute product of the diagonal
/// (equivalently sum of log|a(p(i),i)|), computed by shortest augmenting
/// paths over log-weights with dual potentials. Entries with value exactly
/// zero are excluded arcs and can never be matched.
/// Throws StructurallySingular when no perfect matching exists.
StaticPivotResult max_weight_matching(const SparseMatrix& a, bool want_scaling);

}  // namespace cktkit
