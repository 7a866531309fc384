// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace cktkit {

using index_t = std::int32_t;

/// Permutation of [0,n). perm[new_position] = old_index, inverse[old_index] = new_position.
struct Permutation {
  std::vector<index_t> perm;
  std::vector<index_t> inverse;

  Permutation() = default;
  explicit Permutation(std::vector<index_t> p);

  static Permutation identity(index_t n);

  index_t size() const { return static_cast<index_t>(perm.size()); }
  bool valid() const;
};

/// compose(outer, inner).perm[i] = inner.perm[outer.perm[i]].
/// Applying the result in one step equals applying `inner` first, then `outer`.
Permutation compose(const Permutation& outer, const Permutation& inner);

/// Diagonal row/column scaling vectors. All entries finite and > 0.
struct ScalingPair {
  std::vector<double> row_scale;
  std::vector<double> col_scale;

  static ScalingPair ones(index_t n);
};

}  // namespace cktkit
