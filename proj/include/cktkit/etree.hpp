// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "cktkit/sparse.hpp"

namespace cktkit {

/// Elimination tree over rows. parent[i] > i for non-roots; -1 marks a root.
/// Bounds the inter-row dependencies of up-looking factorization for any
/// column-exchange sequence: if L(i,j) != 0 then i is an ancestor of j.
struct ETree {
  std::vector<index_t> parent;
  std::vector<index_t> postorder;

  bool is_ancestor(index_t anc, index_t node) const {
    for (index_t x = parent[node]; x != -1; x = parent[x])
      if (x == anc) return true;
    return false;
  }
};

/// Tree/DAG levels by longest path from a source. Nodes grouped by level,
/// ascending row index within each level.
struct Levelization {
  std::vector<index_t> level_of;
  std::vector<index_t> level_ptr;    // size n_levels+1
  std::vector<index_t> level_nodes;  // size n
  index_t n_levels = 0;
  index_t dividing_level = 0;        // filled in by callers via dividing_level()

  index_t level_size(index_t l) const { return level_ptr[l + 1] - level_ptr[l]; }
};

/// Row-connectivity elimination tree of the pattern: two rows are adjacent
/// when they share a column; built by row merging with path compression,
/// without forming the row-connectivity graph explicitly.
ETree build_etree(const SparseMatrix& a_pattern);

/// level(i) = 0 for leaves, else 1 + max level of children.
Levelization levelize_etree(const ETree& t);

/// Smallest level whose node count is below n_threads*alpha; n_levels when
/// every level is at least that wide.
index_t dividing_level(const Levelization& lv, int n_threads, double alpha);

/// Ancestor closure of the unfinished rows, ascending (a topological order
/// for up-looking factorization).
std::vector<index_t> restart_rows(const ETree& t, const std::vector<char>& finished);

}  // namespace cktkit
