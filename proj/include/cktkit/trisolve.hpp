// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "cktkit/factor.hpp"

namespace cktkit {

/// Right-hand-side / solution vector, overwritten in place (b -> y -> x).
/// `scratch` backs the upper solve's final un-permutation so repeated solves
/// allocate nothing.
struct SolveVector {
  std::vector<double> x;
  std::vector<double> scratch;

  explicit SolveVector(index_t n) : x(static_cast<std::size_t>(n), 0.0) {}
  explicit SolveVector(std::vector<double> v) : x(std::move(v)) {}
  index_t size() const { return static_cast<index_t>(x.size()); }
};

/// Forward solve L y = b; rows ascending, dot product over the row then a
/// division by the diagonal.
void solve_lower_seq(const LUFactors& lu, SolveVector& v);

/// Backward solve U x = y; rows descending, no diagonal division (U is unit
/// on its pivot column). On return v.x is indexed by column of A_pre.
void solve_upper_seq(const LUFactors& lu, SolveVector& v);

struct PlanParams {
  double frac = 0.70;          // dense corner must hold this share of the nonzeros
  std::int64_t min_nnz = 300000;  // and at least this many
  int m = 8;                   // trapezoid slices
  double alpha = 2.0;          // cluster/sequential dividing rule
};

enum class SolveTarget { Lower, Upper };

/// Structure-adaptive partition of one triangular factor plus the per-thread
/// work assignments. Immutable once built; rebuilt whenever the factors'
/// structure generation moves.
struct SolvePlan {
  SolveTarget target = SolveTarget::Lower;
  int n_threads = 1;
  std::uint64_t generation = 0;

  bool partitioned = false;
  int m = 0;
  std::vector<index_t> cut;  // partition positions P0..Pm with cut[m] = n

  index_t n_cluster_levels = 0;
  std::vector<index_t> level_nodes;        // sparse-block cluster rows, by level
  std::vector<index_t> level_ptr;          // per-level offsets into level_nodes
  std::vector<index_t> level_thread_ptr;   // (level, thread) slices into level_nodes
  std::vector<index_t> seq_rows;           // sparse-block remainder, in solve order

  std::vector<index_t> slice_thread_ptr;   // (slice, thread) absolute row bounds
  std::vector<index_t> seg;                // per dense-region row: segment boundary

  std::int64_t setup_ops = 0;  // instrumented work count; stays O(nnz)

  index_t p0() const { return partitioned ? cut[0] : 0; }
};

/// Backward scan for P0 (smallest dense corner holding >= frac of the
/// target's nonzeros and >= min_nnz of them; otherwise unpartitioned), slice
/// cuts balancing trapezoid nonzeros to within one row, sparse-block
/// levelization, nonzero-balanced thread assignments, and per-row
/// segmentation by a single quicksort-style partition step (parallelized
/// across rows). Segmentation may reorder stored U row entries; row contents
/// are order-free.
SolvePlan build_solve_plan(LUFactors& lu, SolveTarget target, int n_threads,
                           const PlanParams& params = {});

/// Same result as the sequential solves up to the accumulation split at each
/// row's segment boundary. Thread count must match the plan's.
void solve_lower_par(const SolvePlan& plan, const LUFactors& lu, SolveVector& v, int n_threads);
void solve_upper_par(const SolvePlan& plan, const LUFactors& lu, SolveVector& v, int n_threads);

}  // namespace cktkit
