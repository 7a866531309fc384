// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "cktkit/etree.hpp"
#include "cktkit/sparse.hpp"

namespace cktkit {

/// Accumulated column exchanges as a position<->column bijection. Entries are
/// atomics: tail factorization swaps positions of rows still being pivoted
/// while other workers run membership predicates on frozen regions.
class PivotPerm {
 public:
  PivotPerm() = default;
  explicit PivotPerm(index_t n) { reset_identity(n); }
  PivotPerm(const PivotPerm& o) { copy_from(o); }
  PivotPerm& operator=(const PivotPerm& o) {
    if (this != &o) copy_from(o);
    return *this;
  }
  PivotPerm(PivotPerm&&) = default;
  PivotPerm& operator=(PivotPerm&&) = default;

  void reset_identity(index_t n);
  index_t size() const { return n_; }

  index_t col_at(index_t pos) const { return pos_col_[pos].load(std::memory_order_relaxed); }
  index_t pos_of(index_t col) const { return col_pos_[col].load(std::memory_order_relaxed); }

  /// Swap the columns currently at positions p and q.
  void exchange_positions(index_t p, index_t q);

  /// perm[position] = column.
  Permutation to_permutation() const;

 private:
  void copy_from(const PivotPerm& o);
  index_t n_ = 0;
  std::unique_ptr<std::atomic<index_t>[]> pos_col_;
  std::unique_ptr<std::atomic<index_t>[]> col_pos_;
};

/// Row-major LU factors of A_pre (after column exchanges): for every row i,
/// A_pre(i,c) = sum_j L(i,j) * U(j,c) with L(i,i) = diag[i] and U unit on its
/// pivot column. L rows store dependency row indices ascending (the update
/// sweep order); U rows store the pivot column first (value 1 after division
/// by the pivot), then the off-diagonals under original column ids of A_pre,
/// unsorted as produced by the symbolic traversal.
struct LUFactors {
  index_t n = 0;
  std::vector<std::vector<index_t>> l_cols;
  std::vector<std::vector<double>> l_vals;
  std::vector<double> diag;
  std::vector<std::vector<index_t>> u_cols;
  std::vector<std::vector<double>> u_vals;
  PivotPerm pivot;
  std::uint64_t structure_generation = 0;
  std::int64_t fill_nnz = 0;  // NNZ(L+U-I)
  std::int64_t flops = 0;

  Permutation pivot_cols() const { return pivot.to_permutation(); }
};

/// Exact dependency levels of a specific L pattern (edge j->i iff L(i,j) is
/// structural). No adjacency is stored; kernels read dependencies straight
/// from the L rows. `generation` ties the view to the factor structure it was
/// computed from; stale views are rejected.
struct EGraphView {
  Levelization levels;
  std::uint64_t generation = ~0ull;
};

EGraphView levelize_egraph(const LUFactors& lu, int n_threads, double alpha = 2.0);

struct SymbolicAnalysis {
  ETree tree;
  Levelization tree_levels;
  EGraphView egraph;
  std::uint64_t work_counter = 0;  // bumped on every symbolic (re)build
};

/// Per-thread sparse accumulator: one dense value array indexed by column
/// plus stamp arrays, so per-row reset costs are proportional to the row's
/// pattern, not to n.
struct Spa {
  std::vector<double> x;
  std::vector<std::uint32_t> visited;
  std::vector<std::uint32_t> expanded;
  std::uint32_t stamp = 0;
  std::vector<index_t> stack;
  std::vector<index_t> reach;
  std::vector<index_t> pending;
  std::vector<index_t> deps;
  std::vector<index_t> round_deps;

  void init(index_t n) {
    x.assign(n, 0.0);
    visited.assign(n, 0);
    expanded.assign(n, 0);
    stamp = 0;
  }
};

struct FactorContext {
  index_t n = 0;
  int n_threads = 1;
  double eps = 1e-3;
  double alpha = 2.0;
  SymbolicAnalysis sym;
  std::vector<Spa> spa;
  std::unique_ptr<std::atomic<std::uint8_t>[]> finish;
  std::atomic<bool> interrupted{false};
  std::atomic<bool> aborted{false};
  std::atomic<index_t> cursor{0};
  std::atomic<index_t> post_cursor{0};
  /// Fault hook: the pivot check is forced to fail at this row (fast
  /// factorization only). -1 disables.
  index_t forced_fail_row = -1;

  FactorContext(const SparseMatrix& a_pre, int n_threads, double eps);

  /// Rebuild the guessed dependency view from the factors' L pattern.
  void refresh_egraph(const LUFactors& lu);
  /// Rebuild only when the structure generation moved.
  void ensure_egraph(const LUFactors& lu);

  std::vector<char> finish_snapshot() const;
  void reset_finish();
};

struct FactorOutcome {
  enum class Status { Completed, Interrupted };
  Status status = Status::Completed;
  std::vector<index_t> failed_rows;
  std::vector<char> finish_snapshot;  // filled on Interrupted

  bool completed() const { return status == Status::Completed; }
};

/// Full factorization with threshold pivoting: per row, symbolic prediction by
/// depth-first reachability over earlier U rows, updates in ascending
/// dependency order, then the pivot test |x(i)| >= eps * max|candidates| with
/// a column exchange on failure. n_threads == 1 runs the plain row loop;
/// otherwise rows are scheduled by the elimination tree (cluster levels with
/// barriers, then a pipelined tail).
LUFactors factor_full(const SparseMatrix& a_pre, FactorContext& ctx, double eps, int n_threads);
LUFactors factor_full(const SparseMatrix& a_pre, double eps, int n_threads);

/// Recompute values on the stored pattern and pivot order; no pivot checks.
/// Throws ZeroPivot on an exact zero diagonal.
void refactor(const SparseMatrix& a_pre, FactorContext& ctx, LUFactors& lu, int n_threads);
void refactor(const SparseMatrix& a_pre, LUFactors& lu, int n_threads);

/// Value-only factorization with per-row pivot checks, scheduled by the
/// guessed dependency view. Completed leaves pattern and pivots untouched;
/// Interrupted leaves finish flags identifying the rows whose values are
/// final. Throws StaleSymbolic when the view does not match the factors.
FactorOutcome fast_factor(const SparseMatrix& a_pre, FactorContext& ctx, LUFactors& lu,
                          double eps, int n_threads);

/// Recompute the given rows (ascending, parent-closed) with full symbolic
/// prediction and pivoting. Finished rows are applied as partial updates
/// while a row waits for the rest. Bumps structure_generation iff any row's
/// pattern or pivot changed.
void tail_factor(const SparseMatrix& a_pre, FactorContext& ctx, LUFactors& lu,
                 const std::vector<index_t>& restart, double eps, int n_threads);

struct DriverResult {
  bool repivoted = false;
  std::vector<index_t> restart;
};

/// Fast factorization; on interruption determines the restart rows from the
/// finish flags and runs the pipelined tail, then refreshes the dependency
/// view only if the structure changed.
DriverResult factor_driver(const SparseMatrix& a_pre, FactorContext& ctx, LUFactors& lu,
                           double eps, int n_threads);

/// Recounts fill/flops from the stored patterns.
void recompute_stats(LUFactors& lu);

/// Threshold-pivoting certificate on stored factors: scaled U off-diagonals
/// cannot exceed 1/eps, and every diagonal is finite and nonzero.
bool satisfies_pivot_rule(const LUFactors& lu, double eps);

}  // namespace cktkit
