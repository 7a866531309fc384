// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include "cktkit/factor.hpp"
#include "cktkit/ordering.hpp"
#include "cktkit/trisolve.hpp"

namespace cktkit {

struct SolverOptions {
  int n_threads = 1;
  double eps = 1e-3;
  bool scaling = true;
  index_t nd_leaf = 256;
  PlanParams plan;
};

/// End-to-end pipeline on the original system A x = b: preprocessing
/// (static pivoting, ordering portfolio), symbolic analysis, factorization,
/// and triangular solves, with all permutations and scalings composed
/// internally. Values may be replaced between factorizations as long as the
/// pattern is unchanged, mirroring the nonlinear-iteration use case.
class Solver {
 public:
  Solver(SparseMatrix a, const SolverOptions& opts);

  /// Replace the values of the original matrix (same pattern) and refresh the
  /// preprocessed matrix.
  void set_values(const SparseMatrix& a);

  /// Full factorization with pivoting; resets the dependency view and plans.
  void factorize();

  /// Value-only re-factorization on the stored pattern (no pivot checks).
  void refactorize();

  /// Pivot-check factorization with restart on demand.
  DriverResult fast_factorize();

  /// Solve with the current factors; b is overwritten with x (original
  /// numbering). Parallel solves use structure-adaptive plans built lazily
  /// per structure generation.
  void solve(std::vector<double>& bx, bool parallel);

  /// max|Ax - b| / (‖A‖∞ ‖x‖∞) on the original system.
  double residual(const std::vector<double>& x, const std::vector<double>& b) const;

  const SparseMatrix& original() const { return a_; }
  const SparseMatrix& preprocessed() const { return a_pre_; }
  const PreprocessResult& preprocess_result() const { return pre_; }
  const LUFactors& factors() const { return lu_; }
  LUFactors& factors() { return lu_; }
  FactorContext& context() { return *ctx_; }
  const SolverOptions& options() const { return opts_; }
  double plan_setup_seconds() const { return plan_setup_seconds_; }
  double symbolic_seconds() const { return symbolic_seconds_; }
  bool plans_partitioned() const;
  int plan_slices() const;

  /// Force a pivot-check failure at the given row on the next fast
  /// factorization (testing/benchmark hook); -1 disables.
  void inject_pivot_fault(index_t row) { ctx_->forced_fail_row = row; }

  void ensure_plans();

 private:
  SolverOptions opts_;
  SparseMatrix a_;
  PreprocessResult pre_;
  SparseMatrix a_pre_;
  std::vector<index_t> value_src_;    // A_pre slot -> original value index
  std::vector<double> value_scale_;   // combined row/column scale per slot
  std::unique_ptr<FactorContext> ctx_;
  LUFactors lu_;
  std::unique_ptr<SolvePlan> lower_plan_, upper_plan_;
  double plan_setup_seconds_ = 0.0;
  double symbolic_seconds_ = 0.0;

  void build_value_map();
};

}  // namespace cktkit
