// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#include "cktkit/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "cktkit/errors.hpp"

namespace cktkit {

Solver::Solver(SparseMatrix a, const SolverOptions& opts) : opts_(opts), a_(std::move(a)) {
  if (!a_.check_invariants()) throw DimensionError("input matrix violates storage invariants");
  pre_ = run_portfolio(a_, opts_.scaling, opts_.nd_leaf);
  a_pre_ = pre_.A_pre;
  build_value_map();
  const auto t0 = std::chrono::steady_clock::now();
  ctx_ = std::make_unique<FactorContext>(a_pre_, opts_.n_threads, opts_.eps);
  symbolic_seconds_ =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  factorize();
}

void Solver::build_value_map() {
  const index_t n = a_.n;
  const Permutation& q = pre_.chosen().sym_perm;
  const Permutation& p = pre_.pivot.row_perm;
  value_src_.resize(a_pre_.nnz());
  value_scale_.resize(a_pre_.nnz());
  for (index_t i = 0; i < n; ++i) {
    const index_t qi = q.perm[i];
    const index_t r = p.perm[qi];
    const double rs = pre_.scaled ? pre_.pivot.scaling.row_scale[qi] : 1.0;
    for (index_t s = a_pre_.row_ptr[i]; s < a_pre_.row_ptr[i + 1]; ++s) {
      const index_t c = q.perm[a_pre_.col_idx[s]];
      const double cs = pre_.scaled ? pre_.pivot.scaling.col_scale[c] : 1.0;
      const index_t lo = a_.row_ptr[r], hi = a_.row_ptr[r + 1];
      const auto it = std::lower_bound(a_.col_idx.begin() + lo, a_.col_idx.begin() + hi, c);
      if (it == a_.col_idx.begin() + hi || *it != c)
        throw Error("value map: missing source entry");
      value_src_[s] = static_cast<index_t>(it - a_.col_idx.begin());
      value_scale_[s] = rs * cs;
    }
  }
}

void Solver::set_values(const SparseMatrix& a) {
  if (a.n != a_.n || a.col_idx != a_.col_idx || a.row_ptr != a_.row_ptr)
    throw DimensionError("set_values requires the construction pattern");
  a_.values = a.values;
  for (index_t s = 0; s < a_pre_.nnz(); ++s)
    a_pre_.values[s] = value_scale_[s] * a_.values[value_src_[s]];
}

void Solver::factorize() {
  lu_ = factor_full(a_pre_, *ctx_, opts_.eps, opts_.n_threads);
  const auto t0 = std::chrono::steady_clock::now();
  ctx_->refresh_egraph(lu_);
  symbolic_seconds_ +=
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  lower_plan_.reset();
  upper_plan_.reset();
}

void Solver::refactorize() { refactor(a_pre_, *ctx_, lu_, opts_.n_threads); }

DriverResult Solver::fast_factorize() {
  return factor_driver(a_pre_, *ctx_, lu_, opts_.eps, opts_.n_threads);
}

void Solver::ensure_plans() {
  if (lower_plan_ && lower_plan_->generation == lu_.structure_generation) return;
  const auto t0 = std::chrono::steady_clock::now();
  lower_plan_ = std::make_unique<SolvePlan>(
      build_solve_plan(lu_, SolveTarget::Lower, opts_.n_threads, opts_.plan));
  upper_plan_ = std::make_unique<SolvePlan>(
      build_solve_plan(lu_, SolveTarget::Upper, opts_.n_threads, opts_.plan));
  plan_setup_seconds_ =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool Solver::plans_partitioned() const {
  return lower_plan_ && (lower_plan_->partitioned || upper_plan_->partitioned);
}

int Solver::plan_slices() const { return lower_plan_ ? lower_plan_->m : 0; }

void Solver::solve(std::vector<double>& bx, bool parallel) {
  const index_t n = a_.n;
  if (static_cast<index_t>(bx.size()) != n) throw DimensionError("rhs size mismatch");
  const Permutation& q = pre_.chosen().sym_perm;
  const Permutation& p = pre_.pivot.row_perm;

  SolveVector v(n);
  for (index_t i = 0; i < n; ++i) {
    const index_t qi = q.perm[i];
    const double rs = pre_.scaled ? pre_.pivot.scaling.row_scale[qi] : 1.0;
    v.x[i] = rs * bx[p.perm[qi]];
  }

  if (parallel) {
    ensure_plans();
    solve_lower_par(*lower_plan_, lu_, v, opts_.n_threads);
    solve_upper_par(*upper_plan_, lu_, v, opts_.n_threads);
  } else {
    solve_lower_seq(lu_, v);
    solve_upper_seq(lu_, v);
  }

  // v.x is indexed by A_pre column; undo the symmetric permutation and the
  // column scaling.
  for (index_t j = 0; j < n; ++j) {
    const index_t c = q.perm[j];
    const double cs = pre_.scaled ? pre_.pivot.scaling.col_scale[c] : 1.0;
    bx[c] = cs * v.x[j];
  }
}

double Solver::residual(const std::vector<double>& x, const std::vector<double>& b) const {
  double rmax = 0.0, anorm = 0.0, xmax = 0.0;
  for (index_t i = 0; i < a_.n; ++i) {
    double s = 0.0, rowsum = 0.0;
    for (index_t p = a_.row_ptr[i]; p < a_.row_ptr[i + 1]; ++p) {
      s += a_.values[p] * x[a_.col_idx[p]];
      rowsum += std::abs(a_.values[p]);
    }
    rmax = std::max(rmax, std::abs(s - b[i]));
    anorm = std::max(anorm, rowsum);
  }
  for (const double xv : x) xmax = std::max(xmax, std::abs(xv));
  const double den = anorm * xmax;
  return den > 0.0 ? rmax / den : rmax;
}

}  // namespace cktkit
