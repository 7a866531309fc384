// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#include "cktkit/factor.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "cktkit/errors.hpp"

namespace cktkit {

namespace {

inline void spin_pause(int& k) {
  if (++k >= 256) {
    std::this_thread::yield();
    k = 0;
  }
}

// First exception from any worker wins; rethrown after the join.
struct ErrorSlot {
  std::mutex mu;
  std::exception_ptr ep;
  void put(std::exception_ptr e) {
    std::lock_guard<std::mutex> g(mu);
    if (!ep) ep = e;
  }
  void rethrow_if() {
    if (ep) std::rethrow_exception(ep);
  }
};

}  // namespace

void PivotPerm::reset_identity(index_t n) {
  n_ = n;
  pos_col_ = std::make_unique<std::atomic<index_t>[]>(n);
  col_pos_ = std::make_unique<std::atomic<index_t>[]>(n);
  for (index_t i = 0; i < n; ++i) {
    pos_col_[i].store(i, std::memory_order_relaxed);
    col_pos_[i].store(i, std::memory_order_relaxed);
  }
}

void PivotPerm::copy_from(const PivotPerm& o) {
  n_ = o.n_;
  if (n_ == 0) {
    pos_col_.reset();
    col_pos_.reset();
    return;
  }
  pos_col_ = std::make_unique<std::atomic<index_t>[]>(n_);
  col_pos_ = std::make_unique<std::atomic<index_t>[]>(n_);
  for (index_t i = 0; i < n_; ++i) {
    pos_col_[i].store(o.pos_col_[i].load(std::memory_order_relaxed), std::memory_order_relaxed);
    col_pos_[i].store(o.col_pos_[i].load(std::memory_order_relaxed), std::memory_order_relaxed);
  }
}

void PivotPerm::exchange_positions(index_t p, index_t q) {
  const index_t cp = pos_col_[p].load(std::memory_order_relaxed);
  const index_t cq = pos_col_[q].load(std::memory_order_relaxed);
  pos_col_[p].store(cq, std::memory_order_relaxed);
  pos_col_[q].store(cp, std::memory_order_relaxed);
  col_pos_[cp].store(q, std::memory_order_relaxed);
  col_pos_[cq].store(p, std::memory_order_relaxed);
}

Permutation PivotPerm::to_permutation() const {
  std::vector<index_t> p(n_);
  for (index_t i = 0; i < n_; ++i) p[i] = pos_col_[i].load(std::memory_order_relaxed);
  return Permutation(std::move(p));
}

EGraphView levelize_egraph(const LUFactors& lu, int n_threads, double alpha) {
  const index_t n = lu.n;
  EGraphView view;
  Levelization& lv = view.levels;
  lv.level_of.assign(n, 0);
  for (index_t i = 0; i < n; ++i) {
    index_t m = -1;
    for (const index_t j : lu.l_cols[i]) m = std::max(m, lv.level_of[j]);
    lv.level_of[i] = m + 1;
  }
  lv.n_levels = 0;
  for (index_t i = 0; i < n; ++i) lv.n_levels = std::max(lv.n_levels, lv.level_of[i] + 1);
  lv.level_ptr.assign(lv.n_levels + 1, 0);
  for (index_t i = 0; i < n; ++i) ++lv.level_ptr[lv.level_of[i] + 1];
  for (index_t l = 0; l < lv.n_levels; ++l) lv.level_ptr[l + 1] += lv.level_ptr[l];
  lv.level_nodes.resize(n);
  std::vector<index_t> cursor(lv.level_ptr.begin(), lv.level_ptr.end() - 1);
  for (index_t i = 0; i < n; ++i) lv.level_nodes[cursor[lv.level_of[i]]++] = i;
  lv.dividing_level = dividing_level(lv, n_threads, alpha);
  view.generation = lu.structure_generation;
  return view;
}

FactorContext::FactorContext(const SparseMatrix& a_pre, int threads, double pivot_eps)
    : n(a_pre.n), n_threads(std::max(1, threads)), eps(pivot_eps) {
  sym.tree = build_etree(a_pre);
  sym.tree_levels = levelize_etree(sym.tree);
  sym.tree_levels.dividing_level = dividing_level(sym.tree_levels, n_threads, alpha);
  ++sym.work_counter;
  spa.resize(n_threads);
  for (auto& s : spa) s.init(n);
  finish = std::make_unique<std::atomic<std::uint8_t>[]>(n);
  reset_finish();
}

void FactorContext::refresh_egraph(const LUFactors& lu) {
  sym.egraph = levelize_egraph(lu, n_threads, alpha);
  ++sym.work_counter;
}

void FactorContext::ensure_egraph(const LUFactors& lu) {
  if (sym.egraph.generation != lu.structure_generation) refresh_egraph(lu);
}

std::vector<char> FactorContext::finish_snapshot() const {
  std::vector<char> snap(n);
  for (index_t i = 0; i < n; ++i) snap[i] = finish[i].load(std::memory_order_acquire) ? 1 : 0;
  return snap;
}

void FactorContext::reset_finish() {
  for (index_t i = 0; i < n; ++i) finish[i].store(0, std::memory_order_relaxed);
}

namespace {

void ensure_spa(FactorContext& ctx, int nt) {
  if (static_cast<int>(ctx.spa.size()) < nt) {
    const std::size_t old = ctx.spa.size();
    ctx.spa.resize(nt);
    for (std::size_t t = old; t < ctx.spa.size(); ++t) ctx.spa[t].init(ctx.n);
  }
}

void init_factor_storage(LUFactors& lu, index_t n) {
  lu.n = n;
  lu.l_cols.assign(n, {});
  lu.l_vals.assign(n, {});
  lu.diag.assign(n, 0.0);
  lu.u_cols.assign(n, {});
  lu.u_vals.assign(n, {});
  lu.pivot.reset_identity(n);
  // Process-unique base so views and plans can never match factors they were
  // not built from.
  static std::atomic<std::uint64_t> next_generation{1};
  lu.structure_generation = next_generation.fetch_add(1, std::memory_order_relaxed);
}

// Complete row computation with symbolic prediction and threshold pivoting.
// Every reachable row below i must be finished and its pivot position frozen.
void compute_pivot_row(const SparseMatrix& a, LUFactors& lu, Spa& s, index_t i, double eps) {
  const index_t lo = a.row_ptr[i], hi = a.row_ptr[i + 1];
  if (lo == hi) throw ZeroRow(i);

  ++s.stamp;
  const std::uint32_t st = s.stamp;
  s.reach.clear();
  s.deps.clear();
  s.stack.clear();
  auto visit = [&](index_t c) {
    if (s.visited[c] != st) {
      s.visited[c] = st;
      s.x[c] = 0.0;
      s.reach.push_back(c);
      s.stack.push_back(c);
    }
  };
  for (index_t p = lo; p < hi; ++p) visit(a.col_idx[p]);
  visit(lu.pivot.col_at(i));
  while (!s.stack.empty()) {
    const index_t c = s.stack.back();
    s.stack.pop_back();
    const index_t j = lu.pivot.pos_of(c);
    if (j < i) {
      s.deps.push_back(j);
      const auto& uc = lu.u_cols[j];
      for (std::size_t q = 1; q < uc.size(); ++q) visit(uc[q]);
    }
  }
  std::sort(s.deps.begin(), s.deps.end());

  for (index_t p = lo; p < hi; ++p) s.x[a.col_idx[p]] = a.values[p];

  auto& lc = lu.l_cols[i];
  auto& lv = lu.l_vals[i];
  lc.assign(s.deps.begin(), s.deps.end());
  lv.resize(lc.size());
  for (std::size_t k = 0; k < lc.size(); ++k) {
    const index_t j = lc[k];
    const double xl = s.x[lu.pivot.col_at(j)];
    lv[k] = xl;
    const auto& ujc = lu.u_cols[j];
    const auto& ujv = lu.u_vals[j];
    for (std::size_t q = 1; q < ujc.size(); ++q) s.x[ujc[q]] -= xl * ujv[q];
  }

  index_t dcol = lu.pivot.col_at(i);
  double dval = s.x[dcol];
  double mx = 0.0;
  index_t mcol = -1;
  for (const index_t c : s.reach) {
    if (lu.pivot.pos_of(c) <= i) continue;
    const double av = std::abs(s.x[c]);
    if (av > mx || (av > 0.0 && av == mx && c < mcol)) {
      mx = av;
      mcol = c;
    }
  }
  if (dval == 0.0 && mx == 0.0) throw NumericallySingular(i);
  if (std::abs(dval) < eps * mx) {
    lu.pivot.exchange_positions(i, lu.pivot.pos_of(mcol));
    dcol = mcol;
    dval = s.x[mcol];
  }

  lu.diag[i] = dval;
  auto& uc = lu.u_cols[i];
  auto& uv = lu.u_vals[i];
  uc.clear();
  uv.clear();
  uc.push_back(dcol);
  uv.push_back(1.0);
  for (const index_t c : s.reach) {
    if (lu.pivot.pos_of(c) <= i) continue;
    uc.push_back(c);
    uv.push_back(s.x[c] / dval);
  }
}

enum class RowStatus { Ok, Fail, Abort };

// Value-only recomputation of a row on the stored pattern. With `check`, runs
// the pivot test instead of exchanging. With `wait_deps`, spins on each
// dependency's finish flag, bailing out if the shared flags fire.
RowStatus fixed_value_row(const SparseMatrix& a, FactorContext& ctx, LUFactors& lu, Spa& s,
                          index_t i, double eps, bool check, bool wait_deps) {
  const auto& lc = lu.l_cols[i];
  auto& lv = lu.l_vals[i];
  const auto& uc = lu.u_cols[i];

  for (const index_t j : lc) s.x[lu.pivot.col_at(j)] = 0.0;
  for (const index_t c : uc) s.x[c] = 0.0;
  for (index_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) s.x[a.col_idx[p]] = a.values[p];

  for (std::size_t k = 0; k < lc.size(); ++k) {
    const index_t j = lc[k];
    if (wait_deps) {
      int backoff = 0;
      while (!ctx.finish[j].load(std::memory_order_acquire)) {
        if (ctx.interrupted.load(std::memory_order_relaxed) ||
            ctx.aborted.load(std::memory_order_relaxed))
          return RowStatus::Abort;
        spin_pause(backoff);
      }
    }
    const double xl = s.x[lu.pivot.col_at(j)];
    lv[k] = xl;
    const auto& ujc = lu.u_cols[j];
    const auto& ujv = lu.u_vals[j];
    for (std::size_t q = 1; q < ujc.size(); ++q) s.x[ujc[q]] -= xl * ujv[q];
  }

  const double dval = s.x[uc[0]];
  if (check) {
    double mx = 0.0;
    for (std::size_t k = 1; k < uc.size(); ++k) mx = std::max(mx, std::abs(s.x[uc[k]]));
    if (dval == 0.0 || std::abs(dval) < eps * mx || i == ctx.forced_fail_row)
      return RowStatus::Fail;
  } else if (dval == 0.0) {
    throw ZeroPivot(i);
  }

  lu.diag[i] = dval;
  auto& uv = lu.u_vals[i];
  uv[0] = 1.0;
  for (std::size_t k = 1; k < uc.size(); ++k) uv[k] = s.x[uc[k]] / dval;
  ctx.finish[i].store(1, std::memory_order_release);
  return RowStatus::Ok;
}

// Cluster levels with a barrier each, then the pipelined remainder fed by a
// shared cursor. Used for both re-factorization (check=false) and fast
// factorization with pivot check (check=true).
FactorOutcome run_fixed(const SparseMatrix& a, FactorContext& ctx, LUFactors& lu, double eps,
                        int nt, bool check) {
  ensure_spa(ctx, nt);
  ctx.reset_finish();
  ctx.interrupted.store(false, std::memory_order_relaxed);
  ctx.aborted.store(false, std::memory_order_relaxed);
  ctx.cursor.store(0, std::memory_order_relaxed);

  const Levelization& lv = ctx.sym.egraph.levels;
  const index_t div = dividing_level(lv, nt, ctx.alpha);
  std::vector<index_t> pipe(lv.level_nodes.begin() + lv.level_ptr[div], lv.level_nodes.end());
  std::sort(pipe.begin(), pipe.end());
  const index_t n_pipe = static_cast<index_t>(pipe.size());

  ErrorSlot err;
  std::vector<std::vector<index_t>> failed(nt);

#pragma omp parallel num_threads(nt)
  {
    const int t = omp_get_thread_num();
    Spa& s = ctx.spa[t];

    for (index_t l = 0; l < div; ++l) {
      const index_t lo = lv.level_ptr[l];
      const index_t len = lv.level_ptr[l + 1] - lo;
      const index_t b = lo + static_cast<index_t>((static_cast<std::int64_t>(len) * t) / nt);
      const index_t e = lo + static_cast<index_t>((static_cast<std::int64_t>(len) * (t + 1)) / nt);
      for (index_t k = b; k < e; ++k) {
        const index_t i = lv.level_nodes[k];
        try {
          if (fixed_value_row(a, ctx, lu, s, i, eps, check, false) == RowStatus::Fail) {
            failed[t].push_back(i);
            ctx.interrupted.store(true, std::memory_order_release);
            // remaining rows of this level still complete
          }
        } catch (...) {
          err.put(std::current_exception());
          ctx.aborted.store(true, std::memory_order_release);
        }
      }
      // Double barrier: every thread must read the level's verdict before any
      // thread can write the flags again in the next level.
#pragma omp barrier
      const bool stop = ctx.interrupted.load(std::memory_order_acquire) ||
                        ctx.aborted.load(std::memory_order_acquire);
#pragma omp barrier
      if (stop) break;
    }

    if (!ctx.interrupted.load(std::memory_order_acquire) &&
        !ctx.aborted.load(std::memory_order_acquire)) {
      while (true) {
        if (ctx.interrupted.load(std::memory_order_relaxed) ||
            ctx.aborted.load(std::memory_order_relaxed))
          break;
        const index_t k = ctx.cursor.fetch_add(1, std::memory_order_relaxed);
        if (k >= n_pipe) break;
        const index_t i = pipe[k];
        try {
          const RowStatus rs = fixed_value_row(a, ctx, lu, s, i, eps, check, true);
          if (rs == RowStatus::Fail) {
            failed[t].push_back(i);
            ctx.interrupted.store(true, std::memory_order_release);
            break;
          }
          if (rs == RowStatus::Abort) break;
        } catch (...) {
          err.put(std::current_exception());
          ctx.aborted.store(true, std::memory_order_release);
          break;
        }
      }
    }
  }

  err.rethrow_if();

  FactorOutcome out;
  for (auto& f : failed) out.failed_rows.insert(out.failed_rows.end(), f.begin(), f.end());
  std::sort(out.failed_rows.begin(), out.failed_rows.end());
  out.status = ctx.interrupted.load(std::memory_order_acquire) ? FactorOutcome::Status::Interrupted
                                                               : FactorOutcome::Status::Completed;
  if (!out.completed()) out.finish_snapshot = ctx.finish_snapshot();
  return out;
}

// One row of the pipelined tail. Pre-rounds apply every dependency found
// strictly below the first unfinished row; the final round runs once all
// earlier rows in the sequence are finished, so pivoting sees a frozen prefix.
// Dependencies end up applied in globally ascending position order, which
// keeps the arithmetic identical to the sequential sweep.
// Sets *changed when the row's pattern or pivot differs from the stored one;
// otherwise values are written into the existing layout so entry order (and
// with it any solve-plan segmentation) survives.
void tail_row(const SparseMatrix& a, FactorContext& ctx, LUFactors& lu, Spa& s, index_t i,
              index_t k, const std::vector<index_t>& rows, double eps, bool* changed) {
  const index_t lo = a.row_ptr[i], hi = a.row_ptr[i + 1];
  if (lo == hi) throw ZeroRow(i);

  ++s.stamp;
  const std::uint32_t st = s.stamp;
  s.reach.clear();
  s.deps.clear();
  s.stack.clear();
  s.pending.clear();
  auto visit = [&](index_t c) {
    if (s.visited[c] != st) {
      s.visited[c] = st;
      s.x[c] = 0.0;
      s.reach.push_back(c);
      s.stack.push_back(c);
    }
  };
  for (index_t p = lo; p < hi; ++p) visit(a.col_idx[p]);
  for (index_t p = lo; p < hi; ++p) s.x[a.col_idx[p]] = a.values[p];

  auto run_round = [&](index_t limit) {
    s.stack.insert(s.stack.end(), s.pending.begin(), s.pending.end());
    s.pending.clear();
    s.round_deps.clear();
    while (!s.stack.empty()) {
      const index_t c = s.stack.back();
      s.stack.pop_back();
      const index_t j = lu.pivot.pos_of(c);
      if (j >= limit) {
        s.pending.push_back(c);
        continue;
      }
      if (s.expanded[c] == st) continue;
      s.expanded[c] = st;
      s.round_deps.push_back(j);
      const auto& ujc = lu.u_cols[j];
      for (std::size_t q = 1; q < ujc.size(); ++q) visit(ujc[q]);
    }
    std::sort(s.round_deps.begin(), s.round_deps.end());
    for (const index_t j : s.round_deps) {
      const double xl = s.x[lu.pivot.col_at(j)];
      const auto& ujc = lu.u_cols[j];
      const auto& ujv = lu.u_vals[j];
      for (std::size_t q = 1; q < ujc.size(); ++q) s.x[ujc[q]] -= xl * ujv[q];
    }
    s.deps.insert(s.deps.end(), s.round_deps.begin(), s.round_deps.end());
  };

  index_t done_limit = -1;
  int backoff = 0;
  while (true) {
    if (ctx.aborted.load(std::memory_order_relaxed)) return;
    const index_t pi = ctx.post_cursor.load(std::memory_order_acquire);
    if (pi < k) {
      const index_t limit = rows[pi];
      if (limit > done_limit) {
        run_round(limit);
        done_limit = limit;
      } else {
        spin_pause(backoff);
      }
      continue;
    }

    visit(lu.pivot.col_at(i));
    run_round(i);

    index_t dcol = lu.pivot.col_at(i);
    double dval = s.x[dcol];
    double mx = 0.0;
    index_t mcol = -1;
    for (const index_t c : s.reach) {
      if (lu.pivot.pos_of(c) <= i) continue;
      const double av = std::abs(s.x[c]);
      if (av > mx || (av > 0.0 && av == mx && c < mcol)) {
        mx = av;
        mcol = c;
      }
    }
    if (dval == 0.0 && mx == 0.0) throw NumericallySingular(i);
    if (std::abs(dval) < eps * mx) {
      lu.pivot.exchange_positions(i, lu.pivot.pos_of(mcol));
      dcol = mcol;
      dval = s.x[mcol];
    }

    std::sort(s.deps.begin(), s.deps.end());
    auto& lc = lu.l_cols[i];
    auto& lvv = lu.l_vals[i];
    auto& uc = lu.u_cols[i];
    auto& uv = lu.u_vals[i];

    std::size_t n_cand = 0;
    for (const index_t c : s.reach)
      if (lu.pivot.pos_of(c) > i) ++n_cand;
    bool same = !uc.empty() && uc[0] == dcol && uc.size() == n_cand + 1 &&
                lc.size() == s.deps.size() && std::equal(lc.begin(), lc.end(), s.deps.begin());
    for (std::size_t q = 1; same && q < uc.size(); ++q)
      same = s.visited[uc[q]] == st && lu.pivot.pos_of(uc[q]) > i;

    lu.diag[i] = dval;
    if (same) {
      for (std::size_t q = 0; q < lc.size(); ++q) lvv[q] = s.x[lu.pivot.col_at(lc[q])];
      uv[0] = 1.0;
      for (std::size_t q = 1; q < uc.size(); ++q) uv[q] = s.x[uc[q]] / dval;
    } else {
      *changed = true;
      lc.assign(s.deps.begin(), s.deps.end());
      lvv.resize(lc.size());
      for (std::size_t q = 0; q < lc.size(); ++q) lvv[q] = s.x[lu.pivot.col_at(lc[q])];
      uc.clear();
      uv.clear();
      uc.push_back(dcol);
      uv.push_back(1.0);
      for (const index_t c : s.reach) {
        if (lu.pivot.pos_of(c) <= i) continue;
        uc.push_back(c);
        uv.push_back(s.x[c] / dval);
      }
    }

    ctx.finish[i].store(1, std::memory_order_release);
    ctx.post_cursor.store(k + 1, std::memory_order_release);
    return;
  }
}

// Pipelined factorization with pivoting over `rows` (ascending). Rows are
// claimed from a shared cursor; finish flags outside `rows` must already be
// set and those inside cleared. Returns whether any row's pattern or pivot
// changed.
bool pipeline_pivot_factor(const SparseMatrix& a, FactorContext& ctx, LUFactors& lu,
                           const std::vector<index_t>& rows, double eps, int nt) {
  ensure_spa(ctx, nt);
  ctx.cursor.store(0, std::memory_order_relaxed);
  ctx.post_cursor.store(0, std::memory_order_relaxed);
  ctx.aborted.store(false, std::memory_order_relaxed);
  const index_t m = static_cast<index_t>(rows.size());
  ErrorSlot err;
  std::vector<char> changed(nt, 0);

#pragma omp parallel num_threads(nt)
  {
    const int t = omp_get_thread_num();
    Spa& s = ctx.spa[t];
    bool my_changed = false;
    while (!ctx.aborted.load(std::memory_order_relaxed)) {
      const index_t k = ctx.cursor.fetch_add(1, std::memory_order_relaxed);
      if (k >= m) break;
      try {
        tail_row(a, ctx, lu, s, rows[k], k, rows, eps, &my_changed);
      } catch (...) {
        err.put(std::current_exception());
        ctx.aborted.store(true, std::memory_order_release);
        break;
      }
    }
    changed[t] = my_changed ? 1 : 0;
  }
  err.rethrow_if();
  for (const char c : changed)
    if (c) return true;
  return false;
}

}  // namespace

LUFactors factor_full(const SparseMatrix& a_pre, FactorContext& ctx, double eps, int n_threads) {
  const int nt = std::max(1, n_threads);
  ensure_spa(ctx, nt);
  LUFactors lu;
  init_factor_storage(lu, a_pre.n);
  ctx.reset_finish();
  ctx.aborted.store(false, std::memory_order_relaxed);
  ctx.interrupted.store(false, std::memory_order_relaxed);

  if (nt == 1) {
    Spa& s = ctx.spa[0];
    for (index_t i = 0; i < a_pre.n; ++i) {
      compute_pivot_row(a_pre, lu, s, i, eps);
      ctx.finish[i].store(1, std::memory_order_relaxed);
    }
  } else {
    const Levelization& lv = ctx.sym.tree_levels;
    const index_t div = dividing_level(lv, nt, ctx.alpha);
    ErrorSlot err;

#pragma omp parallel num_threads(nt)
    {
      const int t = omp_get_thread_num();
      Spa& s = ctx.spa[t];
      for (index_t l = 0; l < div; ++l) {
        const index_t lo = lv.level_ptr[l];
        const index_t len = lv.level_ptr[l + 1] - lo;
        const index_t b = lo + static_cast<index_t>((static_cast<std::int64_t>(len) * t) / nt);
        const index_t e = lo + static_cast<index_t>((static_cast<std::int64_t>(len) * (t + 1)) / nt);
        for (index_t k = b; k < e; ++k) {
          const index_t i = lv.level_nodes[k];
          try {
            compute_pivot_row(a_pre, lu, s, i, eps);
            ctx.finish[i].store(1, std::memory_order_release);
          } catch (...) {
            err.put(std::current_exception());
            ctx.aborted.store(true, std::memory_order_release);
          }
        }
#pragma omp barrier
        const bool stop = ctx.aborted.load(std::memory_order_acquire);
#pragma omp barrier
        if (stop) break;
      }
    }
    err.rethrow_if();

    std::vector<index_t> pipe(lv.level_nodes.begin() + lv.level_ptr[div], lv.level_nodes.end());
    std::sort(pipe.begin(), pipe.end());
    if (!pipe.empty()) pipeline_pivot_factor(a_pre, ctx, lu, pipe, eps, nt);
  }

  recompute_stats(lu);
  return lu;
}

LUFactors factor_full(const SparseMatrix& a_pre, double eps, int n_threads) {
  FactorContext ctx(a_pre, std::max(1, n_threads), eps);
  return factor_full(a_pre, ctx, eps, n_threads);
}

void refactor(const SparseMatrix& a_pre, FactorContext& ctx, LUFactors& lu, int n_threads) {
  ctx.ensure_egraph(lu);
  run_fixed(a_pre, ctx, lu, ctx.eps, std::max(1, n_threads), /*check=*/false);
}

void refactor(const SparseMatrix& a_pre, LUFactors& lu, int n_threads) {
  FactorContext ctx(a_pre, std::max(1, n_threads), 1e-3);
  refactor(a_pre, ctx, lu, n_threads);
}

FactorOutcome fast_factor(const SparseMatrix& a_pre, FactorContext& ctx, LUFactors& lu,
                          double eps, int n_threads) {
  if (eps != ctx.eps)
    throw Error("pivot threshold must stay constant per context");
  if (ctx.sym.egraph.generation != lu.structure_generation)
    throw StaleSymbolic("dependency view generation " +
                        std::to_string(ctx.sym.egraph.generation) + " vs factors " +
                        std::to_string(lu.structure_generation));
  return run_fixed(a_pre, ctx, lu, eps, std::max(1, n_threads), /*check=*/true);
}

void tail_factor(const SparseMatrix& a_pre, FactorContext& ctx, LUFactors& lu,
                 const std::vector<index_t>& restart, double eps, int n_threads) {
  if (eps != ctx.eps)
    throw Error("pivot threshold must stay constant per context");
  if (restart.empty()) return;
  for (const index_t r : restart) ctx.finish[r].store(0, std::memory_order_relaxed);
  const bool changed =
      pipeline_pivot_factor(a_pre, ctx, lu, restart, eps, std::max(1, n_threads));
  if (changed) ++lu.structure_generation;
  recompute_stats(lu);
}

DriverResult factor_driver(const SparseMatrix& a_pre, FactorContext& ctx, LUFactors& lu,
                           double eps, int n_threads) {
  ctx.ensure_egraph(lu);
  DriverResult res;
  const FactorOutcome out = fast_factor(a_pre, ctx, lu, eps, n_threads);
  if (!out.completed()) {
    res.repivoted = true;
    res.restart = restart_rows(ctx.sym.tree, out.finish_snapshot);
    tail_factor(a_pre, ctx, lu, res.restart, eps, n_threads);
    ctx.ensure_egraph(lu);
  }
  return res;
}

void recompute_stats(LUFactors& lu) {
  std::int64_t fill = 0, flops = 0;
  for (index_t i = 0; i < lu.n; ++i) {
    fill += static_cast<std::int64_t>(lu.l_cols[i].size()) +
            static_cast<std::int64_t>(lu.u_cols[i].size());
    for (const index_t j : lu.l_cols[i])
      flops += 2 * (static_cast<std::int64_t>(lu.u_cols[j].size()) - 1);
    flops += static_cast<std::int64_t>(lu.u_cols[i].size()) - 1;
  }
  lu.fill_nnz = fill;
  lu.flops = flops;
}

bool satisfies_pivot_rule(const LUFactors& lu, double eps) {
  const double bound = 1.0 / eps * (1.0 + 1e-12);
  for (index_t i = 0; i < lu.n; ++i) {
    if (!std::isfinite(lu.diag[i]) || lu.diag[i] == 0.0) return false;
    for (std::size_t k = 1; k < lu.u_vals[i].size(); ++k)
      if (std::abs(lu.u_vals[i][k]) > bound) return false;
  }
  return true;
}

}  // namespace cktkit
