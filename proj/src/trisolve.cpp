// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#include "cktkit/trisolve.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "cktkit/errors.hpp"

namespace cktkit {

void solve_lower_seq(const LUFactors& lu, SolveVector& v) {
  for (index_t i = 0; i < lu.n; ++i) {
    const auto& lc = lu.l_cols[i];
    const auto& lv = lu.l_vals[i];
    double s = 0.0;
    for (std::size_t k = 0; k < lc.size(); ++k) s += v.x[lc[k]] * lv[k];
    v.x[i] = (v.x[i] - s) / lu.diag[i];
  }
}

void solve_upper_seq(const LUFactors& lu, SolveVector& v) {
  for (index_t j = lu.n - 1; j >= 0; --j) {
    const auto& uc = lu.u_cols[j];
    const auto& uv = lu.u_vals[j];
    double s = 0.0;
    for (std::size_t k = 1; k < uc.size(); ++k) s += uv[k] * v.x[lu.pivot.pos_of(uc[k])];
    v.x[j] -= s;
  }
  // Position space -> column space of A_pre.
  v.scratch.resize(v.x.size());
  for (index_t j = 0; j < lu.n; ++j) v.scratch[lu.pivot.col_at(j)] = v.x[j];
  v.x.swap(v.scratch);
}

namespace {

// Balanced prefix cuts: boundaries land on the prefix sums nearest to the
// k/nparts targets, so part totals differ by at most one item's weight.
// Weights are fetched lazily so callers avoid materializing them.
template <typename WeightAt>
std::vector<index_t> balanced_cuts(index_t lo, index_t hi, int nparts, WeightAt&& weight,
                                   std::int64_t* ops) {
  std::vector<index_t> cuts(nparts + 1);
  cuts[0] = lo;
  cuts[nparts] = hi;
  std::int64_t total = 0;
  for (index_t r = lo; r < hi; ++r) total += weight(r);
  if (ops) *ops += hi - lo;

  index_t r = lo;
  std::int64_t acc = 0;
  for (int k = 1; k < nparts; ++k) {
    const double target = static_cast<double>(total) * k / nparts;
    while (r < hi && static_cast<double>(acc) < target) {
      const std::int64_t w = weight(r);
      // stop before this row if that prefix is nearer the target
      if (std::abs(static_cast<double>(acc) - target) <=
          std::abs(static_cast<double>(acc + w) - target))
        break;
      acc += w;
      ++r;
      if (ops) ++*ops;
    }
    cuts[k] = r;
  }
  // Boundaries must be non-decreasing by construction; nothing else required.
  return cuts;
}

// One quicksort-partition step over [lo,hi): entries satisfying pred first.
// Returns the boundary. Keeps (col,val) pairs together.
template <typename Pred>
std::size_t partition_row(std::vector<index_t>& cols, std::vector<double>& vals, std::size_t lo,
                          std::size_t hi, Pred&& pred) {
  std::size_t a = lo, b = hi;
  while (a < b) {
    if (pred(cols[a])) {
      ++a;
    } else {
      --b;
      std::swap(cols[a], cols[b]);
      std::swap(vals[a], vals[b]);
    }
  }
  return a;
}

struct BlockLevels {
  Levelization lv;
  index_t div = 0;
};

// Levelization of the sparse triangular block [0,p0). Dependencies are read
// straight from the factor rows; for the upper factor only entries landing at
// positions below p0 count (the rest are already solved by the slices).
BlockLevels levelize_block(const LUFactors& lu, SolveTarget target, index_t p0, int nt,
                           double alpha, std::int64_t* ops) {
  BlockLevels bl;
  auto& lv = bl.lv;
  lv.level_of.assign(p0, 0);
  if (target == SolveTarget::Lower) {
    for (index_t i = 0; i < p0; ++i) {
      index_t m = -1;
      for (const index_t j : lu.l_cols[i]) m = std::max(m, lv.level_of[j]);
      lv.level_of[i] = m + 1;
      if (ops) *ops += static_cast<std::int64_t>(lu.l_cols[i].size());
    }
  } else {
    for (index_t j = p0 - 1; j >= 0; --j) {
      index_t m = -1;
      const auto& uc = lu.u_cols[j];
      for (std::size_t k = 1; k < uc.size(); ++k) {
        const index_t p = lu.pivot.pos_of(uc[k]);
        if (p < p0) m = std::max(m, lv.level_of[p]);
      }
      lv.level_of[j] = m + 1;
      if (ops) *ops += static_cast<std::int64_t>(uc.size());
    }
  }
  lv.n_levels = 0;
  for (index_t i = 0; i < p0; ++i) lv.n_levels = std::max(lv.n_levels, lv.level_of[i] + 1);
  lv.level_ptr.assign(lv.n_levels + 1, 0);
  for (index_t i = 0; i < p0; ++i) ++lv.level_ptr[lv.level_of[i] + 1];
  for (index_t l = 0; l < lv.n_levels; ++l) lv.level_ptr[l + 1] += lv.level_ptr[l];
  lv.level_nodes.resize(p0);
  std::vector<index_t> cursor(lv.level_ptr.begin(), lv.level_ptr.end() - 1);
  for (index_t i = 0; i < p0; ++i) lv.level_nodes[cursor[lv.level_of[i]]++] = i;
  bl.div = dividing_level(lv, nt, alpha);
  return bl;
}

}  // namespace

SolvePlan build_solve_plan(LUFactors& lu, SolveTarget target, int n_threads,
                           const PlanParams& params) {
  const index_t n = lu.n;
  const int nt = std::max(1, n_threads);
  SolvePlan plan;
  plan.target = target;
  plan.n_threads = nt;
  plan.generation = lu.structure_generation;
  std::int64_t ops = 0;

  const bool lower = target == SolveTarget::Lower;
  auto row_len = [&](index_t r) -> std::int64_t {
    return lower ? static_cast<std::int64_t>(lu.l_cols[r].size()) + 1
                 : static_cast<std::int64_t>(lu.u_cols[r].size());
  };

  std::int64_t total = 0;
  for (index_t r = 0; r < n; ++r) total += row_len(r);
  ops += n;

  // Backward scan for P0: grow the dense corner until it holds enough of the
  // factor. For the lower factor the corner gains one diagonal plus the
  // strict entries of column r per step; for the upper factor whole rows.
  index_t p0 = -1;
  {
    std::vector<std::int64_t> gain(n, 1);
    if (lower) {
      for (index_t i = 0; i < n; ++i) {
        for (const index_t j : lu.l_cols[i]) ++gain[j];
        ops += static_cast<std::int64_t>(lu.l_cols[i].size());
      }
    } else {
      for (index_t r = 0; r < n; ++r) gain[r] = row_len(r);
      ops += n;
    }
    std::int64_t acc = 0;
    for (index_t r = n - 1; r >= 1; --r) {
      acc += gain[r];
      ++ops;
      if (static_cast<double>(acc) >= params.frac * static_cast<double>(total) &&
          acc >= params.min_nnz) {
        p0 = r;
        break;
      }
    }
  }

  if (p0 >= 1 && n - p0 >= 1) {
    plan.partitioned = true;
    plan.m = static_cast<int>(std::min<index_t>(params.m, n - p0));
    plan.cut = balanced_cuts(p0, n, plan.m, row_len, &ops);

    // Per-row segmentation. Lower rows are ascending and must stay that way
    // (the factor update sweep depends on it), so the boundary is a binary
    // search; upper rows are unsorted and get one quicksort-partition step
    // (pivot slot 0 stays put).
    plan.seg.assign(n - p0, 0);
#pragma omp parallel for num_threads(nt) schedule(static)
    for (index_t r = p0; r < n; ++r) {
      int k = 1;
      while (plan.cut[k] <= r) ++k;  // slice index with cut[k-1] <= r < cut[k]
      if (lower) {
        const auto& lc = lu.l_cols[r];
        plan.seg[r - p0] = static_cast<index_t>(
            std::lower_bound(lc.begin(), lc.end(), plan.cut[k - 1]) - lc.begin());
      } else {
        const index_t bound = plan.cut[k];
        plan.seg[r - p0] = static_cast<index_t>(partition_row(
            lu.u_cols[r], lu.u_vals[r], 1, lu.u_cols[r].size(),
            [&](index_t c) { return lu.pivot.pos_of(c) < bound; }));
      }
    }
    for (index_t r = p0; r < n; ++r) ops += row_len(r);

    // Rectangular-slice thread assignment, balanced by segment nonzeros.
    plan.slice_thread_ptr.assign(static_cast<std::size_t>(plan.m) * (nt + 1), 0);
    for (int k = 1; k <= plan.m; ++k) {
      auto rect_len = [&](index_t r) -> std::int64_t {
        if (lower) return plan.seg[r - p0];
        return row_len(r) - plan.seg[r - p0];
      };
      const auto cuts = balanced_cuts(plan.cut[k - 1], plan.cut[k], nt, rect_len, &ops);
      for (int t = 0; t <= nt; ++t)
        plan.slice_thread_ptr[static_cast<std::size_t>(k - 1) * (nt + 1) + t] = cuts[t];
    }
  } else {
    p0 = n;  // whole matrix is the sparse triangular block
  }

  BlockLevels bl = levelize_block(lu, target, p0, nt, params.alpha, &ops);
  plan.n_cluster_levels = bl.div;
  plan.level_ptr.assign(bl.lv.level_ptr.begin(), bl.lv.level_ptr.begin() + bl.div + 1);
  plan.level_nodes.assign(bl.lv.level_nodes.begin(),
                          bl.lv.level_nodes.begin() + plan.level_ptr[bl.div]);
  plan.seq_rows.assign(bl.lv.level_nodes.begin() + plan.level_ptr[bl.div], bl.lv.level_nodes.end());
  std::sort(plan.seq_rows.begin(), plan.seq_rows.end());
  if (!lower) std::reverse(plan.seq_rows.begin(), plan.seq_rows.end());
  ops += static_cast<std::int64_t>(plan.seq_rows.size());

  plan.level_thread_ptr.assign(static_cast<std::size_t>(bl.div) * (nt + 1), 0);
  for (index_t l = 0; l < bl.div; ++l) {
    auto w = [&](index_t k) { return row_len(plan.level_nodes[k]); };
    const auto cuts = balanced_cuts(plan.level_ptr[l], plan.level_ptr[l + 1], nt, w, &ops);
    for (int t = 0; t <= nt; ++t)
      plan.level_thread_ptr[static_cast<std::size_t>(l) * (nt + 1) + t] = cuts[t];
  }

  plan.setup_ops = ops;
  return plan;
}

namespace {

inline void lower_row_kernel(const LUFactors& lu, std::vector<double>& x, index_t i) {
  const auto& lc = lu.l_cols[i];
  const auto& lv = lu.l_vals[i];
  double s = 0.0;
  for (std::size_t k = 0; k < lc.size(); ++k) s += x[lc[k]] * lv[k];
  x[i] = (x[i] - s) / lu.diag[i];
}

inline void upper_row_kernel(const LUFactors& lu, std::vector<double>& x, index_t j) {
  const auto& uc = lu.u_cols[j];
  const auto& uv = lu.u_vals[j];
  double s = 0.0;
  for (std::size_t k = 1; k < uc.size(); ++k) s += uv[k] * x[lu.pivot.pos_of(uc[k])];
  x[j] -= s;
}

void check_plan(const SolvePlan& plan, const LUFactors& lu, SolveTarget target, int nt) {
  if (plan.generation != lu.structure_generation)
    throw StaleSymbolic("solve plan built for generation " + std::to_string(plan.generation) +
                        ", factors at " + std::to_string(lu.structure_generation));
  if (plan.target != target) throw Error("solve plan target mismatch");
  if (plan.n_threads != nt)
    throw Error("solve plan built for " + std::to_string(plan.n_threads) + " threads, got " +
                std::to_string(nt));
}

}  // namespace

void solve_lower_par(const SolvePlan& plan, const LUFactors& lu, SolveVector& v, int n_threads) {
  const int nt = std::max(1, n_threads);
  check_plan(plan, lu, SolveTarget::Lower, nt);
  const index_t p0 = plan.partitioned ? plan.cut[0] : lu.n;
  std::vector<double>& x = v.x;

#pragma omp parallel num_threads(nt)
  {
    const int t = omp_get_thread_num();
    for (index_t l = 0; l < plan.n_cluster_levels; ++l) {
      const std::size_t base = static_cast<std::size_t>(l) * (nt + 1);
      for (index_t k = plan.level_thread_ptr[base + t]; k < plan.level_thread_ptr[base + t + 1];
           ++k)
        lower_row_kernel(lu, x, plan.level_nodes[k]);
#pragma omp barrier
    }
    if (t == 0)
      for (const index_t i : plan.seq_rows) lower_row_kernel(lu, x, i);
#pragma omp barrier
    for (int k = 1; k <= plan.m; ++k) {
      const std::size_t base = static_cast<std::size_t>(k - 1) * (nt + 1);
      for (index_t r = plan.slice_thread_ptr[base + t]; r < plan.slice_thread_ptr[base + t + 1];
           ++r) {
        const auto& lc = lu.l_cols[r];
        const auto& lv = lu.l_vals[r];
        const index_t seg = plan.seg[r - p0];
        double s = 0.0;
        for (index_t q = 0; q < seg; ++q) s += x[lc[q]] * lv[q];
        x[r] -= s;
      }
#pragma omp barrier
      if (t == 0) {
        for (index_t r = plan.cut[k - 1]; r < plan.cut[k]; ++r) {
          const auto& lc = lu.l_cols[r];
          const auto& lv = lu.l_vals[r];
          double s = 0.0;
          for (std::size_t q = plan.seg[r - p0]; q < lc.size(); ++q) s += x[lc[q]] * lv[q];
          x[r] = (x[r] - s) / lu.diag[r];
        }
      }
#pragma omp barrier
    }
  }
}

void solve_upper_par(const SolvePlan& plan, const LUFactors& lu, SolveVector& v, int n_threads) {
  const int nt = std::max(1, n_threads);
  check_plan(plan, lu, SolveTarget::Upper, nt);
  const index_t p0 = plan.partitioned ? plan.cut[0] : lu.n;
  const index_t n = lu.n;
  std::vector<double>& x = v.x;
  v.scratch.resize(x.size());
  std::vector<double>& scratch = v.scratch;

#pragma omp parallel num_threads(nt)
  {
    const int t = omp_get_thread_num();
    for (int k = plan.m; k >= 1; --k) {
      const std::size_t base = static_cast<std::size_t>(k - 1) * (nt + 1);
      for (index_t r = plan.slice_thread_ptr[base + t]; r < plan.slice_thread_ptr[base + t + 1];
           ++r) {
        const auto& uc = lu.u_cols[r];
        const auto& uv = lu.u_vals[r];
        double s = 0.0;
        for (std::size_t q = plan.seg[r - p0]; q < uc.size(); ++q)
          s += uv[q] * x[lu.pivot.pos_of(uc[q])];
        x[r] -= s;
      }
#pragma omp barrier
      if (t == 0) {
        for (index_t r = plan.cut[k] - 1; r >= plan.cut[k - 1]; --r) {
          const auto& uc = lu.u_cols[r];
          const auto& uv = lu.u_vals[r];
          double s = 0.0;
          const index_t seg = plan.seg[r - p0];
          for (index_t q = 1; q < seg; ++q) s += uv[q] * x[lu.pivot.pos_of(uc[q])];
          x[r] -= s;
        }
      }
#pragma omp barrier
    }
    for (index_t l = 0; l < plan.n_cluster_levels; ++l) {
      const std::size_t base = static_cast<std::size_t>(l) * (nt + 1);
      for (index_t k = plan.level_thread_ptr[base + t]; k < plan.level_thread_ptr[base + t + 1];
           ++k)
        upper_row_kernel(lu, x, plan.level_nodes[k]);
#pragma omp barrier
    }
    if (t == 0)
      for (const index_t j : plan.seq_rows) upper_row_kernel(lu, x, j);
#pragma omp barrier
    // Position space -> column space.
    {
      const index_t b = static_cast<index_t>((static_cast<std::int64_t>(n) * t) / nt);
      const index_t e = static_cast<index_t>((static_cast<std::int64_t>(n) * (t + 1)) / nt);
      for (index_t j = b; j < e; ++j) scratch[lu.pivot.col_at(j)] = x[j];
#pragma omp barrier
      for (index_t j = b; j < e; ++j) x[j] = scratch[j];
    }
  }
}

}  // namespace cktkit
