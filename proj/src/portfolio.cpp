// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#include <exception>
#include <thread>

#include "cktkit/errors.hpp"
#include "cktkit/ordering.hpp"

namespace cktkit {

PreprocessResult run_portfolio(const SparseMatrix& a, bool want_scaling,
                               index_t nd_leaf_threshold) {
  PreprocessResult res;
  res.pivot = max_weight_matching(a, want_scaling);
  res.scaled = want_scaling;

  SparseMatrix a1 = permute(a, res.pivot.row_perm, Permutation::identity(a.n));
  if (want_scaling) a1 = apply_scaling(a1, res.pivot.scaling);

  const SparseMatrix sym = symmetrize_pattern(a1);

  res.candidates.resize(3);
  std::exception_ptr errs[3] = {};
  auto task = [&](int k) {
    try {
      OrderingCandidate& c = res.candidates[k];
      c.method = static_cast<OrderingMethod>(k);
      switch (c.method) {
        case OrderingMethod::AMD: c.sym_perm = order_amd(sym); break;
        case OrderingMethod::AMF: c.sym_perm = order_amf(sym); break;
        case OrderingMethod::ND_CMD: c.sym_perm = order_nd_cmd(sym, nd_leaf_threshold); break;
      }
      const FillStats st = symbolic_fill_count(a1, c.sym_perm);
      c.fill_nnz = st.fill_nnz;
      c.flops = st.flops;
    } catch (...) {
      errs[k] = std::current_exception();
    }
  };

  {
    std::thread t1(task, 1), t2(task, 2);
    task(0);
    t1.join();
    t2.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);

  int best = 0;
  for (int k = 1; k < 3; ++k) {
    const auto& c = res.candidates[k];
    const auto& b = res.candidates[best];
    if (c.fill_nnz < b.fill_nnz || (c.fill_nnz == b.fill_nnz && c.flops < b.flops)) best = k;
  }
  res.chosen_index = best;
  res.A_pre = permute(a1, res.chosen().sym_perm, res.chosen().sym_perm);
  return res;
}

}  // namespace cktkit
