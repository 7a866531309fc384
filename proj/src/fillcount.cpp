// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#include "cktkit/errors.hpp"
#include "cktkit/ordering.hpp"

namespace cktkit {

// Up-looking symbolic factorization with diagonal pivots: per row, the filled
// pattern is the set of columns reachable from the row's pattern through the
// off-diagonal patterns of earlier U rows.
FillStats symbolic_fill_count(const SparseMatrix& pattern, const Permutation& sym_perm) {
  const SparseMatrix b = permute(pattern, sym_perm, sym_perm);
  const index_t n = b.n;

  std::vector<std::vector<index_t>> u_off(n);  // off-diagonal U patterns
  std::vector<std::uint32_t> mark(n, 0);
  std::uint32_t stamp = 0;
  std::vector<index_t> stack, reach;

  FillStats st;
  for (index_t i = 0; i < n; ++i) {
    ++stamp;
    reach.clear();
    stack.clear();
    bool has_diag = false;
    for (index_t p = b.row_ptr[i]; p < b.row_ptr[i + 1]; ++p) {
      stack.push_back(b.col_idx[p]);
      has_diag |= b.col_idx[p] == i;
    }
    if (!has_diag) throw ZeroDiagonal(i);
    while (!stack.empty()) {
      const index_t c = stack.back();
      stack.pop_back();
      if (mark[c] == stamp) continue;
      mark[c] = stamp;
      reach.push_back(c);
      if (c < i)
        for (const index_t c2 : u_off[c])
          if (mark[c2] != stamp) stack.push_back(c2);
    }

    index_t nl = 0;
    auto& urow = u_off[i];
    for (const index_t c : reach) {
      if (c < i) {
        ++nl;
        st.flops += 2 * static_cast<std::int64_t>(u_off[c].size());
      } else if (c > i) {
        urow.push_back(c);
      }
    }
    st.flops += static_cast<std::int64_t>(urow.size());  // divisions by the pivot
    st.fill_nnz += nl + static_cast<std::int64_t>(urow.size()) + 1;
  }
  return st;
}

}  // namespace cktkit
