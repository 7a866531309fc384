// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "cktkit/sparse.hpp"

namespace cktkit {

/// Tridiagonal matrix [-1, 4, -1] of dimension n.
Triplets gen_tridiag(index_t n);

/// 5-point Laplacian on a k-by-k grid (dimension k*k).
Triplets gen_grid(index_t k);

/// Circuit-flavoured random matrix: structurally symmetric off-diagonal
/// pattern, full diagonal, diagonally dominant values. `target_nnz` counts
/// total entries including the diagonal.
Triplets gen_randckt(index_t n, index_t target_nnz, std::uint64_t seed);

/// Parses "tridiag:N", "grid:K" or "randckt:N,NNZ" into a matrix.
Triplets parse_generator(const std::string& spec, std::uint64_t seed);

}  // namespace cktkit
