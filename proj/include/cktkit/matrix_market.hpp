// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>

#include "cktkit/sparse.hpp"

namespace cktkit {

/// Reads a Matrix Market coordinate file (real or integer field; general,
/// symmetric or skew-symmetric storage). Indices are converted to 0-based.
/// Symmetric storage is expanded to both triangles (the diagonal is not
/// duplicated). Complex and pattern fields are rejected, as are non-square
/// matrices and the dense "array" format.
Triplets read_matrix_market(const std::string& path);

Triplets read_matrix_market(std::istream& in, const std::string& origin = "<stream>");

}  // namespace cktkit
