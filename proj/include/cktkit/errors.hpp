// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

#include "cktkit/types.hpp"

namespace cktkit {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  using Error::Error;
};

struct UnsupportedFormat : Error {
  using Error::Error;
};

struct DimensionError : Error {
  using Error::Error;
};

/// No perfect structural matching exists (some row or column cannot be covered).
struct StructurallySingular : Error {
  using Error::Error;
};

/// A structurally required diagonal entry is missing.
struct ZeroDiagonal : Error {
  index_t row;
  explicit ZeroDiagonal(index_t r)
      : Error("structural diagonal missing at row " + std::to_string(r)), row(r) {}
};

/// All pivot candidates of a row are exactly zero.
struct NumericallySingular : Error {
  index_t row;
  explicit NumericallySingular(index_t r)
      : Error("no nonzero pivot candidate at row " + std::to_string(r)), row(r) {}
};

/// A matrix row has no structural entries at all.
struct ZeroRow : Error {
  index_t row;
  explicit ZeroRow(index_t r) : Error("empty row " + std::to_string(r)), row(r) {}
};

/// Re-factorization hit an exact zero on the diagonal.
struct ZeroPivot : Error {
  index_t row;
  explicit ZeroPivot(index_t r) : Error("zero pivot at row " + std::to_string(r)), row(r) {}
};

/// A cached symbolic product (dependency levels, solve plan) no longer matches
/// the factors' structure generation.
struct StaleSymbolic : Error {
  using Error::Error;
};

}  // namespace cktkit
