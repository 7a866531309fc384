// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#include "cktkit/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "cktkit/errors.hpp"

namespace cktkit {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    auto pos = line.find_first_not_of(" \t\r\n");
    if (pos == std::string::npos) continue;
    if (line[pos] == '%') continue;
    return true;
  }
  return false;
}

}  // namespace

Triplets read_matrix_market(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(origin + ": empty file");

  std::istringstream hs(line);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (lower(banner) != "%%matrixmarket" || lower(object) != "matrix")
    throw ParseError(origin + ": not a Matrix Market matrix file");
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);

  if (format != "coordinate")
    throw UnsupportedFormat(origin + ": only coordinate format is supported");
  if (field != "real" && field != "integer")
    throw UnsupportedFormat(origin + ": unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric")
    throw UnsupportedFormat(origin + ": unsupported symmetry '" + symmetry + "'");

  if (!next_content_line(in, line)) throw ParseError(origin + ": missing size line");
  long long rows = 0, cols = 0, count = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> rows >> cols >> count))
      throw ParseError(origin + ": malformed size line '" + line + "'");
  }
  if (rows != cols) throw DimensionError(origin + ": matrix is not square");
  if (rows < 0 || count < 0) throw ParseError(origin + ": negative size");

  Triplets t;
  t.n_rows = static_cast<index_t>(rows);
  t.n_cols = static_cast<index_t>(cols);
  t.entries.reserve(symmetry == "general" ? count : 2 * count);

  for (long long k = 0; k < count; ++k) {
    if (!next_content_line(in, line))
      throw ParseError(origin + ": expected " + std::to_string(count) + " entries, got " +
                       std::to_string(k));
    std::istringstream ss(line);
    long long i = 0, j = 0;
    double v = 0.0;
    if (!(ss >> i >> j >> v)) throw ParseError(origin + ": malformed entry '" + line + "'");
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw ParseError(origin + ": entry index out of bounds in '" + line + "'");
    const index_t r = static_cast<index_t>(i - 1);
    const index_t c = static_cast<index_t>(j - 1);
    t.entries.push_back({r, c, v});
    if (r != c) {
      if (symmetry == "symmetric") t.entries.push_back({c, r, v});
      if (symmetry == "skew-symmetric") t.entries.push_back({c, r, -v});
    }
  }
  return t;
}

Triplets read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  return read_matrix_market(in, path);
}

}  // namespace cktkit
