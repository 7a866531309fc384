// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#include "cktkit/generators.hpp"

#include <random>
#include <set>

#include "cktkit/errors.hpp"

namespace cktkit {

Triplets gen_tridiag(index_t n) {
  Triplets t;
  t.n_rows = t.n_cols = n;
  t.entries.reserve(3 * n);
  for (index_t i = 0; i < n; ++i) {
    t.entries.push_back({i, i, 4.0});
    if (i > 0) t.entries.push_back({i, i - 1, -1.0});
    if (i + 1 < n) t.entries.push_back({i, i + 1, -1.0});
  }
  return t;
}

Triplets gen_grid(index_t k) {
  const index_t n = k * k;
  Triplets t;
  t.n_rows = t.n_cols = n;
  t.entries.reserve(5 * n);
  auto id = [k](index_t r, index_t c) { return r * k + c; };
  for (index_t r = 0; r < k; ++r)
    for (index_t c = 0; c < k; ++c) {
      const index_t v = id(r, c);
      t.entries.push_back({v, v, 4.0});
      if (r > 0) t.entries.push_back({v, id(r - 1, c), -1.0});
      if (r + 1 < k) t.entries.push_back({v, id(r + 1, c), -1.0});
      if (c > 0) t.entries.push_back({v, id(r, c - 1), -1.0});
      if (c + 1 < k) t.entries.push_back({v, id(r, c + 1), -1.0});
    }
  return t;
}

Triplets gen_randckt(index_t n, index_t target_nnz, std::uint64_t seed) {
  if (target_nnz < n) target_nnz = n;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<index_t> pick(0, n - 1);
  std::uniform_real_distribution<double> val(-1.0, 1.0);

  std::set<std::pair<index_t, index_t>> offdiag;
  const index_t want_pairs = (target_nnz - n) / 2;
  index_t attempts = 0;
  while (static_cast<index_t>(offdiag.size()) < want_pairs && attempts < 20 * want_pairs + 100) {
    ++attempts;
    index_t i = pick(rng), j = pick(rng);
    if (i == j) continue;
    offdiag.insert({std::min(i, j), std::max(i, j)});
  }

  Triplets t;
  t.n_rows = t.n_cols = n;
  std::vector<double> rowsum(n, 0.0);
  for (const auto& [i, j] : offdiag) {
    const double a = val(rng), b = val(rng);
    t.entries.push_back({i, j, a});
    t.entries.push_back({j, i, b});
    rowsum[i] += std::abs(a);
    rowsum[j] += std::abs(b);
  }
  std::uniform_real_distribution<double> bump(0.1, 1.0);
  for (index_t i = 0; i < n; ++i)
    t.entries.push_back({i, i, rowsum[i] + bump(rng)});
  return t;
}

Triplets parse_generator(const std::string& spec, std::uint64_t seed) {
  auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw ParseError("generator spec '" + spec + "' (expected name:args)");
  const std::string name = spec.substr(0, colon);
  const std::string args = spec.substr(colon + 1);
  try {
    if (name == "tridiag") return gen_tridiag(static_cast<index_t>(std::stol(args)));
    if (name == "grid") return gen_grid(static_cast<index_t>(std::stol(args)));
    if (name == "randckt") {
      auto comma = args.find(',');
      if (comma == std::string::npos) throw ParseError("randckt needs N,NNZ");
      return gen_randckt(static_cast<index_t>(std::stol(args.substr(0, comma))),
                         static_cast<index_t>(std::stol(args.substr(comma + 1))), seed);
    }
  } catch (const std::invalid_argument&) {
    throw ParseError("bad generator arguments in '" + spec + "'");
  } catch (const std::out_of_range&) {
    throw ParseError("generator arguments out of range in '" + spec + "'");
  }
  throw ParseError("unknown generator '" + name + "'");
}

}  // namespace cktkit
