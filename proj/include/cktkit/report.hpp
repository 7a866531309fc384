// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cktkit/types.hpp"

namespace cktkit {

struct CliOptions {
  std::string matrix_path;  // exactly one of matrix_path / gen_spec is set
  std::string gen_spec;
  int threads = 1;
  double eps = 1e-3;
  std::uint64_t seed = 42;
  int iters = 100;
  double repivot_rate = 0.0;
  double perturb = 0.01;
  std::int64_t min_dense_nnz = 300000;
  bool scaling = true;
  int nrhs = 1;
  std::string mode = "full";  // factor subcommand: full | refactor | fast
  index_t nd_leaf = 256;
};

struct RunReport {
  int schema = 1;
  std::string command;
  std::string matrix;
  index_t n = 0;
  index_t nnz = 0;
  int threads = 1;
  double eps = 1e-3;
  std::uint64_t seed = 0;

  struct OrderingEntry {
    std::string method;
    std::int64_t fill_nnz = 0;
    std::int64_t flops = 0;
    bool chosen = false;
  };
  std::vector<OrderingEntry> orderings;
  std::string chosen_ordering;
  std::int64_t fill_nnz = 0;
  std::int64_t flops = 0;
  double arithmetic_density = 0.0;

  double t_preprocess = 0.0;
  double t_symbolic = 0.0;
  double t_factor = 0.0;
  double t_solve = 0.0;
  double t_plan_setup = 0.0;
  double residual = 0.0;

  nlohmann::json details = nlohmann::json::object();

  nlohmann::json to_json() const;
  void print_table(std::ostream& os) const;
};

RunReport cmd_analyze(const CliOptions& opts);
RunReport cmd_factor(const CliOptions& opts);
RunReport cmd_solve(const CliOptions& opts);
RunReport cmd_bench(const CliOptions& opts);

}  // namespace cktkit
