// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cktkit/errors.hpp"
#include "cktkit/report.hpp"

namespace {

int default_threads() {
  if (const char* env = std::getenv("CKTSO_KIT_THREADS")) {
    const int t = std::atoi(env);
    if (t >= 1) return t;
  }
  return 1;
}

void add_common(CLI::App* sub, cktkit::CliOptions& opts, std::string& positional,
                std::string& out_path, bool& json_only) {
  sub->add_option("matrix", positional, "Matrix Market file (omit when using --gen)");
  sub->add_option("--gen", opts.gen_spec, "generator spec: tridiag:N | grid:K | randckt:N,NNZ");
  sub->add_option("--threads", opts.threads, "worker thread count");
  sub->add_option("--eps", opts.eps, "pivoting threshold");
  sub->add_option("--seed", opts.seed, "seed for generators, right-hand sides and schedules");
  sub->add_option("--min-dense-nnz", opts.min_dense_nnz,
                  "minimum nonzeros of the dense solve corner");
  sub->add_option("--nd-leaf", opts.nd_leaf, "nested dissection leaf threshold");
  sub->add_flag_callback("--no-scaling", [&opts] { opts.scaling = false; },
                         "disable static-pivoting scaling");
  sub->add_option("--out", out_path, "write the JSON report to a file instead of stdout");
  sub->add_flag("--json", json_only, "suppress the human-readable table on stderr");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cktso-kit: parallel sparse LU solver benchmark harness"};
  app.require_subcommand(1);

  cktkit::CliOptions opts;
  opts.threads = default_threads();
  std::string positional;
  std::string out_path;
  bool json_only = false;
  app.fallthrough();

  CLI::App* analyze = app.add_subcommand("analyze", "ordering portfolio comparison");
  add_common(analyze, opts, positional, out_path, json_only);

  CLI::App* factor = app.add_subcommand("factor", "factorization benchmark");
  add_common(factor, opts, positional, out_path, json_only);
  factor->add_option("--mode", opts.mode, "full | refactor | fast")
      ->check(CLI::IsMember({"full", "refactor", "fast"}));

  CLI::App* solve = app.add_subcommand("solve", "triangular solving benchmark");
  add_common(solve, opts, positional, out_path, json_only);
  solve->add_option("--nrhs", opts.nrhs, "number of right-hand sides");

  CLI::App* bench = app.add_subcommand("bench", "iteration-loop benchmark with re-pivot injection");
  add_common(bench, opts, positional, out_path, json_only);
  bench->add_option("--iters", opts.iters, "iterations");
  bench->add_option("--repivot-rate", opts.repivot_rate, "fraction of runs with a forced re-pivot");
  bench->add_option("--perturb", opts.perturb, "relative value perturbation per iteration");

  CLI11_PARSE(app, argc, argv);
  opts.matrix_path = positional;

  try {
    if (opts.matrix_path.empty() && opts.gen_spec.empty())
      throw cktkit::Error("no matrix given: pass a .mtx path or --gen SPEC");
    if (!opts.matrix_path.empty() && !opts.gen_spec.empty())
      throw cktkit::Error("pass either a matrix file or --gen, not both");

    cktkit::RunReport rep;
    if (app.got_subcommand(analyze)) rep = cktkit::cmd_analyze(opts);
    else if (app.got_subcommand(factor)) rep = cktkit::cmd_factor(opts);
    else if (app.got_subcommand(solve)) rep = cktkit::cmd_solve(opts);
    else rep = cktkit::cmd_bench(opts);

    const std::string json = rep.to_json().dump(2);
    if (!out_path.empty()) {
      std::ofstream out(out_path);
      if (!out) throw cktkit::Error("cannot write " + out_path);
      out << json << "\n";
    } else {
      std::cout << json << "\n";
    }
    if (!json_only) rep.print_table(std::cerr);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
