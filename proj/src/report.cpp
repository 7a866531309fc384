// Copyright 2026 The cktso-kit Authors
// SPDX-License-Identifier: Apache-2.0

#include "cktkit/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "cktkit/errors.hpp"
#include "cktkit/generators.hpp"
#include "cktkit/matrix_market.hpp"
#include "cktkit/solver.hpp"

namespace cktkit {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

SparseMatrix load_matrix(const CliOptions& opts, std::string& label) {
  if (!opts.gen_spec.empty()) {
    label = opts.gen_spec;
    return to_csr(parse_generator(opts.gen_spec, opts.seed));
  }
  label = opts.matrix_path;
  return to_csr(read_matrix_market(opts.matrix_path));
}

SolverOptions solver_options(const CliOptions& opts) {
  SolverOptions so;
  so.n_threads = opts.threads;
  so.eps = opts.eps;
  so.scaling = opts.scaling;
  so.nd_leaf = opts.nd_leaf;
  so.plan.min_nnz = opts.min_dense_nnz;
  return so;
}

void fill_ordering_info(RunReport& rep, const PreprocessResult& pre) {
  for (std::size_t k = 0; k < pre.candidates.size(); ++k) {
    const auto& c = pre.candidates[k];
    rep.orderings.push_back({ordering_method_name(c.method), c.fill_nnz, c.flops,
                             static_cast<int>(k) == pre.chosen_index});
  }
  rep.chosen_ordering = ordering_method_name(pre.chosen().method);
  rep.fill_nnz = pre.chosen().fill_nnz;
  rep.flops = pre.chosen().flops;
  rep.arithmetic_density =
      rep.fill_nnz > 0 ? static_cast<double>(rep.flops) / static_cast<double>(rep.fill_nnz) : 0.0;
}

std::vector<double> random_rhs(index_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> b(n);
  for (auto& v : b) v = d(rng);
  return b;
}

bool bitwise_equal(const LUFactors& x, const LUFactors& y) {
  if (x.n != y.n || x.diag != y.diag) return false;
  for (index_t i = 0; i < x.n; ++i)
    if (x.l_vals[i] != y.l_vals[i] || x.u_vals[i] != y.u_vals[i]) return false;
  return true;
}

}  // namespace

nlohmann::json RunReport::to_json() const {
  nlohmann::json j;
  j["schema"] = schema;
  j["command"] = command;
  j["matrix"] = matrix;
  j["n"] = n;
  j["nnz"] = nnz;
  j["threads"] = threads;
  j["eps"] = eps;
  j["seed"] = seed;
  if (!orderings.empty()) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& o : orderings)
      arr.push_back({{"method", o.method},
                     {"fill_nnz", o.fill_nnz},
                     {"flops", o.flops},
                     {"chosen", o.chosen}});
    j["orderings"] = arr;
    j["chosen_ordering"] = chosen_ordering;
    j["fill_nnz"] = fill_nnz;
    j["flops"] = flops;
    j["arithmetic_density"] = arithmetic_density;
  }
  j["times"] = {{"preprocess", t_preprocess},
                {"symbolic", t_symbolic},
                {"factor", t_factor},
                {"solve", t_solve},
                {"plan_setup", t_plan_setup}};
  j["residual"] = residual;
  if (!details.empty()) j["details"] = details;
  return j;
}

void RunReport::print_table(std::ostream& os) const {
  os << "== " << command << " " << matrix << " ==\n";
  os << "  n=" << n << " nnz=" << nnz << " threads=" << threads << "\n";
  for (const auto& o : orderings)
    os << "  ordering " << o.method << ": fill=" << o.fill_nnz << " flops=" << o.flops
       << (o.chosen ? "  <- chosen" : "") << "\n";
  if (!orderings.empty())
    os << "  arithmetic density = " << arithmetic_density << "\n";
  os << "  t_preprocess=" << t_preprocess << "s t_factor=" << t_factor
     << "s t_solve=" << t_solve << "s plan_setup=" << t_plan_setup << "s\n";
  os << "  residual = " << residual << "\n";
  for (auto it = details.begin(); it != details.end(); ++it)
    os << "  " << it.key() << " = " << it.value().dump() << "\n";
}

RunReport cmd_analyze(const CliOptions& opts) {
  RunReport rep;
  rep.command = "analyze";
  rep.threads = opts.threads;
  rep.eps = opts.eps;
  rep.seed = opts.seed;
  const SparseMatrix a = load_matrix(opts, rep.matrix);
  rep.n = a.n;
  rep.nnz = a.nnz();

  const auto t0 = Clock::now();
  const PreprocessResult pre = run_portfolio(a, opts.scaling, opts.nd_leaf);
  rep.t_preprocess = seconds_since(t0);
  fill_ordering_info(rep, pre);
  return rep;
}

RunReport cmd_factor(const CliOptions& opts) {
  RunReport rep;
  rep.command = "factor";
  rep.threads = opts.threads;
  rep.eps = opts.eps;
  rep.seed = opts.seed;
  const SparseMatrix a = load_matrix(opts, rep.matrix);
  rep.n = a.n;
  rep.nnz = a.nnz();

  auto t0 = Clock::now();
  Solver solver(a, solver_options(opts));
  rep.t_preprocess = seconds_since(t0);
  rep.t_symbolic = solver.symbolic_seconds();
  fill_ordering_info(rep, solver.preprocess_result());

  auto time_mode = [&](int threads) -> double {
    const auto t = Clock::now();
    if (opts.mode == "refactor") {
      refactor(solver.preprocessed(), solver.context(), solver.factors(), threads);
    } else if (opts.mode == "fast") {
      const FactorOutcome out = fast_factor(solver.preprocessed(), solver.context(),
                                            solver.factors(), opts.eps, threads);
      if (!out.completed()) throw Error("fast factorization interrupted unexpectedly");
    } else {
      solver.factors() = factor_full(solver.preprocessed(), solver.context(), opts.eps, threads);
      solver.context().refresh_egraph(solver.factors());
    }
    return seconds_since(t);
  };

  const LUFactors reference = solver.factors();
  rep.t_factor = time_mode(opts.threads);
  rep.details["mode"] = opts.mode;
  rep.details["lu_fill_nnz"] = solver.factors().fill_nnz;
  rep.details["lu_flops"] = solver.factors().flops;
  if (opts.mode != "full")
    rep.details["values_bitwise_equal_to_full"] = bitwise_equal(reference, solver.factors());
  if (opts.threads > 1) {
    const double t1 = time_mode(1);
    rep.details["t_factor_1thread"] = t1;
    rep.details["speedup"] = rep.t_factor > 0 ? t1 / rep.t_factor : 0.0;
  }

  std::mt19937_64 rng(opts.seed);
  std::vector<double> b = random_rhs(a.n, rng);
  const std::vector<double> b0 = b;
  solver.solve(b, false);
  rep.residual = solver.residual(b, b0);
  return rep;
}

RunReport cmd_solve(const CliOptions& opts) {
  RunReport rep;
  rep.command = "solve";
  rep.threads = opts.threads;
  rep.eps = opts.eps;
  rep.seed = opts.seed;
  const SparseMatrix a = load_matrix(opts, rep.matrix);
  rep.n = a.n;
  rep.nnz = a.nnz();

  auto t0 = Clock::now();
  Solver solver(a, solver_options(opts));
  rep.t_preprocess = seconds_since(t0);
  rep.t_symbolic = solver.symbolic_seconds();
  fill_ordering_info(rep, solver.preprocess_result());

  solver.ensure_plans();
  rep.t_plan_setup = solver.plan_setup_seconds();
  rep.details["partitioned"] = solver.plans_partitioned();
  rep.details["slices"] = solver.plan_slices();

  std::mt19937_64 rng(opts.seed);
  double t_seq = 0.0, t_par = 0.0, rmax = 0.0;
  for (int r = 0; r < std::max(1, opts.nrhs); ++r) {
    const std::vector<double> b0 = random_rhs(a.n, rng);
    std::vector<double> bs = b0;
    t0 = Clock::now();
    solver.solve(bs, false);
    t_seq += seconds_since(t0);
    std::vector<double> bp = b0;
    t0 = Clock::now();
    solver.solve(bp, true);
    t_par += seconds_since(t0);
    rmax = std::max({rmax, solver.residual(bs, b0), solver.residual(bp, b0)});
  }
  rep.t_solve = t_par;
  rep.details["t_solve_seq"] = t_seq;
  rep.details["t_solve_par"] = t_par;
  rep.details["nrhs"] = opts.nrhs;
  rep.residual = rmax;
  return rep;
}

RunReport cmd_bench(const CliOptions& opts) {
  if (opts.repivot_rate < 0.0 || opts.repivot_rate > 1.0)
    throw Error("repivot rate must be within [0,1]");
  RunReport rep;
  rep.command = "bench";
  rep.threads = opts.threads;
  rep.eps = opts.eps;
  rep.seed = opts.seed;
  SparseMatrix a = load_matrix(opts, rep.matrix);
  rep.n = a.n;
  rep.nnz = a.nnz();

  auto t0 = Clock::now();
  Solver solver(a, solver_options(opts));
  rep.t_preprocess = seconds_since(t0);
  rep.t_symbolic = solver.symbolic_seconds();
  fill_ordering_info(rep, solver.preprocess_result());

  const int iters = std::max(1, opts.iters);
  std::mt19937_64 rng(opts.seed);

  // Pick the re-pivoting iterations up front so the schedule depends only on
  // the seed. The forced row is chosen via the fault hook, not value edits.
  std::vector<int> sched(iters, 0);
  {
    const int k = static_cast<int>(std::lround(opts.repivot_rate * iters));
    std::vector<int> ids(iters);
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), rng);
    for (int s = 0; s < k; ++s) sched[ids[s]] = 1;
  }
  std::uniform_int_distribution<index_t> row_pick(0, a.n - 1);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const std::vector<double> base_values = a.values;
  FactorContext full_ctx(solver.preprocessed(), opts.threads, opts.eps);

  double sum_driver = 0.0, sum_refactor = 0.0, sum_full = 0.0;
  double min_driver = 1e300, max_driver = 0.0;
  double t_solve_total = 0.0, rmax = 0.0;
  int interrupted_runs = 0;
  std::vector<index_t> restart_sizes;
  std::vector<index_t> injected_rows;

  for (int it = 0; it < iters; ++it) {
    for (std::size_t s = 0; s < a.values.size(); ++s)
      a.values[s] = base_values[s] * (1.0 + opts.perturb * unit(rng));
    solver.set_values(a);

    t0 = Clock::now();
    solver.refactorize();
    sum_refactor += seconds_since(t0);

    t0 = Clock::now();
    const LUFactors full = factor_full(solver.preprocessed(), full_ctx, opts.eps, opts.threads);
    sum_full += seconds_since(t0);
    (void)full;

    const index_t inject = sched[it] ? row_pick(rng) : -1;
    if (inject >= 0) injected_rows.push_back(inject);
    solver.inject_pivot_fault(inject);
    t0 = Clock::now();
    const DriverResult dr = solver.fast_factorize();
    const double td = seconds_since(t0);
    solver.inject_pivot_fault(-1);
    sum_driver += td;
    min_driver = std::min(min_driver, td);
    max_driver = std::max(max_driver, td);
    if (dr.repivoted) {
      ++interrupted_runs;
      restart_sizes.push_back(static_cast<index_t>(dr.restart.size()));
    }

    std::vector<double> b0 = random_rhs(a.n, rng);
    std::vector<double> bx = b0;
    t0 = Clock::now();
    solver.solve(bx, true);
    t_solve_total += seconds_since(t0);
    rmax = std::max(rmax, solver.residual(bx, b0));
  }

  rep.t_factor = sum_driver / iters;
  rep.t_solve = t_solve_total / iters;
  solver.ensure_plans();
  rep.t_plan_setup = solver.plan_setup_seconds();
  rep.residual = rmax;
  rep.details["iters"] = iters;
  rep.details["repivot_rate"] = opts.repivot_rate;
  rep.details["perturb"] = opts.perturb;
  rep.details["interrupted_runs"] = interrupted_runs;
  rep.details["restart_sizes"] = restart_sizes;
  rep.details["injected_rows"] = injected_rows;
  rep.details["mean_driver_time"] = sum_driver / iters;
  rep.details["mean_refactor_time"] = sum_refactor / iters;
  rep.details["mean_full_time"] = sum_full / iters;
  rep.details["min_driver_time"] = min_driver;
  rep.details["max_driver_time"] = max_driver;
  rep.details["max_residual"] = rmax;
  return rep;
}

}  // namespace cktkit
