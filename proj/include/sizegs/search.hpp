#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sizegs/codec.hpp"
#include "sizegs/error.hpp"
#include "sizegs/importance.hpp"
#include "sizegs/mckp.hpp"
#include "sizegs/model.hpp"
#include "sizegs/parallel.hpp"
#include "sizegs/quantizer.hpp"
#include "sizegs/size_model.hpp"

namespace sizegs {

struct SearchConfig {
  std::int64_t budget_bytes = 0;
  std::vector<double> tau_grid = {0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  double tolerance = 0.05;
  int max_inner_iters = 8;
  Norm norm = Norm::l2;
  std::size_t blocks = 60;
  int q_max = kMaxBits;
  int coord_bits = 16;
  double time_limit_s = 50.0;
  unsigned threads = 0;  // 0 resolves to default_thread_count()

  void validate() const {
    if (budget_bytes <= 0) fail(ErrorKind::invalid_budget, "size budget must be positive");
    if (tau_grid.empty()) fail(ErrorKind::invalid_input, "tau grid is empty");
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
      if (!(tau_grid[i] > 0.0 && tau_grid[i] <= 1.0))
        fail(ErrorKind::invalid_input, "tau values must lie in (0, 1]");
      if (i > 0 && tau_grid[i] <= tau_grid[i - 1])
        fail(ErrorKind::invalid_input, "tau grid must be sorted ascending");
    }
    if (!(tolerance > 0.0)) fail(ErrorKind::invalid_input, "tolerance must be positive");
    if (max_inner_iters < 1) fail(ErrorKind::invalid_input, "need at least one inner iteration");
    if (q_max < 1 || q_max > kMaxBits) fail(ErrorKind::invalid_input, "q_max must be in [1, 16]");
    if (coord_bits < 1 || coord_bits > 21)
      fail(ErrorKind::invalid_input, "coordinate bits must be in [1, 21]");
    if (blocks < 1) fail(ErrorKind::invalid_input, "block count must be >= 1");
  }
};

struct IterationRecord {
  double tau = 0.0;
  int iter = 0;  // 0 is the initial all-8-bit compression of a tau sample
  std::int64_t actual_bytes = 0;
  std::int64_t target_bytes = 0;
  std::int64_t delta_bytes = 0;
  double objective = 0.0;
  std::int64_t elapsed_ms = 0;
  bool skipped = false;        // tau rejected by the doubling rule
  bool in_tolerance = false;
};

struct SearchOutcome {
  double tau_star = 0.0;
  BitAssignment assignment;
  std::int64_t achieved_size = 0;
  double total_loss = 0.0;
  double per_point_loss = 0.0;
  std::size_t points_kept = 0;
  bool in_tolerance = false;
  int winning_inner_iters = 0;
  std::vector<std::uint8_t> container;
  std::vector<IterationRecord> trace;
};

namespace detail {

struct TauPipeline {
  GaussianModel sorted;
  CoordinateGrid sorted_grid;
  GroupPartition partition;
  std::vector<std::uint8_t> geometry_body;
};

inline TauPipeline prepare_tau(const GaussianModel& model, const ImportanceScore& scores,
                               double tau, const SearchConfig& config) {
  TauPipeline p;
  const GaussianModel pruned = prune(model, scores, tau);
  CoordinateGrid grid = quantize_coordinates(pruned, config.coord_bits);
  const MortonIndex index = morton_sort(grid);
  p.sorted = apply_permutation(pruned, index);
  p.sorted_grid.origin = grid.origin;
  p.sorted_grid.step = grid.step;
  p.sorted_grid.bits = grid.bits;
  p.sorted_grid.cells = apply_permutation(grid.cells, index);
  p.partition = make_partition(p.sorted.channel_count(), p.sorted.point_count(),
                               config.blocks);
  p.geometry_body = encode_geometry(p.sorted_grid);
  return p;
}

}  // namespace detail

// Outer search: sample the reserve ratio over a grid; for each sample run
// calibrate-solve-compress iterations until the measured container lands
// within tolerance of the budget. Tau samples whose all-8-bit container is
// less than half the budget are skipped (all but the largest, which is
// always explored), since even doubling every bit-width cannot reach the
// target. Among in-tolerance candidates the one with the lowest per-point
// quantization loss wins.
inline SearchOutcome run_search(const GaussianModel& model, const SearchConfig& config) {
  config.validate();
  model.validate();
  const unsigned threads = config.threads ? config.threads : default_thread_count();
  const std::int64_t target = config.budget_bytes;
  const ImportanceScore scores = effective_importance(model);

  struct Candidate {
    double tau;
    BitAssignment bits;
    std::int64_t size;
    double objective;
    double per_point;
    std::size_t kept;
    bool in_tolerance;
    int iters;
    std::vector<std::uint8_t> container;
  };
  std::optional<Candidate> best_ok;       // min per-point loss among in-tolerance
  std::optional<Candidate> best_effort;   // min relative error overall
  bool any_floor_feasible = false;
  bool any_tau_partitionable = false;

  SearchOutcome outcome;
  using clock = std::chrono::steady_clock;

  auto rel_err = [target](std::int64_t actual) {
    return std::abs(static_cast<double>(actual - target)) / static_cast<double>(target);
  };
  auto consider = [&](Candidate&& cand) {
    if (cand.in_tolerance) {
      if (!best_ok || cand.per_point < best_ok->per_point) best_ok = std::move(cand);
    } else if (!best_effort || rel_err(cand.size) < rel_err(best_effort->size)) {
      best_effort = std::move(cand);
    }
  };

  for (const double tau : config.tau_grid) {
    const std::size_t keep = static_cast<std::size_t>(
        std::ceil(tau * static_cast<double>(model.point_count())));
    if (keep < config.blocks || keep == 0) continue;  // partition impossible at this tau
    any_tau_partitionable = true;

    const auto tau_start = clock::now();
    detail::TauPipeline pipe = detail::prepare_tau(model, scores, tau, config);
    const std::size_t kept = pipe.sorted.point_count();

    BitAssignment bits = BitAssignment::uniform(pipe.partition.channels, config.blocks,
                                                std::min(8, config.q_max));
    BuiltContainer built =
        assemble_container(pipe.sorted, pipe.geometry_body, pipe.partition, bits,
                           config.norm, config.coord_bits, threads);
    std::int64_t actual = static_cast<std::int64_t>(built.bytes.size());

    SizeEstimate est = make_size_estimate(pipe.partition,
                                          measure_fixed_cost(built.fixed_parts), target);

    IterationRecord rec;
    rec.tau = tau;
    rec.iter = 0;
    rec.actual_bytes = actual;
    rec.target_bytes = target;
    rec.delta_bytes = 0;
    rec.objective = assignment_loss(pipe.sorted, pipe.partition, bits, config.norm, threads);
    rec.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() -
                                                                           tau_start)
                         .count();
    // Doubling rule: when even twice the 8-bit container falls short of the
    // target, this tau keeps too few points and a larger sample should be
    // tried instead. The largest grid point is always explored, because the
    // doubling bound is exact only for pre-entropy payload bits and a
    // 16-bit stream may legitimately exceed twice the 8-bit one.
    const bool larger_tau_remains = tau != config.tau_grid.back();
    rec.skipped = larger_tau_remains && 2 * actual < target;
    rec.in_tolerance = rel_err(actual) < config.tolerance;
    outcome.trace.push_back(rec);

    auto snapshot = [&](int iters, double objective, bool ok) {
      return Candidate{tau,    bits,  actual,
                       objective, objective / static_cast<double>(kept),
                       kept,   ok,    iters, built.bytes};
    };

    if (rec.skipped) {
      any_floor_feasible = true;  // the budget exceeds what this tau produces
      consider(snapshot(0, rec.objective, false));
      continue;
    }

    const LossTensor loss =
        compute_loss_tensor(pipe.sorted, pipe.partition, config.norm, config.q_max, threads);
    SolveOptions solver_opts;
    solver_opts.time_limit_s = config.time_limit_s;
    bool tau_floor_feasible = false;

    for (int iter = 1; iter <= config.max_inner_iters; ++iter) {
      const auto iter_start = clock::now();
      est = calibrate_residual(est, actual, bits);
      const std::int64_t budget_bits = solver_budget_bits(est);

      SolverResult solved;
      if (budget_bits < 0) {
        solved.status = SolveStatus::infeasible;
      } else {
        solved = solve_hierarchical(loss, est.group_elements, budget_bits, &bits,
                                    solver_opts, threads);
      }
      if (solved.status == SolveStatus::infeasible) break;
      tau_floor_feasible = true;

      BitAssignment next = bits;
      next.bits = solved.bits;
      built = assemble_container(pipe.sorted, pipe.geometry_body, pipe.partition, next,
                                 config.norm, config.coord_bits, threads);
      actual = static_cast<std::int64_t>(built.bytes.size());

      IterationRecord row;
      row.tau = tau;
      row.iter = iter;
      row.actual_bytes = actual;
      row.target_bytes = target;
      row.delta_bytes = est.delta;
      row.objective = solved.objective;
      row.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() -
                                                                             iter_start)
                           .count();
      row.in_tolerance = rel_err(actual) < config.tolerance;
      outcome.trace.push_back(row);

      const bool stagnated = next.bits == bits.bits;
      bits = next;
      if (row.in_tolerance) {
        consider(snapshot(iter, solved.objective, true));
        break;
      }
      consider(snapshot(iter, solved.objective, false));
      if (stagnated) break;  // same assignment would reproduce the same size
    }
    any_floor_feasible = any_floor_feasible || tau_floor_feasible;
  }

  const Candidate* winner = nullptr;
  if (best_ok) {
    winner = &*best_ok;
  } else if (best_effort && any_floor_feasible) {
    winner = &*best_effort;
  } else if (!any_tau_partitionable) {
    fail(ErrorKind::invalid_partition,
         "every reserve ratio keeps fewer points than the " +
             std::to_string(config.blocks) + " blocks per channel");
  } else {
    fail(ErrorKind::infeasible,
         "budget of " + std::to_string(target) +
             " bytes is below the 1-bit floor at every reserve ratio");
  }

  outcome.tau_star = winner->tau;
  outcome.assignment = winner->bits;
  outcome.achieved_size = winner->size;
  outcome.total_loss = winner->objective;
  outcome.per_point_loss = winner->per_point;
  outcome.points_kept = winner->kept;
  outcome.in_tolerance = winner->in_tolerance;
  outcome.winning_inner_iters = winner->iters;
  outcome.container = winner->container;
  return outcome;
}

// One row per compression attempt: tau, iter, S_a, S_T, S_delta, objective,
// elapsed_ms. Iteration 0 is the initial 8-bit probe of a tau sample.
inline void emit_trace(const SearchOutcome& outcome, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io_error, "cannot write " + path.string());
  out << "tau,iter,S_a,S_T,S_delta,objective,elapsed_ms\n";
  char buf[256];
  for (const auto& r : outcome.trace) {
    std::snprintf(buf, sizeof buf, "%.6g,%d,%lld,%lld,%lld,%.17g,%lld\n", r.tau, r.iter,
                  static_cast<long long>(r.actual_bytes),
                  static_cast<long long>(r.target_bytes),
                  static_cast<long long>(r.delta_bytes), r.objective,
                  static_cast<long long>(r.elapsed_ms));
    out << buf;
  }
  if (!out) fail(ErrorKind::io_error, "write failed for " + path.string());
}

// Rate-distortion measurement for one budget: run the search, decode the
// winning container, and report per-point reconstruction loss under all
// three norms against the pruned source model.
struct RdRow {
  std::int64_t budget = 0;
  std::int64_t achieved = 0;
  double rel_err = 0.0;
  double tau_star = 0.0;
  bool in_tolerance = false;
  double per_point_l1 = 0.0;
  double per_point_l2 = 0.0;
  double per_point_linf = 0.0;
};

inline RdRow rd_point(const GaussianModel& model, SearchConfig config,
                      std::int64_t budget) {
  config.budget_bytes = budget;
  const SearchOutcome outcome = run_search(model, config);
  const DecodedContainer decoded = decode_container(outcome.container);

  const ImportanceScore scores = effective_importance(model);
  const GaussianModel pruned = prune(model, scores, outcome.tau_star);
  const CoordinateGrid grid = quantize_coordinates(pruned, config.coord_bits);
  const MortonIndex index = morton_sort(grid);
  const GaussianModel sorted = apply_permutation(pruned, index);
  const GroupPartition partition =
      make_partition(sorted.channel_count(), sorted.point_count(), config.blocks);

  const std::size_t n = sorted.point_count();
  double l1 = 0.0, l2 = 0.0, linf = 0.0;
  for (std::size_t c = 0; c < partition.channels; ++c) {
    for (std::size_t j = 0; j < partition.blocks; ++j) {
      double a1 = 0.0, a2 = 0.0, ai = 0.0;
      for (std::size_t i = partition.block_begin(j); i < partition.block_end(j); ++i) {
        const double d = std::abs(decoded.model.at(c, i) - sorted.at(c, i));
        a1 += d;
        a2 += d * d;
        ai = std::max(ai, d);
      }
      l1 += a1;
      l2 += std::sqrt(a2);
      linf += ai;
    }
  }

  RdRow row;
  row.budget = budget;
  row.achieved = outcome.achieved_size;
  row.rel_err = std::abs(static_cast<double>(outcome.achieved_size - budget)) /
                static_cast<double>(budget);
  row.tau_star = outcome.tau_star;
  row.in_tolerance = outcome.in_tolerance;
  row.per_point_l1 = l1 / static_cast<double>(n);
  row.per_point_l2 = l2 / static_cast<double>(n);
  row.per_point_linf = linf / static_cast<double>(n);
  return row;
}

}  // namespace sizegs
