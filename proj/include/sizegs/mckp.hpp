#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "sizegs/error.hpp"
#include "sizegs/parallel.hpp"
#include "sizegs/quantizer.hpp"

namespace sizegs {

// Multiple-choice knapsack over quantization groups. Group g holds one
// option per bit-width q in [1, q_max]; option q weighs size(g) * q payload
// bits and costs losses[g][q-1]. Exactly one option per group is selected,
// total weight must stay within budget_bits, total loss is minimized.
struct MckpInstance {
  std::vector<std::int64_t> group_sizes;
  std::vector<std::vector<double>> losses;
  std::int64_t budget_bits = 0;
  std::optional<std::vector<std::uint8_t>> warm_start;  // bits per group

  std::size_t group_count() const { return group_sizes.size(); }
  std::size_t option_count() const { return losses.empty() ? 0 : losses[0].size(); }

  void validate() const {
    if (group_sizes.empty()) fail(ErrorKind::invalid_input, "instance has no groups");
    if (losses.size() != group_sizes.size())
      fail(ErrorKind::invalid_input, "loss rows do not match group count");
    const std::size_t q = option_count();
    if (q < 1 || q > static_cast<std::size_t>(kMaxBits))
      fail(ErrorKind::invalid_input, "option count must be in [1, 16]");
    for (std::size_t g = 0; g < group_sizes.size(); ++g) {
      if (group_sizes[g] < 1)
        fail(ErrorKind::invalid_input, "group sizes must be >= 1");
      if (losses[g].size() != q)
        fail(ErrorKind::invalid_input, "ragged loss rows");
    }
    if (warm_start && warm_start->size() != group_sizes.size())
      fail(ErrorKind::invalid_input, "warm start length does not match group count");
  }

  std::int64_t weight(std::size_t g, int bits) const {
    return group_sizes[g] * static_cast<std::int64_t>(bits);
  }
  std::int64_t min_weight_total() const {
    std::int64_t w = 0;
    for (auto s : group_sizes) w += s;
    return w;
  }
  std::int64_t max_weight_total() const {
    std::int64_t w = 0;
    for (auto s : group_sizes) w += s * static_cast<std::int64_t>(option_count());
    return w;
  }
};

enum class SolveStatus : std::uint8_t { optimal, feasible_heuristic, infeasible, time_limit };

inline const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible_heuristic: return "feasible_heuristic";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::time_limit: return "time_limit";
  }
  return "unknown";
}

struct SolverResult {
  std::vector<std::uint8_t> bits;  // chosen bit-width per group
  double objective = 0.0;
  std::int64_t payload_bits = 0;
  SolveStatus status = SolveStatus::optimal;
};

struct SolveOptions {
  std::size_t dp_cell_cap = 1'000'000;  // DP table cells after weight scaling
  double time_limit_s = 50.0;
  bool allow_bnb_fallback = true;
};

namespace detail {

inline double instance_objective(const MckpInstance& inst,
                                 const std::vector<std::uint8_t>& bits) {
  double v = 0.0;
  for (std::size_t g = 0; g < inst.group_count(); ++g)
    v += inst.losses[g][static_cast<std::size_t>(bits[g]) - 1];
  return v;
}

inline std::int64_t instance_payload(const MckpInstance& inst,
                                     const std::vector<std::uint8_t>& bits) {
  std::int64_t w = 0;
  for (std::size_t g = 0; g < inst.group_count(); ++g)
    w += inst.weight(g, bits[g]);
  return w;
}

inline SolverResult infeasible_result(const MckpInstance& inst) {
  SolverResult r;
  r.bits.assign(inst.group_count(), 1);
  r.objective = instance_objective(inst, r.bits);
  r.payload_bits = inst.min_weight_total();
  r.status = SolveStatus::infeasible;
  return r;
}

// One dominance-pruned option: weights strictly increase, values strictly
// decrease. Options that pay more bits for equal-or-worse loss can never be
// part of an optimal assignment.
struct PrunedOption {
  int bits;
  std::int64_t weight;
  double value;
};

inline std::vector<PrunedOption> dominance_prune(const MckpInstance& inst,
                                                 std::size_t g) {
  std::vector<PrunedOption> out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t qi = 0; qi < inst.option_count(); ++qi) {
    const double v = inst.losses[g][qi];
    if (v < best) {
      out.push_back({static_cast<int>(qi) + 1, inst.weight(g, static_cast<int>(qi) + 1), v});
      best = v;
    }
  }
  return out;
}

// Exact dynamic program over gcd-scaled weights. Deterministic: option ties
// keep the lowest bit-width, final ties keep the smallest total weight.
inline SolverResult solve_dp(const MckpInstance& inst, std::int64_t scale,
                             std::int64_t capacity) {
  const std::size_t groups = inst.group_count();
  const std::size_t q = inst.option_count();
  const std::size_t width = static_cast<std::size_t>(capacity) + 1;
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<double> prev(width, inf), cur(width, inf);
  std::vector<std::uint8_t> choice(groups * width, 0);
  prev[0] = 0.0;

  for (std::size_t g = 0; g < groups; ++g) {
    std::fill(cur.begin(), cur.end(), inf);
    const std::int64_t unit = inst.group_sizes[g] / scale;
    for (std::size_t qi = 0; qi < q; ++qi) {
      const std::int64_t w = unit * static_cast<std::int64_t>(qi + 1);
      if (w > capacity) break;
      const double v = inst.losses[g][qi];
      for (std::int64_t t = 0; t + w <= capacity; ++t) {
        if (prev[static_cast<std::size_t>(t)] == inf) continue;
        const double cand = prev[static_cast<std::size_t>(t)] + v;
        auto& slot = cur[static_cast<std::size_t>(t + w)];
        if (cand < slot) {
          slot = cand;
          choice[g * width + static_cast<std::size_t>(t + w)] =
              static_cast<std::uint8_t>(qi + 1);
        }
      }
    }
    std::swap(prev, cur);
  }

  std::size_t best_w = 0;
  double best_v = inf;
  for (std::size_t w = 0; w < width; ++w) {
    if (prev[w] < best_v) {
      best_v = prev[w];
      best_w = w;
    }
  }
  if (best_v == inf) return infeasible_result(inst);

  SolverResult r;
  r.bits.assign(groups, 1);
  std::size_t w = best_w;
  for (std::size_t g = groups; g-- > 0;) {
    const std::uint8_t b = choice[g * width + w];
    r.bits[g] = b;
    w -= static_cast<std::size_t>((inst.group_sizes[g] / scale) *
                                  static_cast<std::int64_t>(b));
  }
  r.objective = instance_objective(inst, r.bits);
  r.payload_bits = instance_payload(inst, r.bits);
  r.status = SolveStatus::optimal;
  return r;
}

struct HullUpgrade {
  std::uint32_t group;
  std::uint32_t from;  // index into the pruned option list
  std::uint32_t to;
  std::int64_t dw;
  double dv;    // loss reduction, > 0
  double rate;  // dv / dw
};

// Depth-first branch and bound with the classic MCKP linear-relaxation bound
// (greedy walk over convex-hull upgrades, fractional last step). Exact unless
// the deterministic node budget runs out, in which case the best incumbent is
// returned with status time_limit.
inline SolverResult solve_bnb(const MckpInstance& inst, const SolverResult& incumbent_seed,
                              std::size_t node_cap) {
  const std::size_t groups = inst.group_count();
  std::vector<std::vector<PrunedOption>> opts(groups);
  for (std::size_t g = 0; g < groups; ++g) opts[g] = dominance_prune(inst, g);

  // Suffix totals of the cheapest option per group.
  std::vector<std::int64_t> suffix_min_w(groups + 1, 0);
  std::vector<double> suffix_min_v(groups + 1, 0.0);
  for (std::size_t g = groups; g-- > 0;) {
    suffix_min_w[g] = suffix_min_w[g + 1] + opts[g].front().weight;
    suffix_min_v[g] = suffix_min_v[g + 1] + opts[g].front().value;
  }
  if (suffix_min_w[0] > inst.budget_bits) return infeasible_result(inst);

  // Convex-hull upgrades per group, merged and sorted by decreasing rate so
  // the relaxation walk applies them greedily in a valid order.
  std::vector<HullUpgrade> upgrades;
  for (std::size_t g = 0; g < groups; ++g) {
    std::vector<std::uint32_t> hull;
    for (std::uint32_t i = 0; i < opts[g].size(); ++i) {
      while (hull.size() >= 2) {
        const auto& a = opts[g][hull[hull.size() - 2]];
        const auto& b = opts[g][hull.back()];
        const auto& c = opts[g][i];
        // Keep rates strictly decreasing along the hull.
        const double r_ab = (a.value - b.value) / static_cast<double>(b.weight - a.weight);
        const double r_bc = (b.value - c.value) / static_cast<double>(c.weight - b.weight);
        if (r_ab <= r_bc) hull.pop_back();
        else break;
      }
      hull.push_back(i);
    }
    for (std::size_t k = 1; k < hull.size(); ++k) {
      const auto& a = opts[g][hull[k - 1]];
      const auto& b = opts[g][hull[k]];
      upgrades.push_back({static_cast<std::uint32_t>(g), hull[k - 1], hull[k],
                          b.weight - a.weight, a.value - b.value,
                          (a.value - b.value) / static_cast<double>(b.weight - a.weight)});
    }
  }
  std::stable_sort(upgrades.begin(), upgrades.end(),
                   [](const HullUpgrade& a, const HullUpgrade& b) {
                     if (a.rate != b.rate) return a.rate > b.rate;
                     if (a.group != b.group) return a.group < b.group;
                     return a.to < b.to;
                   });

  auto suffix_bound = [&](std::size_t g, std::int64_t budget_left) -> double {
    std::int64_t rem = budget_left - suffix_min_w[g];
    if (rem < 0) return std::numeric_limits<double>::infinity();
    double bound = suffix_min_v[g];
    for (const auto& up : upgrades) {
      if (up.group < g) continue;
      if (rem <= 0) break;
      if (up.dw <= rem) {
        bound -= up.dv;
        rem -= up.dw;
      } else {
        bound -= up.rate * static_cast<double>(rem);
        rem = 0;
        break;
      }
    }
    return bound;
  };

  std::vector<std::uint8_t> best_bits = incumbent_seed.bits;
  double best_v = incumbent_seed.objective;
  std::vector<std::uint8_t> cur(groups, 1);
  std::size_t nodes = 0;
  bool out_of_nodes = false;

  // Iterative DFS; per group, options are tried from the highest bit-width
  // (lowest loss) downward.
  struct Frame {
    std::size_t g;
    std::size_t next;  // index into opts[g], iterated in reverse
    std::int64_t weight;
    double value;
  };
  std::vector<Frame> stack;
  stack.push_back({0, opts[0].size(), 0, 0.0});

  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.g == groups) {
      if (f.value < best_v) {
        best_v = f.value;
        best_bits = cur;
      }
      stack.pop_back();
      continue;
    }
    if (f.next == 0) {
      stack.pop_back();
      continue;
    }
    if (out_of_nodes) {
      stack.pop_back();
      continue;
    }
    --f.next;
    const auto& opt = opts[f.g][f.next];
    if (++nodes > node_cap) out_of_nodes = true;
    const std::int64_t w = f.weight + opt.weight;
    if (w + suffix_min_w[f.g + 1] > inst.budget_bits) continue;
    const double v = f.value + opt.value;
    if (v + suffix_bound(f.g + 1, inst.budget_bits - w) >= best_v) continue;
    cur[f.g] = static_cast<std::uint8_t>(opt.bits);
    stack.push_back({f.g + 1, f.g + 1 < groups ? opts[f.g + 1].size() : 0, w, v});
  }

  SolverResult r;
  r.bits = best_bits;
  r.objective = instance_objective(inst, r.bits);
  r.payload_bits = instance_payload(inst, r.bits);
  r.status = out_of_nodes ? SolveStatus::time_limit : SolveStatus::optimal;
  return r;
}

inline std::size_t node_budget(double time_limit_s) {
  const double scaled = time_limit_s * 200000.0;
  return static_cast<std::size_t>(std::clamp(scaled, 100000.0, 10000000.0));
}

// Marginal-ratio hill climb from a feasible start: repeatedly applies the
// affordable upgrade with the highest loss reduction per added payload bit.
inline std::vector<std::uint32_t> greedy_climb(
    const MckpInstance& inst, const std::vector<std::vector<PrunedOption>>& opts,
    std::vector<std::uint32_t> idx) {
  struct Entry {
    double rate;
    std::uint32_t group;
    std::uint32_t from;
    std::uint32_t to;
  };
  struct Worse {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.rate != b.rate) return a.rate < b.rate;
      if (a.group != b.group) return a.group > b.group;
      return a.to > b.to;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, Worse> queue;

  auto push_from = [&](std::uint32_t g, std::uint32_t from) {
    const auto& cur = opts[g][from];
    for (std::uint32_t t = from + 1; t < opts[g].size(); ++t) {
      const auto& nxt = opts[g][t];
      const double rate =
          (cur.value - nxt.value) / static_cast<double>(nxt.weight - cur.weight);
      queue.push({rate, g, from, t});
    }
  };
  std::int64_t weight = 0;
  for (std::size_t g = 0; g < opts.size(); ++g) {
    weight += opts[g][idx[g]].weight;
    push_from(static_cast<std::uint32_t>(g), idx[g]);
  }

  while (!queue.empty()) {
    const Entry e = queue.top();
    queue.pop();
    if (e.to <= idx[e.group]) continue;
    if (e.from != idx[e.group]) {
      // Stale after an earlier upgrade of this group; requeue at the current rate.
      const auto& cur = opts[e.group][idx[e.group]];
      const auto& nxt = opts[e.group][e.to];
      const double rate =
          (cur.value - nxt.value) / static_cast<double>(nxt.weight - cur.weight);
      queue.push({rate, e.group, idx[e.group], e.to});
      continue;
    }
    const std::int64_t dw = opts[e.group][e.to].weight - opts[e.group][e.from].weight;
    if (weight + dw > inst.budget_bits) continue;  // weight only grows; drop for good
    weight += dw;
    idx[e.group] = e.to;
  }
  return idx;
}

}  // namespace detail

// Dominance-pruned marginal-ratio greedy: start every group at 1 bit, then
// repeatedly apply the affordable upgrade with the highest loss reduction per
// added payload bit. Feasible, not necessarily optimal; also used to seed
// branch-and-bound incumbents.
inline SolverResult solve_baseline_greedy(const MckpInstance& inst) {
  inst.validate();
  const std::size_t groups = inst.group_count();
  if (inst.min_weight_total() > inst.budget_bits) return detail::infeasible_result(inst);

  std::vector<std::vector<detail::PrunedOption>> opts(groups);
  for (std::size_t g = 0; g < groups; ++g) opts[g] = detail::dominance_prune(inst, g);
  const auto idx = detail::greedy_climb(inst, opts, std::vector<std::uint32_t>(groups, 0));

  SolverResult r;
  r.bits.resize(groups);
  for (std::size_t g = 0; g < groups; ++g)
    r.bits[g] = static_cast<std::uint8_t>(opts[g][idx[g]].bits);
  r.objective = detail::instance_objective(inst, r.bits);
  r.payload_bits = detail::instance_payload(inst, r.bits);
  r.status = SolveStatus::feasible_heuristic;
  return r;
}

// Exact solve. Uses dynamic programming when the gcd-scaled table fits the
// cell cap, otherwise exact branch and bound seeded by the greedy (and the
// warm start when given). With allow_bnb_fallback off, oversized instances
// are refused so callers can switch to the hierarchical path.
inline SolverResult solve_exact(const MckpInstance& inst, const SolveOptions& opts = {}) {
  inst.validate();
  if (inst.min_weight_total() > inst.budget_bits) return detail::infeasible_result(inst);

  std::int64_t scale = 0;
  for (auto s : inst.group_sizes) scale = std::gcd(scale, s);
  const std::int64_t capacity =
      std::min(inst.budget_bits, inst.max_weight_total()) / scale;
  const std::size_t cells =
      inst.group_count() * (static_cast<std::size_t>(capacity) + 1);

  if (cells <= opts.dp_cell_cap) return detail::solve_dp(inst, scale, capacity);

  if (!opts.allow_bnb_fallback)
    fail(ErrorKind::invalid_input,
         "instance needs " + std::to_string(cells) +
             " DP cells (cap " + std::to_string(opts.dp_cell_cap) +
             "); use the hierarchical solver");

  SolverResult seed = solve_baseline_greedy(inst);
  if (inst.warm_start) {
    const auto& warm = *inst.warm_start;
    bool valid = true;
    for (std::size_t g = 0; g < warm.size() && valid; ++g)
      valid = warm[g] >= 1 && warm[g] <= inst.option_count();
    if (valid && detail::instance_payload(inst, warm) <= inst.budget_bits) {
      const double wv = detail::instance_objective(inst, warm);
      if (wv < seed.objective) {
        seed.bits = warm;
        seed.objective = wv;
        seed.payload_bits = detail::instance_payload(inst, warm);
      }
    }
  }
  return detail::solve_bnb(inst, seed, detail::node_budget(opts.time_limit_s));
}

// Splits a budget across channels in proportion to integer shares, largest
// remainder first, so the parts sum to the whole exactly.
inline std::vector<std::int64_t> apportion_budget(std::int64_t total,
                                                  const std::vector<std::int64_t>& shares) {
  std::int64_t share_sum = 0;
  for (auto s : shares) share_sum += s;
  if (share_sum <= 0) fail(ErrorKind::invalid_input, "shares must sum to a positive value");
  std::vector<std::int64_t> parts(shares.size());
  std::vector<std::pair<std::int64_t, std::size_t>> remainders(shares.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    const std::int64_t num = total * shares[i];
    parts[i] = num / share_sum;
    remainders[i] = {num % share_sum, i};
    assigned += parts[i];
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::int64_t left = total - assigned;
  for (std::size_t k = 0; left > 0 && k < remainders.size(); ++k, --left)
    parts[remainders[k].second] += 1;
  return parts;
}

// Two-step solver for large C x B instances: channel-level MCKP first, then
// the budget is split across channels in proportion to the chosen channel
// bits and per-channel MCKPs run independently.
inline SolverResult solve_hierarchical(const LossTensor& loss,
                                       const std::vector<std::int64_t>& group_elements,
                                       std::int64_t budget_bits,
                                       const BitAssignment* warm_start = nullptr,
                                       const SolveOptions& opts = {},
                                       unsigned threads = 1) {
  const std::size_t channels = loss.channels;
  const std::size_t blocks = loss.blocks;
  const std::size_t q = loss.q_max;
  if (group_elements.size() != channels * blocks)
    fail(ErrorKind::invalid_input, "element counts do not match the loss tensor");

  // Step 1: one item per channel, loss summed over its blocks.
  MckpInstance channel_inst;
  channel_inst.budget_bits = budget_bits;
  channel_inst.group_sizes.resize(channels);
  channel_inst.losses.assign(channels, std::vector<double>(q, 0.0));
  for (std::size_t c = 0; c < channels; ++c) {
    std::int64_t total = 0;
    for (std::size_t j = 0; j < blocks; ++j) total += group_elements[c * blocks + j];
    channel_inst.group_sizes[c] = total;
    for (std::size_t qi = 0; qi < q; ++qi) {
      double sum = 0.0;
      for (std::size_t j = 0; j < blocks; ++j) sum += loss.at(c, j, qi);
      channel_inst.losses[c][qi] = sum;
    }
  }
  const SolverResult channel_result = solve_exact(channel_inst, opts);
  if (channel_result.status == SolveStatus::infeasible) {
    SolverResult r;
    r.bits.assign(channels * blocks, 1);
    r.objective = 0.0;
    for (std::size_t g = 0; g < channels * blocks; ++g)
      r.objective += loss.omega[g * q];
    r.payload_bits = 0;
    for (std::size_t g = 0; g < channels * blocks; ++g)
      r.payload_bits += group_elements[g];
    r.status = SolveStatus::infeasible;
    return r;
  }

  // Per-channel budgets proportional to the chosen channel bits. Shares are
  // weighted by channel element counts so each channel keeps at least its
  // own chosen payload; with equal-size channels (the attribute-matrix case)
  // this is plain bit proportionality.
  std::vector<std::int64_t> shares(channels);
  for (std::size_t c = 0; c < channels; ++c)
    shares[c] = static_cast<std::int64_t>(channel_result.bits[c]) *
                channel_inst.group_sizes[c];
  const std::vector<std::int64_t> channel_budget = apportion_budget(budget_bits, shares);

  if (channels == 1) {
    // Degenerate hierarchy: identical to the flat exact solve.
    MckpInstance flat;
    flat.budget_bits = channel_budget[0];
    flat.group_sizes.assign(group_elements.begin(), group_elements.end());
    flat.losses.assign(blocks, std::vector<double>(q, 0.0));
    for (std::size_t j = 0; j < blocks; ++j)
      for (std::size_t qi = 0; qi < q; ++qi) flat.losses[j][qi] = loss.at(0, j, qi);
    if (warm_start)
      flat.warm_start = std::vector<std::uint8_t>(warm_start->bits.begin(),
                                                  warm_start->bits.end());
    return solve_exact(flat, opts);
  }

  SolveOptions sub_opts = opts;
  sub_opts.time_limit_s = opts.time_limit_s / static_cast<double>(channels);

  std::vector<SolverResult> channel_solves(channels);
  parallel_for(channels, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      MckpInstance sub;
      sub.budget_bits = channel_budget[c];
      sub.group_sizes.assign(group_elements.begin() + static_cast<std::ptrdiff_t>(c * blocks),
                             group_elements.begin() +
                                 static_cast<std::ptrdiff_t>((c + 1) * blocks));
      sub.losses.assign(blocks, std::vector<double>(q, 0.0));
      for (std::size_t j = 0; j < blocks; ++j)
        for (std::size_t qi = 0; qi < q; ++qi) sub.losses[j][qi] = loss.at(c, j, qi);
      if (warm_start) {
        std::vector<std::uint8_t> warm(blocks);
        for (std::size_t j = 0; j < blocks; ++j) warm[j] = warm_start->at(c, j);
        sub.warm_start = std::move(warm);
      }
      channel_solves[c] = solve_exact(sub, sub_opts);
    }
  });

  SolverResult r;
  r.bits.resize(channels * blocks);
  bool timed_out = false;
  for (std::size_t c = 0; c < channels; ++c) {
    if (channel_solves[c].status == SolveStatus::infeasible)
      fail(ErrorKind::infeasible, "per-channel budget below the 1-bit floor");
    timed_out = timed_out || channel_solves[c].status == SolveStatus::time_limit;
    for (std::size_t j = 0; j < blocks; ++j)
      r.bits[c * blocks + j] = channel_solves[c].bits[j];
  }

  // The per-channel splits strand rounding leftovers; climb the merged
  // assignment against the full budget to spend them.
  {
    MckpInstance full;
    full.budget_bits = budget_bits;
    full.group_sizes.assign(group_elements.begin(), group_elements.end());
    full.losses.assign(channels * blocks, std::vector<double>(q, 0.0));
    for (std::size_t g = 0; g < channels * blocks; ++g)
      for (std::size_t qi = 0; qi < q; ++qi)
        full.losses[g][qi] = loss.omega[g * q + qi];
    std::vector<std::vector<detail::PrunedOption>> opts(channels * blocks);
    std::vector<std::uint32_t> idx(channels * blocks, 0);
    for (std::size_t g = 0; g < channels * blocks; ++g) {
      opts[g] = detail::dominance_prune(full, g);
      for (std::uint32_t t = 0; t < opts[g].size(); ++t)
        if (opts[g][t].bits <= r.bits[g]) idx[g] = t;
    }
    const auto refined = detail::greedy_climb(full, opts, idx);
    for (std::size_t g = 0; g < channels * blocks; ++g)
      r.bits[g] = static_cast<std::uint8_t>(opts[g][refined[g]].bits);
  }

  r.objective = 0.0;
  r.payload_bits = 0;
  for (std::size_t c = 0; c < channels; ++c)
    for (std::size_t j = 0; j < blocks; ++j) {
      r.objective += loss.at(c, j, static_cast<std::size_t>(r.bits[c * blocks + j]) - 1);
      r.payload_bits += group_elements[c * blocks + j] *
                        static_cast<std::int64_t>(r.bits[c * blocks + j]);
    }
  r.status = timed_out ? SolveStatus::time_limit : SolveStatus::feasible_heuristic;
  return r;
}

// Text dump/load for offline debugging and cross-implementation checks.
// Line 1: "mckp <groups> <options> <budget_bits>", then one line per group:
// "<size> <loss_1> ... <loss_Q>".
inline void dump_instance(const MckpInstance& inst, std::ostream& out) {
  inst.validate();
  out << "mckp " << inst.group_count() << ' ' << inst.option_count() << ' '
      << inst.budget_bits << '\n';
  out.precision(17);
  for (std::size_t g = 0; g < inst.group_count(); ++g) {
    out << inst.group_sizes[g];
    for (double v : inst.losses[g]) out << ' ' << v;
    out << '\n';
  }
}

inline MckpInstance load_instance(std::istream& in) {
  std::string tag;
  std::size_t groups = 0, options = 0;
  MckpInstance inst;
  if (!(in >> tag >> groups >> options >> inst.budget_bits) || tag != "mckp")
    fail(ErrorKind::malformed_input, "instance dump must start with 'mckp G Q budget'");
  inst.group_sizes.resize(groups);
  inst.losses.assign(groups, std::vector<double>(options, 0.0));
  for (std::size_t g = 0; g < groups; ++g) {
    if (!(in >> inst.group_sizes[g]))
      fail(ErrorKind::malformed_input, "instance dump truncated at group " + std::to_string(g));
    for (std::size_t qi = 0; qi < options; ++qi)
      if (!(in >> inst.losses[g][qi]))
        fail(ErrorKind::malformed_input,
             "instance dump truncated in losses of group " + std::to_string(g));
  }
  inst.validate();
  return inst;
}

inline void dump_instance(const MckpInstance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io_error, "cannot write " + path.string());
  dump_instance(inst, out);
  if (!out) fail(ErrorKind::io_error, "write failed for " + path.string());
}

inline MckpInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io_error, "cannot open " + path.string());
  return load_instance(in);
}

}  // namespace sizegs
