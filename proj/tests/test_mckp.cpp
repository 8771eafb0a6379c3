#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "sizegs/mckp.hpp"

using namespace sizegs;

namespace {

// Exhaustive enumeration oracle, summing losses in group order like the
// production solvers so objectives compare exactly.
struct Enumerated {
  double objective = std::numeric_limits<double>::infinity();
  std::int64_t payload = 0;
  bool feasible = false;
};

Enumerated enumerate_best(const MckpInstance& inst) {
  Enumerated best;
  const std::size_t groups = inst.group_count();
  const std::size_t q = inst.option_count();
  std::vector<std::size_t> pick(groups, 0);
  for (;;) {
    std::int64_t w = 0;
    double v = 0.0;
    for (std::size_t g = 0; g < groups; ++g) {
      w += inst.weight(g, static_cast<int>(pick[g]) + 1);
      v += inst.losses[g][pick[g]];
    }
    if (w <= inst.budget_bits && v < best.objective) {
      best.objective = v;
      best.payload = w;
      best.feasible = true;
    }
    std::size_t g = 0;
    while (g < groups && ++pick[g] == q) pick[g++] = 0;
    if (g == groups) break;
  }
  return best;
}

MckpInstance random_instance(std::mt19937_64& rng, std::size_t max_groups,
                             std::size_t max_options) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  MckpInstance inst;
  const std::size_t groups = 1 + rng() % max_groups;
  const std::size_t q = 1 + rng() % max_options;
  inst.group_sizes.resize(groups);
  inst.losses.assign(groups, std::vector<double>(q, 0.0));
  for (std::size_t g = 0; g < groups; ++g) {
    inst.group_sizes[g] = 1 + static_cast<std::int64_t>(rng() % 40);
    double loss = 1.0 + 20.0 * unit(rng);
    for (std::size_t qi = 0; qi < q; ++qi) {
      inst.losses[g][qi] = loss;
      loss *= 0.2 + 0.7 * unit(rng);  // mostly decreasing, arbitrary curvature
    }
  }
  const std::int64_t floor = inst.min_weight_total();
  const std::int64_t ceil = inst.max_weight_total();
  inst.budget_bits = floor + static_cast<std::int64_t>(unit(rng) * (ceil - floor + 1));
  return inst;
}

MckpInstance spec_example() {
  // Two groups of four elements, options {1, 2} bits, budget 12 payload bits.
  MckpInstance inst;
  inst.group_sizes = {4, 4};
  inst.losses = {{10.0, 3.0}, {8.0, 2.0}};
  inst.budget_bits = 12;
  return inst;
}

}  // namespace

TEST_CASE("exact solver on the enumerable example") {
  const auto inst = spec_example();
  const auto oracle = enumerate_best(inst);
  const auto got = solve_exact(inst);
  CHECK(oracle.objective == 11.0);  // (2-bit, 1-bit)
  CHECK(got.objective == 11.0);
  CHECK(got.payload_bits == 12);
  CHECK(got.bits == std::vector<std::uint8_t>{2, 1});
  CHECK(got.status == SolveStatus::optimal);
}

TEST_CASE("unconstrained budget takes the lowest loss everywhere") {
  MckpInstance inst;
  inst.group_sizes = {3, 5, 2};
  inst.losses = {{9, 4, 1}, {8, 5, 2}, {7, 6, 3}};
  inst.budget_bits = inst.max_weight_total() + 100;
  const auto got = solve_exact(inst);
  CHECK(got.bits == std::vector<std::uint8_t>{3, 3, 3});
  CHECK(got.objective == 1.0 + 2.0 + 3.0);
}

TEST_CASE("budget below the one-bit floor is infeasible") {
  auto inst = spec_example();
  inst.budget_bits = 7;  // floor is 8
  CHECK(solve_exact(inst).status == SolveStatus::infeasible);
  CHECK(solve_baseline_greedy(inst).status == SolveStatus::infeasible);
}

TEST_CASE("exact matches exhaustive enumeration on random small instances") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto inst = random_instance(rng, 4, 4);
    const auto oracle = enumerate_best(inst);
    const auto got = solve_exact(inst);
    REQUIRE(oracle.feasible);
    CHECK(got.status == SolveStatus::optimal);
    CHECK(got.objective == Catch::Approx(oracle.objective).margin(1e-12));
    CHECK(got.payload_bits <= inst.budget_bits);
  }
}

TEST_CASE("branch and bound agrees with dynamic programming") {
  std::mt19937_64 rng(99);
  SolveOptions tiny_dp;
  tiny_dp.dp_cell_cap = 1;  // force the branch-and-bound path
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = random_instance(rng, 8, 6);
    const auto dp = solve_exact(inst);
    const auto bnb = solve_exact(inst, tiny_dp);
    REQUIRE(dp.status == SolveStatus::optimal);
    REQUIRE(bnb.status == SolveStatus::optimal);
    CHECK(bnb.objective == Catch::Approx(dp.objective).margin(1e-9));
    CHECK(bnb.payload_bits <= inst.budget_bits);
  }
}

TEST_CASE("refusal path when the fallback is disabled") {
  SolveOptions opts;
  opts.dp_cell_cap = 1;
  opts.allow_bnb_fallback = false;
  try {
    solve_exact(spec_example(), opts);
    FAIL("expected a refusal");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_input);
    CHECK(std::string(e.what()).find("hierarchical") != std::string::npos);
  }
}

TEST_CASE("greedy baseline properties") {
  SECTION("single group takes the largest affordable bit-width") {
    MckpInstance inst;
    inst.group_sizes = {10};
    inst.losses = {{8, 6, 5, 4.5}};
    inst.budget_bits = 31;  // affords 3 bits, not 4
    const auto greedy = solve_baseline_greedy(inst);
    const auto exact = solve_exact(inst);
    CHECK(greedy.bits == std::vector<std::uint8_t>{3});
    CHECK(greedy.objective == exact.objective);
  }
  SECTION("greedy never beats exact and stays feasible") {
    std::mt19937_64 rng(555);
    int strict = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const auto inst = random_instance(rng, 6, 5);
      const auto exact = solve_exact(inst);
      const auto greedy = solve_baseline_greedy(inst);
      REQUIRE(exact.status == SolveStatus::optimal);
      CHECK(greedy.payload_bits <= inst.budget_bits);
      CHECK(greedy.objective >= exact.objective - 1e-9);
      if (greedy.objective > exact.objective + 1e-9) ++strict;
    }
    CHECK(strict > 0);
  }
}

TEST_CASE("budget monotonicity of the exact objective") {
  std::mt19937_64 rng(808);
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = random_instance(rng, 5, 5);
    inst.budget_bits = inst.min_weight_total();
    double prev = std::numeric_limits<double>::infinity();
    for (int step = 0; step < 6; ++step) {
      const auto got = solve_exact(inst);
      REQUIRE(got.status == SolveStatus::optimal);
      CHECK(got.objective <= prev + 1e-12);
      prev = got.objective;
      inst.budget_bits += 1 + static_cast<std::int64_t>(rng() % 20);
    }
  }
}

TEST_CASE("identical instances produce identical assignments") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = random_instance(rng, 6, 6);
    const auto a = solve_exact(inst);
    const auto b = solve_exact(inst);
    CHECK(a.bits == b.bits);
    SolveOptions bnb;
    bnb.dp_cell_cap = 1;
    const auto c = solve_exact(inst, bnb);
    const auto d = solve_exact(inst, bnb);
    CHECK(c.bits == d.bits);
  }
}

TEST_CASE("warm start never worsens the objective") {
  std::mt19937_64 rng(616);
  SolveOptions bnb;
  bnb.dp_cell_cap = 1;
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = random_instance(rng, 8, 6);
    const auto plain = solve_exact(inst, bnb);
    // a deliberately good warm start: the plain result itself
    inst.warm_start = plain.bits;
    const auto warmed = solve_exact(inst, bnb);
    CHECK(warmed.objective <= plain.objective + 1e-12);
    // and a junk warm start must not hurt either
    inst.warm_start = std::vector<std::uint8_t>(inst.group_count(), 1);
    const auto junk = solve_exact(inst, bnb);
    CHECK(junk.objective <= plain.objective + 1e-12);
  }
}

TEST_CASE("budget apportionment follows the stated proportional split") {
  SECTION("channel bits {4, 8} on 12 units") {
    const auto parts = apportion_budget(12, {4, 8});
    CHECK(parts == std::vector<std::int64_t>{4, 8});
  }
  SECTION("parts always sum to the whole") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<std::int64_t> shares(1 + rng() % 7);
      for (auto& s : shares) s = 1 + static_cast<std::int64_t>(rng() % 16);
      const std::int64_t total = static_cast<std::int64_t>(rng() % 100000);
      const auto parts = apportion_budget(total, shares);
      std::int64_t sum = 0;
      for (auto p : parts) sum += p;
      CHECK(sum == total);
    }
  }
}

namespace {

LossTensor tensor_from(const MckpInstance& inst, std::size_t channels,
                       std::size_t blocks) {
  LossTensor loss;
  loss.channels = channels;
  loss.blocks = blocks;
  loss.q_max = inst.option_count();
  loss.omega.resize(channels * blocks * loss.q_max);
  for (std::size_t g = 0; g < channels * blocks; ++g)
    for (std::size_t qi = 0; qi < loss.q_max; ++qi)
      loss.omega[g * loss.q_max + qi] = inst.losses[g][qi];
  return loss;
}

}  // namespace

TEST_CASE("hierarchical solver") {
  SECTION("single channel reduces exactly to the flat exact solve") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 100; ++trial) {
      MckpInstance inst = random_instance(rng, 6, 5);
      const auto flat = solve_exact(inst);
      const auto loss = tensor_from(inst, 1, inst.group_count());
      const auto hier = solve_hierarchical(loss, inst.group_sizes, inst.budget_bits);
      REQUIRE(flat.status == SolveStatus::optimal);
      CHECK(hier.status == SolveStatus::optimal);
      CHECK(hier.objective == Catch::Approx(flat.objective).margin(1e-12));
    }
  }

  SECTION("multi-channel results are feasible and close to flat exact") {
    std::mt19937_64 rng(90210);
    int both = 0;
    for (int trial = 0; trial < 150; ++trial) {
      const std::size_t channels = 2 + rng() % 3;
      const std::size_t blocks = 2 + rng() % 3;
      if (channels * blocks > 16) continue;
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      MckpInstance inst;
      inst.group_sizes.resize(channels * blocks);
      inst.losses.assign(channels * blocks, std::vector<double>(4, 0.0));
      for (std::size_t g = 0; g < inst.group_sizes.size(); ++g) {
        inst.group_sizes[g] = 5 + static_cast<std::int64_t>(rng() % 30);
        double v = 1.0 + 30.0 * unit(rng);
        for (std::size_t qi = 0; qi < 4; ++qi) {
          inst.losses[g][qi] = v;
          v *= 0.3 + 0.4 * unit(rng);
        }
      }
      inst.budget_bits =
          inst.min_weight_total() +
          static_cast<std::int64_t>(unit(rng) *
                                    (inst.max_weight_total() - inst.min_weight_total()));
      const auto flat = solve_exact(inst);
      if (flat.status != SolveStatus::optimal) continue;
      const auto loss = tensor_from(inst, channels, blocks);
      const auto hier = solve_hierarchical(loss, inst.group_sizes, inst.budget_bits);
      ++both;
      CHECK(hier.payload_bits <= inst.budget_bits);
      CHECK(hier.objective >= flat.objective - 1e-9);
    }
    CHECK(both >= 100);
  }
}

TEST_CASE("instance dumps round trip through the text format") {
  std::mt19937_64 rng(64);
  const auto inst = random_instance(rng, 5, 6);
  std::stringstream ss;
  dump_instance(inst, ss);
  const auto loaded = load_instance(ss);
  CHECK(loaded.group_sizes == inst.group_sizes);
  CHECK(loaded.losses == inst.losses);
  CHECK(loaded.budget_bits == inst.budget_bits);

  std::stringstream bad("mckp 2 2 10\n5 1.0 0.5\n");
  CHECK_THROWS_AS(load_instance(bad), Error);
}
