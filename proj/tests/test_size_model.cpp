#include <catch2/catch_amalgamated.hpp>

#include "sizegs/codec.hpp"
#include "sizegs/model.hpp"
#include "sizegs/quantizer.hpp"
#include "sizegs/size_model.hpp"
#include "sizegs/synth.hpp"

using namespace sizegs;

namespace {

SizeEstimate two_group_estimate(std::int64_t fixed, std::int64_t budget) {
  GroupPartition p = make_partition(2, 1000, 1);
  SizeEstimate est = make_size_estimate(p, fixed, budget);
  return est;
}

}  // namespace

TEST_CASE("estimate_size arithmetic") {
  SECTION("two groups of 1000 elements at 8 and 16 bits") {
    auto est = two_group_estimate(100, 10000);
    BitAssignment bits = BitAssignment::uniform(2, 1, 8);
    bits.at(1, 0) = 16;
    CHECK(payload_bits(est, bits) == 24000);
    CHECK(estimate_size(est, bits) == 3100);
  }
  SECTION("raising one group by a bit adds n/8 bytes") {
    auto est = two_group_estimate(0, 10000);
    BitAssignment a = BitAssignment::uniform(2, 1, 8);
    BitAssignment b = a;
    b.at(0, 0) = 9;
    CHECK(estimate_size(est, b) - estimate_size(est, a) == 1000 / 8);
  }
  SECTION("delta shifts the estimate additively") {
    auto est = two_group_estimate(100, 10000);
    BitAssignment bits = BitAssignment::uniform(2, 1, 8);
    const auto base = estimate_size(est, bits);
    est.delta = -500;
    CHECK(estimate_size(est, bits) == base - 500);
  }
  SECTION("payload term is exactly linear") {
    auto est = two_group_estimate(0, 10000);
    BitAssignment a = BitAssignment::uniform(2, 1, 3);
    BitAssignment b = BitAssignment::uniform(2, 1, 11);
    BitAssignment zero = BitAssignment::uniform(2, 1, 7);
    // payload(a) + payload(b) = payload(3+11 bits) = 2 * payload(7 bits)
    CHECK(payload_bits(est, a) + payload_bits(est, b) == 2 * payload_bits(est, zero));
  }
}

TEST_CASE("calibration updates") {
  auto est = two_group_estimate(100, 10000);
  SECTION("actual on target zeroes the delta") {
    est = calibrate(est, 10000);
    CHECK(est.delta == 0);
  }
  SECTION("overshoot tightens the next solver budget by the same amount") {
    est = calibrate(est, 10000 + 1000000);
    CHECK(est.delta == 1000000);
    CHECK(solver_budget_bits(est) == (10000 - 100 - 1000000) * 8);
  }
  SECTION("calibrate is idempotent for a fixed measurement") {
    est = calibrate(est, 12345);
    const auto once = est.delta;
    est = calibrate(est, 12345);
    CHECK(est.delta == once);
  }
  SECTION("residual calibration absorbs only the coding gain") {
    BitAssignment bits = BitAssignment::uniform(2, 1, 8);
    const std::int64_t linear = (payload_bits(est, bits) + 7) / 8 + est.fixed_cost;
    est = calibrate_residual(est, linear - 37, bits);
    CHECK(est.delta == -37);
    est = calibrate_residual(est, linear, bits);
    CHECK(est.delta == 0);
  }
}

TEST_CASE("fixed cost is measured from real streams and deterministic") {
  SynthConfig cfg;
  cfg.points = 500;
  cfg.seed = 77;
  const auto model = make_synthetic_model(cfg);
  const auto grid = quantize_coordinates(model, 16);
  const auto index = morton_sort(grid);
  const auto sorted = apply_permutation(model, index);
  CoordinateGrid sorted_grid = grid;
  sorted_grid.cells = apply_permutation(grid.cells, index);
  const auto geometry = encode_geometry(sorted_grid);

  auto fixed_for_blocks = [&](std::size_t blocks) {
    const auto partition = make_partition(sorted.channel_count(), 500, blocks);
    const auto bits = BitAssignment::uniform(partition.channels, blocks, 8);
    const auto built =
        assemble_container(sorted, geometry, partition, bits, Norm::l2, 16);
    return measure_fixed_cost(built.fixed_parts);
  };

  SECTION("same model serialized twice yields the same byte count") {
    CHECK(fixed_for_blocks(10) == fixed_for_blocks(10));
  }
  SECTION("metadata grows when the block count doubles") {
    CHECK(fixed_for_blocks(20) > fixed_for_blocks(10));
  }
  SECTION("single point containers still measure positive") {
    std::vector<ContainerFixedParts> parts = {{32, 24, 60, 40, 0}};
    CHECK(measure_fixed_cost(parts[0]) == 156);
  }
}
