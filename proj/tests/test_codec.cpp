#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sizegs/codec.hpp"
#include "sizegs/model.hpp"
#include "sizegs/quantizer.hpp"
#include "sizegs/synth.hpp"

using namespace sizegs;

namespace {

struct Pipeline {
  GaussianModel sorted;
  CoordinateGrid sorted_grid;
  GroupPartition partition;
  std::vector<std::uint8_t> geometry;
};

Pipeline prepare(const GaussianModel& model, std::size_t blocks, int coord_bits = 16) {
  Pipeline p;
  const auto grid = quantize_coordinates(model, coord_bits);
  const auto index = morton_sort(grid);
  p.sorted = apply_permutation(model, index);
  p.sorted_grid = grid;
  p.sorted_grid.cells = apply_permutation(grid.cells, index);
  p.partition = make_partition(p.sorted.channel_count(), p.sorted.point_count(), blocks);
  p.geometry = encode_geometry(p.sorted_grid);
  return p;
}

}  // namespace

TEST_CASE("range coder round trips byte streams") {
  std::mt19937_64 rng(5150);
  SECTION("uniform random bytes") {
    for (std::size_t len : {0, 1, 17, 4096}) {
      std::vector<std::uint8_t> data(len);
      for (auto& b : data) b = static_cast<std::uint8_t>(rng());
      const auto coded = rc_encode_bytes(data);
      CHECK(rc_decode_bytes(coded, len) == data);
    }
  }
  SECTION("skewed bytes compress below their raw size") {
    std::vector<std::uint8_t> data(20000);
    std::geometric_distribution<int> geo(0.4);
    for (auto& b : data) b = static_cast<std::uint8_t>(std::min(geo(rng), 255));
    const auto coded = rc_encode_bytes(data);
    CHECK(coded.size() < data.size() / 2);
    CHECK(rc_decode_bytes(coded, data.size()) == data);
  }
  SECTION("uniform bytes stay within five percent of raw") {
    std::vector<std::uint8_t> data(50000);
    for (auto& b : data) b = static_cast<std::uint8_t>(rng());
    const auto coded = rc_encode_bytes(data);
    CHECK(static_cast<double>(coded.size()) < 1.05 * static_cast<double>(data.size()));
  }
  SECTION("truncated streams raise a typed error") {
    std::vector<std::uint8_t> data(100, 7);
    auto coded = rc_encode_bytes(data);
    coded.resize(2);
    CHECK_THROWS_AS(rc_decode_bytes(coded, 100), Error);
  }
}

TEST_CASE("bit packing round trips at every width") {
  std::mt19937_64 rng(61);
  for (int bits = 1; bits <= 16; ++bits) {
    const std::uint32_t cap = (1u << bits) - 1u;
    std::vector<std::uint16_t> symbols(257);
    for (auto& s : symbols) s = static_cast<std::uint16_t>(rng() & cap);
    const auto packed = pack_bits(symbols, bits);
    CHECK(packed.size() == (symbols.size() * static_cast<std::size_t>(bits) + 7) / 8);
    CHECK(unpack_bits(packed, symbols.size(), bits) == symbols);
  }
  SECTION("overflowing symbols rejected") {
    const std::vector<std::uint16_t> bad = {4};
    CHECK_THROWS_AS(pack_bits(bad, 2), Error);
  }
}

TEST_CASE("geometry stream round trips exactly") {
  SECTION("single point at the origin") {
    CoordinateGrid grid;
    grid.bits = 16;
    grid.origin = {1.5, -2.0, 0.25};
    grid.step = {0.1, 0.2, 0.3};
    grid.cells = {{0, 0, 0}};
    const auto body = encode_geometry(grid);
    const auto back = decode_geometry(body, 1, 16);
    CHECK(back.cells == grid.cells);
    CHECK(back.origin == grid.origin);
    CHECK(back.step == grid.step);
  }
  SECTION("duplicate positions compress far below raw coordinates") {
    CoordinateGrid grid;
    grid.bits = 16;
    grid.cells.assign(5000, {1234, 567, 89});
    const auto body = encode_geometry(grid);
    // raw would be 3 * 2 bytes * 5000 = 30000
    CHECK(body.size() < 1500);
    CHECK(decode_geometry(body, 5000, 16).cells == grid.cells);
  }
  SECTION("random clouds round trip bit-exactly") {
    std::mt19937_64 rng(4096);
    CoordinateGrid grid;
    grid.bits = 16;
    grid.cells.resize(1000);
    for (auto& c : grid.cells)
      c = {static_cast<std::uint32_t>(rng() & 0xFFFF),
           static_cast<std::uint32_t>(rng() & 0xFFFF),
           static_cast<std::uint32_t>(rng() & 0xFFFF)};
    std::sort(grid.cells.begin(), grid.cells.end(),
              [&](const auto& a, const auto& b) {
                return morton_code(a[0], a[1], a[2], 16) < morton_code(b[0], b[1], b[2], 16);
              });
    const auto body = encode_geometry(grid);
    CHECK(decode_geometry(body, grid.cells.size(), 16).cells == grid.cells);
  }
  SECTION("unsorted input violates the precondition") {
    CoordinateGrid grid;
    grid.bits = 8;
    grid.cells = {{5, 5, 5}, {0, 0, 0}};
    CHECK_THROWS_AS(encode_geometry(grid), Error);
  }
}

TEST_CASE("container encode-decode restores symbols and grid exactly") {
  SynthConfig cfg;
  cfg.points = 900;
  cfg.seed = 3110;
  const auto model = make_synthetic_model(cfg);
  const auto p = prepare(model, 8);

  std::mt19937_64 rng(8);
  BitAssignment bits = BitAssignment::uniform(p.partition.channels, 8, 8);
  for (auto& b : bits.bits) b = static_cast<std::uint8_t>(1 + rng() % 16);

  const auto built =
      assemble_container(p.sorted, p.geometry, p.partition, bits, Norm::l2, 16);
  const auto decoded = decode_container(built.bytes);

  CHECK(decoded.header.point_count == p.sorted.point_count());
  CHECK(decoded.grid.cells == p.sorted_grid.cells);
  CHECK(decoded.assignment.bits == bits.bits);
  CHECK(decoded.model.schema.size() == model.schema.size());

  SECTION("attribute error per element bounded by its group scale") {
    const std::size_t n = p.sorted.point_count();
    for (std::size_t c = 0; c < p.partition.channels; ++c) {
      for (std::size_t j = 0; j < p.partition.blocks; ++j) {
        const std::span<const double> vals(
            p.sorted.attributes.data() + c * n + p.partition.block_begin(j),
            p.partition.block_length(j));
        const auto q = quantize_group(vals, bits.at(c, j));
        const double s = q.params.constant ? 0.0 : static_cast<double>(q.params.scale);
        for (std::size_t i = 0; i < vals.size(); ++i) {
          const double rec = decoded.model.at(c, p.partition.block_begin(j) + i);
          CHECK(std::abs(rec - vals[i]) <= s);
        }
      }
    }
  }

  SECTION("positions reconstruct from origin plus grid times step") {
    for (std::size_t i = 0; i < p.sorted.point_count(); ++i)
      for (int d = 0; d < 3; ++d)
        CHECK(decoded.model.positions[i][d] ==
              p.sorted_grid.origin[d] +
                  static_cast<double>(p.sorted_grid.cells[i][d]) * p.sorted_grid.step[d]);
  }

  SECTION("two assemblies of the same inputs are byte-identical") {
    const auto again =
        assemble_container(p.sorted, p.geometry, p.partition, bits, Norm::l2, 16);
    CHECK(again.bytes == built.bytes);
  }

  SECTION("thread count does not change the container") {
    const auto threaded =
        assemble_container(p.sorted, p.geometry, p.partition, bits, Norm::l2, 16, 5);
    CHECK(threaded.bytes == built.bytes);
  }

  SECTION("section lengths plus header equal the file size") {
    const auto& d = decoded.diagnostics;
    CHECK(kHeaderBytes + d.geometry_section_bytes + d.metadata_section_bytes +
              d.attribute_section_bytes ==
          built.bytes.size());
  }
}

TEST_CASE("constant groups carry no payload") {
  SynthConfig cfg;
  cfg.points = 300;
  cfg.seed = 12;
  auto model = make_synthetic_model(cfg);
  const std::size_t n = model.point_count();
  for (std::size_t i = 0; i < n; ++i) model.attributes[i] = 2.5;  // channel 0 constant

  const auto p = prepare(model, 4);
  const auto bits = BitAssignment::uniform(p.partition.channels, 4, 8);
  const auto built =
      assemble_container(p.sorted, p.geometry, p.partition, bits, Norm::l2, 16);
  const auto decoded = decode_container(built.bytes);
  CHECK(decoded.diagnostics.constant_groups == 4);
  for (std::size_t i = 0; i < n; ++i) CHECK(decoded.model.at(0, i) == 2.5);
}

TEST_CASE("corrupt containers yield typed errors") {
  SynthConfig cfg;
  cfg.points = 400;
  cfg.seed = 77;
  const auto model = make_synthetic_model(cfg);
  const auto p = prepare(model, 5);
  const auto bits = BitAssignment::uniform(p.partition.channels, 5, 6);
  const auto built =
      assemble_container(p.sorted, p.geometry, p.partition, bits, Norm::l2, 16);

  SECTION("flipped magic") {
    auto bad = built.bytes;
    bad[0] ^= 0xFF;
    try {
      decode_container(bad);
      FAIL("expected corrupt container");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::corrupt_container);
    }
  }
  SECTION("truncated file") {
    auto bad = built.bytes;
    bad.resize(bad.size() / 2);
    CHECK_THROWS_AS(decode_container(bad), Error);
  }
  SECTION("every single-byte flip is detected") {
    std::mt19937_64 rng(1000003);
    for (int trial = 0; trial < 200; ++trial) {
      auto bad = built.bytes;
      const std::size_t at = rng() % bad.size();
      bad[at] ^= static_cast<std::uint8_t>(1 + rng() % 255);
      bool threw = false;
      try {
        decode_container(bad);
      } catch (const Error& e) {
        threw = true;
        CHECK(e.kind() == ErrorKind::corrupt_container);
      }
      CHECK(threw);
    }
  }
}

TEST_CASE("uniform symbols keep the attribute stream near the payload size") {
  // Uniform random symbols are incompressible, so the entropy-coded stream
  // should sit within a few percent of the packed payload.
  std::mt19937_64 rng(31416);
  for (int bits : {3, 8, 13}) {
    const std::size_t count = 40000;
    std::vector<std::uint16_t> symbols(count);
    const std::uint32_t cap = (1u << bits) - 1u;
    for (auto& s : symbols) s = static_cast<std::uint16_t>(rng() & cap);
    const auto packed = pack_bits(symbols, bits);
    const auto coded = rc_encode_bytes(packed);
    const double payload_bytes = count * bits / 8.0;
    CHECK(static_cast<double>(coded.size()) < payload_bytes * 1.05);
    CHECK(static_cast<double>(coded.size()) > payload_bytes * 0.9);
  }
}

TEST_CASE("skewed symbols compress below the payload size") {
  std::mt19937_64 rng(2718);
  std::geometric_distribution<int> geo(0.5);
  const int bits = 10;
  std::vector<std::uint16_t> symbols(40000);
  for (auto& s : symbols) s = static_cast<std::uint16_t>(std::min(geo(rng), 1023));
  const auto coded = rc_encode_bytes(pack_bits(symbols, bits));
  CHECK(static_cast<double>(coded.size()) <
        static_cast<double>(symbols.size()) * bits / 8.0);
}
