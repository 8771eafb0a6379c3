#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sizegs/error.hpp"
#include "sizegs/numeric.hpp"

namespace sizegs {

enum class Activation : std::uint8_t { identity = 0, sigmoid = 1, exp = 2 };

inline const char* activation_name(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::sigmoid: return "sigmoid";
    case Activation::exp: return "exp";
  }
  return "identity";
}

inline Activation activation_from_name(const std::string& s) {
  if (s == "identity") return Activation::identity;
  if (s == "sigmoid") return Activation::sigmoid;
  if (s == "exp") return Activation::exp;
  fail(ErrorKind::schema_error, "unknown activation '" + s + "'");
}

inline double apply_activation(Activation a, double raw) {
  switch (a) {
    case Activation::identity: return raw;
    case Activation::sigmoid: return sigmoid(raw);
    case Activation::exp: return std::exp(raw);
  }
  return raw;
}

// One named group of scalar attribute channels, e.g. {"scale", 3, exp}.
struct ChannelSchema {
  std::string name;
  std::size_t width = 1;
  Activation activation = Activation::identity;
};

inline std::size_t schema_channel_count(const std::vector<ChannelSchema>& schema) {
  std::size_t c = 0;
  for (const auto& g : schema) c += g.width;
  return c;
}

inline void validate_schema(const std::vector<ChannelSchema>& schema) {
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (schema[i].width < 1)
      fail(ErrorKind::schema_error, "channel '" + schema[i].name + "' has width 0");
    if (schema[i].name.empty())
      fail(ErrorKind::schema_error, "unnamed channel group");
    for (std::size_t j = i + 1; j < schema.size(); ++j)
      if (schema[i].name == schema[j].name)
        fail(ErrorKind::schema_error, "duplicate channel name '" + schema[i].name + "'");
  }
}

// FNV-1a over the canonical schema text; stored in containers as bookkeeping.
inline std::uint64_t schema_digest(const std::vector<ChannelSchema>& schema) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= '\n';
    h *= 1099511628211ull;
  };
  for (const auto& g : schema) {
    mix(g.name);
    mix(std::to_string(g.width));
    mix(activation_name(g.activation));
  }
  return h;
}

// Schema descriptor text: one group per line, "name width activation".
// '#' starts a comment; blank lines are skipped.
inline std::vector<ChannelSchema> parse_schema_text(const std::string& text) {
  std::vector<ChannelSchema> schema;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string name;
    if (!(ls >> name)) continue;
    std::size_t width = 0;
    std::string act;
    if (!(ls >> width >> act))
      fail(ErrorKind::malformed_input,
           "schema line " + std::to_string(lineno) + ": expected 'name width activation'");
    std::string extra;
    if (ls >> extra)
      fail(ErrorKind::malformed_input,
           "schema line " + std::to_string(lineno) + ": trailing token '" + extra + "'");
    schema.push_back({name, width, activation_from_name(act)});
  }
  if (schema.empty())
    fail(ErrorKind::malformed_input, "schema descriptor declares no channels");
  validate_schema(schema);
  return schema;
}

inline std::string schema_to_text(const std::vector<ChannelSchema>& schema) {
  std::string out;
  for (const auto& g : schema) {
    out += g.name;
    out += ' ';
    out += std::to_string(g.width);
    out += ' ';
    out += activation_name(g.activation);
    out += '\n';
  }
  return out;
}

// A point model: geometry (N x 3) plus a channel-major attribute matrix
// (C x N) described by an ordered schema. The optional importance vector is a
// per-point score supplied by an external tool.
struct GaussianModel {
  std::vector<std::array<double, 3>> positions;
  std::vector<double> attributes;  // row-major C x N
  std::vector<ChannelSchema> schema;
  std::vector<double> importance;  // empty, or one score per point

  std::size_t point_count() const { return positions.size(); }

  std::size_t channel_count() const { return schema_channel_count(schema); }

  double* channel_row(std::size_t c) { return attributes.data() + c * point_count(); }
  const double* channel_row(std::size_t c) const {
    return attributes.data() + c * point_count();
  }

  double& at(std::size_t c, std::size_t i) { return attributes[c * point_count() + i]; }
  double at(std::size_t c, std::size_t i) const { return attributes[c * point_count() + i]; }

  // Starting row of a named channel group, with its width.
  std::optional<std::pair<std::size_t, std::size_t>> find_channel(
      const std::string& name) const {
    std::size_t offset = 0;
    for (const auto& g : schema) {
      if (g.name == name) return std::make_pair(offset, g.width);
      offset += g.width;
    }
    return std::nullopt;
  }

  std::optional<Activation> channel_activation(const std::string& name) const {
    for (const auto& g : schema)
      if (g.name == name) return g.activation;
    return std::nullopt;
  }

  void validate() const {
    if (point_count() == 0) fail(ErrorKind::invalid_input, "model has no points");
    validate_schema(schema);
    const std::size_t c = channel_count();
    if (attributes.size() != c * point_count())
      fail(ErrorKind::invalid_input, "attribute matrix does not match schema widths");
    for (const auto& p : positions)
      for (double v : p)
        if (!std::isfinite(v)) fail(ErrorKind::invalid_input, "non-finite position");
    for (double v : attributes)
      if (!std::isfinite(v)) fail(ErrorKind::invalid_input, "non-finite attribute value");
    if (!importance.empty()) {
      if (importance.size() != point_count())
        fail(ErrorKind::invalid_input, "importance length does not match point count");
      for (double v : importance)
        if (!std::isfinite(v) || v < 0.0)
          fail(ErrorKind::invalid_input, "importance scores must be finite and >= 0");
    }
  }
};

struct CoordinateGrid {
  std::vector<std::array<std::uint32_t, 3>> cells;
  std::array<double, 3> origin{};
  std::array<double, 3> step{};
  int bits = 16;
};

// Uniform per-axis quantization onto a 2^bits grid. Degenerate axes
// (max == min) use step 1 and map to cell 0.
inline CoordinateGrid quantize_coordinates(const GaussianModel& model, int bits) {
  if (bits < 1 || bits > 32)
    fail(ErrorKind::invalid_input, "coordinate bits must be in [1, 32]");
  if (model.point_count() == 0) fail(ErrorKind::invalid_input, "model has no points");

  std::array<double, 3> lo{}, hi{};
  for (int d = 0; d < 3; ++d) {
    lo[d] = model.positions[0][d];
    hi[d] = model.positions[0][d];
  }
  for (const auto& p : model.positions) {
    for (int d = 0; d < 3; ++d) {
      if (!std::isfinite(p[d])) fail(ErrorKind::invalid_input, "non-finite coordinate");
      lo[d] = std::min(lo[d], p[d]);
      hi[d] = std::max(hi[d], p[d]);
    }
  }

  CoordinateGrid grid;
  grid.bits = bits;
  grid.origin = lo;
  const double levels = std::ldexp(1.0, bits) - 1.0;  // 2^bits - 1
  for (int d = 0; d < 3; ++d)
    grid.step[d] = (hi[d] > lo[d]) ? (hi[d] - lo[d]) / levels : 1.0;

  grid.cells.resize(model.point_count());
  for (std::size_t i = 0; i < model.point_count(); ++i) {
    for (int d = 0; d < 3; ++d) {
      if (hi[d] == lo[d]) {
        grid.cells[i][d] = 0;
        continue;
      }
      double q = round_half_even((model.positions[i][d] - lo[d]) / grid.step[d]);
      q = std::clamp(q, 0.0, levels);
      grid.cells[i][d] = static_cast<std::uint32_t>(q);
    }
  }
  return grid;
}

// Bit interleave with x at bit 3k, y at 3k+1, z at 3k+2 (x least significant).
inline std::uint64_t morton_code(std::uint32_t x, std::uint32_t y, std::uint32_t z,
                                 int bits) {
  std::uint64_t code = 0;
  for (int k = 0; k < bits; ++k) {
    code |= (static_cast<std::uint64_t>((x >> k) & 1u)) << (3 * k);
    code |= (static_cast<std::uint64_t>((y >> k) & 1u)) << (3 * k + 1);
    code |= (static_cast<std::uint64_t>((z >> k) & 1u)) << (3 * k + 2);
  }
  return code;
}

struct MortonIndex {
  std::vector<std::uint64_t> codes;         // per original index
  std::vector<std::uint32_t> permutation;   // sorted rank -> original index
};

// Stable sort by Morton code; equal codes keep their original order.
inline MortonIndex morton_sort(const CoordinateGrid& grid) {
  if (grid.bits < 1 || grid.bits > 21)
    fail(ErrorKind::invalid_input, "morton codes support coordinate bits in [1, 21]");
  const std::uint32_t limit =
      (grid.bits == 32) ? 0xFFFFFFFFu : ((1u << grid.bits) - 1u);
  MortonIndex index;
  index.codes.resize(grid.cells.size());
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const auto& c = grid.cells[i];
    if (c[0] > limit || c[1] > limit || c[2] > limit)
      fail(ErrorKind::invalid_input, "grid cell exceeds declared coordinate bit-width");
    index.codes[i] = morton_code(c[0], c[1], c[2], grid.bits);
  }
  index.permutation.resize(grid.cells.size());
  std::iota(index.permutation.begin(), index.permutation.end(), 0u);
  std::stable_sort(index.permutation.begin(), index.permutation.end(),
                   [&index](std::uint32_t a, std::uint32_t b) {
                     return index.codes[a] < index.codes[b];
                   });
  return index;
}

// Reorders geometry, attributes, and importance together so attribute groups
// stay aligned with the geometry stream.
inline GaussianModel apply_permutation(const GaussianModel& model,
                                       const MortonIndex& index) {
  const std::size_t n = model.point_count();
  if (index.permutation.size() != n)
    fail(ErrorKind::invalid_input, "permutation length does not match point count");

  GaussianModel out;
  out.schema = model.schema;
  out.positions.resize(n);
  for (std::size_t r = 0; r < n; ++r) out.positions[r] = model.positions[index.permutation[r]];

  const std::size_t channels = model.channel_count();
  out.attributes.resize(channels * n);
  for (std::size_t c = 0; c < channels; ++c) {
    const double* src = model.channel_row(c);
    double* dst = out.attributes.data() + c * n;
    for (std::size_t r = 0; r < n; ++r) dst[r] = src[index.permutation[r]];
  }
  if (!model.importance.empty()) {
    out.importance.resize(n);
    for (std::size_t r = 0; r < n; ++r)
      out.importance[r] = model.importance[index.permutation[r]];
  }
  return out;
}

inline std::vector<std::array<std::uint32_t, 3>> apply_permutation(
    const std::vector<std::array<std::uint32_t, 3>>& cells, const MortonIndex& index) {
  if (index.permutation.size() != cells.size())
    fail(ErrorKind::invalid_input, "permutation length does not match grid size");
  std::vector<std::array<std::uint32_t, 3>> out(cells.size());
  for (std::size_t r = 0; r < cells.size(); ++r) out[r] = cells[index.permutation[r]];
  return out;
}

}  // namespace sizegs
