#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sizegs/error.hpp"
#include "sizegs/model.hpp"
#include "sizegs/numeric.hpp"
#include "sizegs/parallel.hpp"

namespace sizegs {

inline constexpr int kMaxBits = 16;

// Column split of the attribute matrix into B contiguous blocks per channel.
// Every channel shares the same column boundaries; block lengths differ by at
// most one, larger blocks first.
struct GroupPartition {
  std::size_t channels = 0;
  std::size_t blocks = 0;
  std::vector<std::size_t> boundaries;  // B + 1 entries, 0 .. n_kept

  std::size_t block_begin(std::size_t j) const { return boundaries[j]; }
  std::size_t block_end(std::size_t j) const { return boundaries[j + 1]; }
  std::size_t block_length(std::size_t j) const { return boundaries[j + 1] - boundaries[j]; }
  std::size_t group_count() const { return channels * blocks; }
};

inline GroupPartition make_partition(std::size_t channels, std::size_t n_kept,
                                     std::size_t blocks) {
  if (blocks < 1) fail(ErrorKind::invalid_partition, "block count must be >= 1");
  if (channels < 1) fail(ErrorKind::invalid_partition, "channel count must be >= 1");
  if (n_kept < blocks)
    fail(ErrorKind::invalid_partition,
         "cannot split " + std::to_string(n_kept) + " points into " +
             std::to_string(blocks) + " blocks");
  GroupPartition p;
  p.channels = channels;
  p.blocks = blocks;
  p.boundaries.resize(blocks + 1);
  const std::size_t base = n_kept / blocks;
  const std::size_t extra = n_kept % blocks;
  p.boundaries[0] = 0;
  for (std::size_t j = 0; j < blocks; ++j)
    p.boundaries[j + 1] = p.boundaries[j] + base + (j < extra ? 1 : 0);
  return p;
}

// Affine quantization parameters for one group. Constant groups (max == min)
// carry scale 0 and decode every symbol to min.
struct GroupQuantParams {
  float min = 0.0f;
  float scale = 0.0f;
  std::int32_t zero_point = 0;
  std::uint8_t bits = 8;
  bool constant = false;
};

struct QuantizedGroup {
  std::vector<std::uint16_t> symbols;
  GroupQuantParams params;
};

namespace detail {

inline GroupQuantParams group_params(double lo, double hi, int bits) {
  GroupQuantParams p;
  p.bits = static_cast<std::uint8_t>(bits);
  p.min = static_cast<float>(lo);
  if (hi == lo) {
    p.constant = true;
    return p;
  }
  // Scale stays in float32 (the metadata width); all arithmetic on both the
  // encode and decode side uses this exact value. The range rounds up to the
  // next float so scale * 2^bits never falls below the true range, which
  // keeps the round-trip error within one scale even at the clamped edges.
  const double range = hi - lo;
  float r32 = static_cast<float>(range);
  if (static_cast<double>(r32) < range)
    r32 = std::nextafter(r32, std::numeric_limits<float>::infinity());
  p.scale = std::ldexp(r32, -bits);
  const double shift = std::floor(-lo / static_cast<double>(p.scale));
  if (std::abs(shift) > 2147483646.0)
    fail(ErrorKind::invalid_input,
         "group offset/range ratio too large for a 32-bit zero point");
  p.zero_point = static_cast<std::int32_t>(shift);
  return p;
}

inline std::uint16_t quantize_value(double x, const GroupQuantParams& p) {
  const double cap = std::ldexp(1.0, p.bits) - 1.0;
  double t = x / static_cast<double>(p.scale) + static_cast<double>(p.zero_point);
  t = std::clamp(t, 0.0, cap);
  return static_cast<std::uint16_t>(round_half_even(t));
}

inline double dequantize_value(std::uint16_t sym, const GroupQuantParams& p) {
  if (p.constant) return static_cast<double>(p.min);
  return (static_cast<double>(sym) - static_cast<double>(p.zero_point)) *
         static_cast<double>(p.scale);
}

}  // namespace detail

inline QuantizedGroup quantize_group(std::span<const double> values, int bits) {
  if (values.empty()) fail(ErrorKind::invalid_input, "cannot quantize an empty group");
  if (bits < 1 || bits > kMaxBits)
    fail(ErrorKind::invalid_input, "bit-width must be in [1, 16]");
  double lo = values[0], hi = values[0];
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorKind::invalid_input, "non-finite attribute value");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  QuantizedGroup out;
  out.params = detail::group_params(lo, hi, bits);
  out.symbols.resize(values.size(), 0);
  if (!out.params.constant)
    for (std::size_t i = 0; i < values.size(); ++i)
      out.symbols[i] = detail::quantize_value(values[i], out.params);
  return out;
}

inline std::vector<double> dequantize_group(std::span<const std::uint16_t> symbols,
                                            const GroupQuantParams& params) {
  const std::uint32_t cap = (1u << params.bits) - 1u;
  std::vector<double> out(symbols.size());
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i] > cap)
      fail(ErrorKind::corrupt_container,
           "symbol " + std::to_string(symbols[i]) + " exceeds " +
               std::to_string(params.bits) + "-bit range");
    out[i] = detail::dequantize_value(symbols[i], params);
  }
  return out;
}

enum class Norm : std::uint8_t { l1 = 0, l2 = 1, linf = 2 };

inline const char* norm_name(Norm n) {
  switch (n) {
    case Norm::l1: return "l1";
    case Norm::l2: return "l2";
    case Norm::linf: return "linf";
  }
  return "l2";
}

inline Norm norm_from_name(const std::string& s) {
  if (s == "l1" || s == "L1") return Norm::l1;
  if (s == "l2" || s == "L2") return Norm::l2;
  if (s == "linf" || s == "Linf") return Norm::linf;
  fail(ErrorKind::invalid_input, "unknown norm '" + s + "' (l1, l2, linf)");
}

// Per-group bit-width choice, the solver's decision variable.
struct BitAssignment {
  std::size_t channels = 0;
  std::size_t blocks = 0;
  std::vector<std::uint8_t> bits;  // row-major C x B

  static BitAssignment uniform(std::size_t channels, std::size_t blocks, int width) {
    BitAssignment a;
    a.channels = channels;
    a.blocks = blocks;
    a.bits.assign(channels * blocks, static_cast<std::uint8_t>(width));
    return a;
  }

  std::uint8_t& at(std::size_t c, std::size_t j) { return bits[c * blocks + j]; }
  std::uint8_t at(std::size_t c, std::size_t j) const { return bits[c * blocks + j]; }
};

// Precomputed quantization loss per (channel, block, bit-width).
struct LossTensor {
  std::size_t channels = 0;
  std::size_t blocks = 0;
  std::size_t q_max = kMaxBits;
  Norm norm = Norm::l2;
  std::vector<double> omega;  // C x B x Q, option index b holds bits = b + 1

  double at(std::size_t c, std::size_t j, std::size_t option) const {
    return omega[(c * blocks + j) * q_max + option];
  }
  double at_bits(std::size_t c, std::size_t j, int bits) const {
    return at(c, j, static_cast<std::size_t>(bits - 1));
  }
  double total(const BitAssignment& a) const {
    double sum = 0.0;
    for (std::size_t c = 0; c < channels; ++c)
      for (std::size_t j = 0; j < blocks; ++j) sum += at_bits(c, j, a.at(c, j));
    return sum;
  }
};

namespace detail {

inline double group_loss(std::span<const double> values, const GroupQuantParams& p,
                         Norm norm) {
  if (p.constant) return 0.0;
  double acc = 0.0;
  for (double x : values) {
    const double d = std::abs(dequantize_value(quantize_value(x, p), p) - x);
    switch (norm) {
      case Norm::l1: acc += d; break;
      case Norm::l2: acc += d * d; break;
      case Norm::linf: acc = std::max(acc, d); break;
    }
  }
  return norm == Norm::l2 ? std::sqrt(acc) : acc;
}

}  // namespace detail

// Loss of one concrete assignment, without materializing the full tensor.
inline double assignment_loss(const GaussianModel& model, const GroupPartition& partition,
                              const BitAssignment& bits, Norm norm, unsigned threads = 1) {
  const std::size_t n = model.point_count();
  std::vector<double> per_group(partition.group_count(), 0.0);
  parallel_for(partition.group_count(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t g = begin; g < end; ++g) {
      const std::size_t c = g / partition.blocks;
      const std::size_t j = g % partition.blocks;
      const double* row = model.attributes.data() + c * n;
      const std::span<const double> vals(row + partition.block_begin(j),
                                         partition.block_length(j));
      double lo = vals[0], hi = vals[0];
      for (double v : vals) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const auto params = detail::group_params(lo, hi, bits.at(c, j));
      per_group[g] = detail::group_loss(vals, params, norm);
    }
  });
  double total = 0.0;
  for (double v : per_group) total += v;
  return total;
}

// Evaluates every (group, bit-width) cell independently; cells share no
// state, so any parallel schedule produces bit-identical results.
inline LossTensor compute_loss_tensor(const GaussianModel& model,
                                      const GroupPartition& partition, Norm norm,
                                      int q_max, unsigned threads = 1) {
  if (q_max < 1 || q_max > kMaxBits)
    fail(ErrorKind::invalid_input, "q_max must be in [1, 16]");
  if (partition.channels != model.channel_count() ||
      partition.boundaries.back() != model.point_count())
    fail(ErrorKind::invalid_input, "partition does not match the model");

  LossTensor loss;
  loss.channels = partition.channels;
  loss.blocks = partition.blocks;
  loss.q_max = static_cast<std::size_t>(q_max);
  loss.norm = norm;
  loss.omega.assign(loss.channels * loss.blocks * loss.q_max, 0.0);

  const std::size_t n = model.point_count();
  parallel_for(partition.group_count(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t g = begin; g < end; ++g) {
      const std::size_t c = g / partition.blocks;
      const std::size_t j = g % partition.blocks;
      const double* row = model.attributes.data() + c * n;
      const std::span<const double> vals(row + partition.block_begin(j),
                                         partition.block_length(j));
      double lo = vals[0], hi = vals[0];
      for (double v : vals) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      for (int b = 1; b <= q_max; ++b) {
        const auto params = detail::group_params(lo, hi, b);
        loss.omega[g * loss.q_max + static_cast<std::size_t>(b - 1)] =
            detail::group_loss(vals, params, norm);
      }
    }
  });
  return loss;
}

}  // namespace sizegs
