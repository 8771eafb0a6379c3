#pragma once

#include <cstdint>
#include <vector>

#include "sizegs/error.hpp"
#include "sizegs/quantizer.hpp"

namespace sizegs {

// Byte sizes of the container pieces that do not depend on the bit
// assignment. Measured from real serialized streams, never estimated.
struct ContainerFixedParts {
  std::int64_t header_bytes = 0;
  std::int64_t framing_bytes = 0;    // section length prefixes
  std::int64_t geometry_bytes = 0;
  std::int64_t metadata_bytes = 0;
  std::int64_t attribute_overhead_bytes = 0;  // per-group blob length fields
};

inline std::int64_t measure_fixed_cost(const ContainerFixedParts& parts) {
  const std::int64_t total = parts.header_bytes + parts.framing_bytes +
                             parts.geometry_bytes + parts.metadata_bytes +
                             parts.attribute_overhead_bytes;
  if (total < 0) fail(ErrorKind::invalid_input, "negative fixed cost");
  return total;
}

// Linear size model: estimate(Q) = ceil(sum P_ij * Q_ij / 8) + fixed + delta.
// P holds element counts, so the payload term is exact before entropy coding;
// delta absorbs the entropy-coding gain.
struct SizeEstimate {
  std::size_t channels = 0;
  std::size_t blocks = 0;
  std::vector<std::int64_t> group_elements;  // row-major C x B
  std::int64_t fixed_cost = 0;               // bytes
  std::int64_t delta = 0;                    // bytes, signed
  std::int64_t budget = 0;                   // bytes, the target size

  std::int64_t elements(std::size_t c, std::size_t j) const {
    return group_elements[c * blocks + j];
  }
};

inline SizeEstimate make_size_estimate(const GroupPartition& partition,
                                       std::int64_t fixed_cost, std::int64_t budget) {
  if (budget <= 0) fail(ErrorKind::invalid_budget, "size budget must be positive");
  SizeEstimate est;
  est.channels = partition.channels;
  est.blocks = partition.blocks;
  est.group_elements.resize(partition.group_count());
  for (std::size_t c = 0; c < partition.channels; ++c)
    for (std::size_t j = 0; j < partition.blocks; ++j)
      est.group_elements[c * partition.blocks + j] =
          static_cast<std::int64_t>(partition.block_length(j));
  est.fixed_cost = fixed_cost;
  est.budget = budget;
  return est;
}

inline std::int64_t payload_bits(const SizeEstimate& est, const BitAssignment& bits) {
  if (bits.channels != est.channels || bits.blocks != est.blocks)
    fail(ErrorKind::invalid_input, "bit assignment shape does not match size model");
  std::int64_t total = 0;
  for (std::size_t g = 0; g < est.group_elements.size(); ++g)
    total += est.group_elements[g] * static_cast<std::int64_t>(bits.bits[g]);
  return total;
}

inline std::int64_t estimate_size(const SizeEstimate& est, const BitAssignment& bits) {
  const std::int64_t b = payload_bits(est, bits);
  return (b + 7) / 8 + est.fixed_cost + est.delta;
}

// Raw calibration from the search loop: delta becomes actual minus target.
inline SizeEstimate calibrate(SizeEstimate est, std::int64_t actual_bytes) {
  est.delta = actual_bytes - est.budget;
  return est;
}

// Residual calibration: delta becomes the gap between the measured container
// and the linear estimate of the assignment that produced it, i.e. the
// entropy-coding gain plus packing overhead. Fixed point of the search loop.
inline SizeEstimate calibrate_residual(SizeEstimate est, std::int64_t actual_bytes,
                                       const BitAssignment& bits) {
  const std::int64_t linear = (payload_bits(est, bits) + 7) / 8 + est.fixed_cost;
  est.delta = actual_bytes - linear;
  return est;
}

// Payload budget handed to the solver, in bits.
inline std::int64_t solver_budget_bits(const SizeEstimate& est) {
  return (est.budget - est.fixed_cost - est.delta) * 8;
}

}  // namespace sizegs
