#pragma once

#include <cmath>
#include <cstdint>

namespace sizegs {

// Banker's rounding, independent of the FPU rounding mode so results are
// reproducible across platforms.
inline double round_half_even(double v) {
  const double fl = std::floor(v);
  const double diff = v - fl;
  if (diff > 0.5) return fl + 1.0;
  if (diff < 0.5) return fl;
  return (std::fmod(fl, 2.0) == 0.0) ? fl : fl + 1.0;
}

inline std::int64_t llround_half_even(double v) {
  return static_cast<std::int64_t>(round_half_even(v));
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace sizegs
