#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sizegs/error.hpp"
#include "sizegs/model.hpp"

namespace sizegs {

// Seeded synthetic scene generator so the whole pipeline can be exercised
// without trained checkpoints. Channel amplitudes vary over orders of
// magnitude and every channel mixes a spatially smooth signal with noise.
struct SynthConfig {
  std::uint64_t seed = 1;
  std::size_t points = 10000;
  std::string profile = "c10";  // "c10" (10 channels) or "c38" (38 channels)
  bool with_importance = false;
};

inline std::vector<ChannelSchema> synth_schema(const std::string& profile) {
  if (profile == "c10")
    return {{"opacity", 1, Activation::sigmoid},
            {"scale", 3, Activation::exp},
            {"rot", 4, Activation::identity},
            {"color", 2, Activation::identity}};
  if (profile == "c38")
    return {{"feat", 32, Activation::identity},
            {"scale", 3, Activation::exp},
            {"opacity", 1, Activation::sigmoid},
            {"color", 2, Activation::identity}};
  fail(ErrorKind::invalid_input, "unknown synth profile '" + profile + "' (c10, c38)");
}

inline GaussianModel make_synthetic_model(const SynthConfig& config) {
  if (config.points < 1) fail(ErrorKind::invalid_input, "synthetic model needs points");
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  GaussianModel model;
  model.schema = synth_schema(config.profile);
  const std::size_t n = config.points;
  const std::size_t channels = model.channel_count();

  // Positions: a handful of Gaussian clusters plus background spray.
  const double extent = 10.0;
  const int clusters = 6;
  std::vector<std::array<double, 3>> centers(clusters);
  std::vector<double> radii(clusters);
  for (int k = 0; k < clusters; ++k) {
    centers[k] = {unit(rng) * extent, unit(rng) * extent, unit(rng) * extent};
    radii[k] = 0.2 + unit(rng) * 1.2;
  }
  model.positions.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (unit(rng) < 0.8) {
      const int k = static_cast<int>(unit(rng) * clusters) % clusters;
      for (int d = 0; d < 3; ++d)
        model.positions[i][d] =
            static_cast<double>(static_cast<float>(centers[k][d] + gauss(rng) * radii[k]));
    } else {
      for (int d = 0; d < 3; ++d)
        model.positions[i][d] = static_cast<double>(static_cast<float>(unit(rng) * extent));
    }
  }

  // Attributes: per channel, amplitude log-uniform over ~400x, smooth wave
  // over space blended with Gaussian noise. Values pass through float so the
  // model is float32-exact like real columnar exports.
  model.attributes.resize(channels * n);
  std::size_t channel = 0;
  for (const auto& group : model.schema) {
    for (std::size_t w = 0; w < group.width; ++w, ++channel) {
      double* row = model.attributes.data() + channel * n;
      if (group.activation == Activation::sigmoid) {
        for (std::size_t i = 0; i < n; ++i)
          row[i] = static_cast<double>(static_cast<float>(0.5 + 1.5 * gauss(rng)));
        continue;
      }
      if (group.activation == Activation::exp) {
        const double base = std::log(0.01 * extent);
        for (std::size_t i = 0; i < n; ++i)
          row[i] = static_cast<double>(static_cast<float>(base + 0.6 * gauss(rng)));
        continue;
      }
      // Two channel families, mirroring real splat attribute columns:
      // dense low-amplitude channels (smooth signal plus Gaussian noise) and
      // high-amplitude concentrated channels whose mass sits near zero with
      // occasional large excursions inside spatially contiguous active
      // regions (so Morton-local blocks land mostly inside or outside a
      // region). The families differ in error-distribution shape, not just
      // scale.
      const bool dense = unit(rng) < 0.35;
      const std::array<double, 3> wave = {0.2 + 2.0 * unit(rng), 0.2 + 2.0 * unit(rng),
                                          0.2 + 2.0 * unit(rng)};
      const double phase = unit(rng) * 6.283185307179586;
      if (dense) {
        const double amplitude = std::exp(std::log(0.05) + unit(rng) * std::log(40.0));
        const double smooth_mix = 0.15 + 0.4 * unit(rng);
        for (std::size_t i = 0; i < n; ++i) {
          const auto& p = model.positions[i];
          const double s =
              std::sin(wave[0] * p[0] + wave[1] * p[1] + wave[2] * p[2] + phase);
          const double v = amplitude * (smooth_mix * s + (1.0 - smooth_mix) * gauss(rng));
          row[i] = static_cast<double>(static_cast<float>(v));
        }
      } else {
        const double amplitude = std::exp(std::log(2.0) + unit(rng) * std::log(20.0));
        const double base_width = 0.005 + 0.03 * unit(rng);
        const bool heavy = unit(rng) < 0.7;
        const double gate_level = 0.0 + 0.9 * unit(rng);  // per-channel duty cycle
        for (std::size_t i = 0; i < n; ++i) {
          const auto& p = model.positions[i];
          const double gate_s =
              std::sin(wave[0] * p[0] + wave[1] * p[1] + wave[2] * p[2] + phase);
          double v = base_width * gauss(rng);
          if (gate_s > gate_level) {
            const double g = gauss(rng);
            v += heavy ? 0.35 * g * g * g : 1.2 * g;
          }
          row[i] = static_cast<double>(static_cast<float>(amplitude * v));
        }
      }
    }
  }

  if (config.with_importance) {
    model.importance.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      model.importance[i] = static_cast<double>(static_cast<float>(std::abs(gauss(rng))));
  }
  model.validate();
  return model;
}

}  // namespace sizegs
