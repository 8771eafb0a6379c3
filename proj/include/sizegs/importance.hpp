#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "sizegs/error.hpp"
#include "sizegs/model.hpp"

namespace sizegs {

struct ImportanceScore {
  std::vector<double> scores;  // one nonnegative value per point
};

// Opacity-times-volume proxy. Stands in for view-aggregated importance when
// no external score column is supplied; requires "opacity" and "scale"
// channels in the schema.
inline ImportanceScore proxy_importance(const GaussianModel& model) {
  const auto opacity = model.find_channel("opacity");
  const auto scale = model.find_channel("scale");
  if (!opacity || !scale)
    fail(ErrorKind::schema_error,
         "proxy importance needs 'opacity' and 'scale' channels; supply an "
         "'importance' column instead");
  const Activation opacity_act = *model.channel_activation("opacity");
  const Activation scale_act = *model.channel_activation("scale");

  const std::size_t n = model.point_count();
  ImportanceScore out;
  out.scores.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = apply_activation(opacity_act, model.at(opacity->first, i));
    for (std::size_t d = 0; d < scale->second; ++d)
      s *= apply_activation(scale_act, model.at(scale->first + d, i));
    out.scores[i] = std::max(0.0, s);
  }
  return out;
}

// External score column when present, proxy otherwise.
inline ImportanceScore effective_importance(const GaussianModel& model) {
  if (!model.importance.empty()) return ImportanceScore{model.importance};
  return proxy_importance(model);
}

// Keeps the ceil(tau * N) highest-scoring points; ties keep the lower
// original index. Survivors stay in original relative order.
inline GaussianModel prune(const GaussianModel& model, const ImportanceScore& scores,
                           double tau) {
  const std::size_t n = model.point_count();
  if (scores.scores.size() != n)
    fail(ErrorKind::invalid_input, "score length does not match point count");
  if (!(tau >= 0.0 && tau <= 1.0))
    fail(ErrorKind::invalid_input, "tau must be in [0, 1]");

  const std::size_t keep = static_cast<std::size_t>(std::ceil(tau * static_cast<double>(n)));
  if (keep == 0)
    fail(ErrorKind::invalid_budget, "tau would prune every point");
  if (keep >= n) return model;

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return scores.scores[a] > scores.scores[b];
  });
  order.resize(keep);
  std::sort(order.begin(), order.end());

  GaussianModel out;
  out.schema = model.schema;
  out.positions.resize(keep);
  for (std::size_t r = 0; r < keep; ++r) out.positions[r] = model.positions[order[r]];
  const std::size_t channels = model.channel_count();
  out.attributes.resize(channels * keep);
  for (std::size_t c = 0; c < channels; ++c) {
    const double* src = model.channel_row(c);
    double* dst = out.attributes.data() + c * keep;
    for (std::size_t r = 0; r < keep; ++r) dst[r] = src[order[r]];
  }
  if (!model.importance.empty()) {
    out.importance.resize(keep);
    for (std::size_t r = 0; r < keep; ++r) out.importance[r] = model.importance[order[r]];
  }
  return out;
}

}  // namespace sizegs
