// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "castid/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "castid/error.hpp"

namespace castid {

PooledDescriptor pool_frames(std::span<const std::span<const float>> frames) {
  if (frames.empty()) throw Error(Errc::kEmptyTrack, "track has no frames");
  const std::size_t dim = frames.front().size();
  for (const auto& f : frames) {
    if (f.size() != dim) {
      throw Error(Errc::kDimMismatch, "frame of dim " + std::to_string(f.size()) +
                                          ", expected " + std::to_string(dim));
    }
  }

  std::vector<double> sum(dim, 0.0);
  std::vector<float> column(frames.size());
  for (std::size_t d = 0; d < dim; ++d) {
    for (std::size_t i = 0; i < frames.size(); ++i) column[i] = frames[i][d];
    std::sort(column.begin(), column.end());
    double acc = 0.0;
    for (float v : column) acc += v;
    sum[d] = acc;
  }

  double sq = 0.0;
  for (double v : sum) sq += v * v;
  const double norm = std::sqrt(sq);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(Errc::kZeroVector, "sum-pooled descriptor has zero norm");
  }

  PooledDescriptor out;
  out.raw_norm = norm;
  out.unit.resize(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    out.unit[d] = static_cast<float>(sum[d] / norm);
  }
  return out;
}

std::vector<float> pool_track(const std::vector<std::vector<float>>& frames) {
  std::vector<std::span<const float>> views(frames.begin(), frames.end());
  return pool_frames(views).unit;
}

}  // namespace castid
