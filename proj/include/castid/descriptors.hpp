// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef CASTID_DESCRIPTORS_HPP_
#define CASTID_DESCRIPTORS_HPP_

#include <span>
#include <vector>

namespace castid {

struct PooledDescriptor {
  std::vector<float> unit;  // sum / ||sum||
  double raw_norm = 0.0;    // ||sum|| before normalization
};

// Sum-pools per-frame vectors and L2-normalizes the sum.
//
// Each coordinate is summed in double precision over its values sorted in
// ascending order, so the result does not depend on frame order at all
// (bit-identical under permutation). Throws EmptyTrack for no frames,
// DimMismatch for ragged input and ZeroVector when the sum has zero norm.
PooledDescriptor pool_frames(std::span<const std::span<const float>> frames);

inline std::vector<float> pool_track(
    std::span<const std::span<const float>> frames) {
  return pool_frames(frames).unit;
}

std::vector<float> pool_track(const std::vector<std::vector<float>>& frames);

}  // namespace castid

#endif  // CASTID_DESCRIPTORS_HPP_
