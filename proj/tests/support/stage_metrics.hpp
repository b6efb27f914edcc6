// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef CASTID_TESTS_STAGE_METRICS_HPP_
#define CASTID_TESTS_STAGE_METRICS_HPP_

#include <filesystem>

#include "castid/pipeline.hpp"
#include "castid/simgen.hpp"

namespace castid::testing {

// Accuracy over the non-background tracks after each stage, plus the same
// on profile tracks of characters that own at least one speaking track.
struct StageAccuracy {
  double stage1 = 0.0;
  double stage2 = 0.0;
  double final = 0.0;
  double profile_speaking_stage2 = 0.0;
  double profile_speaking_final = 0.0;
  std::size_t n_profile_speaking = 0;
};

StageAccuracy measure_episode(const std::filesystem::path& episode_dir,
                              const PipelineConfig& config = {});

// Generates into `dir` (replacing it) and measures.
StageAccuracy simulate_and_measure(const SimConfig& sim, const std::filesystem::path& dir,
                                   const PipelineConfig& config = {});

}  // namespace castid::testing

#endif  // CASTID_TESTS_STAGE_METRICS_HPP_
