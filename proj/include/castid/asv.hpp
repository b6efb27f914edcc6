// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef CASTID_ASV_HPP_
#define CASTID_ASV_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "castid/ingest.hpp"

namespace castid {

enum class LabelState { kUnlabeled, kPropagated, kPredicted };

struct SpeechSegment {
  std::string segment_id;
  std::string track_id;
  double duration_s = 0.0;
  std::optional<std::vector<float>> descriptor;
  LabelState label_state = LabelState::kUnlabeled;
  std::string label;        // set unless unlabeled
  double confidence = 0.0;  // set when predicted
};

struct GateConfig {
  double fps = 25.0;
  std::uint32_t min_frames = 50;
  double speak_threshold = 0.5;
  int window = 9;
};

// Median over an odd window with replicated borders. Throws EvenWindow.
std::vector<double> median_filter(const std::vector<double>& scores, int window);

std::string segment_id_for(const std::string& track_id);

// Emits one segment per track that is at least min_frames long and whose
// median-filtered ASV scores are all >= speak_threshold. Throws
// MissingAsvScores for a track without scores.
std::vector<SpeechSegment> gate_speaking_tracks(const std::vector<TrackRecord>& tracks,
                                                const GateConfig& config);

// CSV segment_id,track_id,duration_s
void write_segment_manifest(const std::vector<SpeechSegment>& segments,
                            const std::filesystem::path& path);

}  // namespace castid

#endif  // CASTID_ASV_HPP_
