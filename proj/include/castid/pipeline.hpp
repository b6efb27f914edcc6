// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef CASTID_PIPELINE_HPP_
#define CASTID_PIPELINE_HPP_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "castid/asv.hpp"
#include "castid/ingest.hpp"
#include "castid/svm.hpp"

namespace castid {

// Ordered: a track's provenance only moves forward through these.
enum class Provenance { kStage1 = 0, kStage2 = 1, kVoice = 2, kStage3 = 3, kBackground = 4 };

std::string_view provenance_name(Provenance p);
Provenance parse_provenance(std::string_view name);

enum class Stage { kNone = 0, kStage1 = 1, kStage2 = 2, kVoice = 3, kStage3 = 4 };

std::string_view stage_name(Stage s);

struct LabelRecord {
  std::string track_id;
  std::string character;
  double confidence = 0.0;
  Provenance provenance = Provenance::kStage1;
  bool confident = false;
};

struct PipelineConfig {
  double face_rank_fraction = 0.5;
  double speech_correct_fraction = 0.8;
  std::uint32_t min_frames = 50;
  double speak_threshold = 0.5;
  int median_window = 9;
  TrainConfig train;
  bool background_enabled = false;
};

// Reads `key = value` lines; keys mirror the field names above, with the
// training options as train.lambda_grid (comma separated), train.epochs,
// train.seed and train.tolerance. '#' starts a comment.
PipelineConfig parse_pipeline_config(const std::string& text);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
std::string format_pipeline_config(const PipelineConfig& config);

struct AuditEvent {
  std::string stage;
  std::string event;
  std::string detail;
};

struct PipelineState {
  std::map<std::string, LabelRecord> labels;  // by track id
  std::map<std::string, SvmModel> models;     // by stage name
  std::vector<SpeechSegment> segments;
  std::set<std::string> background;           // excluded track ids
  PipelineConfig config;
  std::vector<AuditEvent> audit_log;
  Stage completed = Stage::kNone;

  void audit(std::string stage, std::string event, std::string detail);
};

struct BackgroundExample {
  std::array<double, 4> stats{};  // n_frames, face_area, raw_norm, mean_asv
  bool is_background = false;
};

struct PipelineInputs {
  DatasetManifest manifest;
  EmbeddingSet actor_embeddings;
  std::vector<TrackRecord> tracks;
  std::optional<EmbeddingSet> voice_embeddings;
  std::vector<BackgroundExample> background_training;
};

PipelineInputs load_inputs(const DatasetManifest& manifest);

std::array<double, 4> track_statistics(const TrackRecord& track);

// Standardized 4-feature linear SVM; returns one flag per track. Training
// data with a single class flags everything or nothing accordingly.
std::vector<bool> classify_background(const std::vector<TrackRecord>& tracks,
                                      const std::vector<BackgroundExample>& examples,
                                      const TrainConfig& train,
                                      SvmModel* model_out = nullptr);

// Initial state for stage 1: flags background tracks when
// config.background_enabled, otherwise returns an empty state.
PipelineState run_background_exclusion(const PipelineInputs& inputs,
                                       const PipelineConfig& config);

// Actor-image classifier applied to the internal descriptors of every
// non-background track; the top face_rank_fraction become confident.
// `state` may carry background exclusions from a previous step.
PipelineState run_stage1(const PipelineInputs& inputs, const PipelineConfig& config,
                         PipelineState state = {});

// Character classifier on context descriptors of the stage-1 confident
// tracks; re-labels the rest and re-ranks everything.
PipelineState run_stage2(const PipelineInputs& inputs, PipelineState state);

// Speaker classifier trained on segments of confident tracks; overwrites
// the labels of the best-ranked speaking tracks the face stages were not
// confident about.
PipelineState run_voice_stage(const PipelineInputs& inputs, PipelineState state);

// Final character classifier on confident plus voice-corrected tracks;
// re-labels every track except the voice-corrected ones.
PipelineState run_stage3_retrain(const PipelineInputs& inputs, PipelineState state);

// Background (optional), stage 1, stage 2, then voice and stage 3 when the
// manifest has voice embeddings and ASV scores.
PipelineState run_all(const PipelineInputs& inputs, const PipelineConfig& config);

// Outputs: labels.csv, audit.log, segments.csv (when gated), model_<stage>.cmsv.
void write_labels_csv(const PipelineState& state, const std::filesystem::path& path);
void write_audit_log(const PipelineState& state, const std::filesystem::path& path);
void write_outputs(const PipelineState& state, const std::filesystem::path& out_dir);

// Resumable checkpoint (labels, exclusions, segments, audit, stage).
void save_checkpoint(const PipelineState& state, const std::filesystem::path& path);
PipelineState load_checkpoint(const std::filesystem::path& path,
                              const PipelineConfig& config);

}  // namespace castid

#endif  // CASTID_PIPELINE_HPP_
