// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef CASTID_EVAL_HPP_
#define CASTID_EVAL_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace castid {

struct ScoredLabel {
  std::string track_id;
  std::string character;
  double confidence = 0.0;
};

struct GroundTruthRow {
  std::string track_id;
  std::string character;
};

struct PrPoint {
  double threshold = 0.0;
  double recall = 0.0;     // fraction of tracks predicted at this threshold
  double precision = 0.0;  // correct / predicted
};

struct CharacterStats {
  std::size_t n_tracks = 0;
  double accuracy = 0.0;
};

struct EvalReport {
  double accuracy = 0.0;
  double average_precision = 0.0;
  std::vector<PrPoint> pr_points;
  std::map<std::string, CharacterStats> per_character;
  std::size_t n_tracks = 0;
  std::size_t n_excluded = 0;  // background tracks left out
};

// All functions below require a prediction for every ground-truth track
// and throw MissingPrediction otherwise.

double accuracy(const std::vector<ScoredLabel>& labels,
                const std::vector<GroundTruthRow>& gt);

// One point per distinct confidence, thresholds descending; ties enter the
// predicted set together.
std::vector<PrPoint> pr_curve(const std::vector<ScoredLabel>& labels,
                              const std::vector<GroundTruthRow>& gt);

// Sum of (r_i - r_{i-1}) * p_i with r_0 = 0. Throws EmptyCurve.
double average_precision(const std::vector<PrPoint>& pr);

std::map<std::string, CharacterStats> per_character_report(
    const std::vector<ScoredLabel>& labels, const std::vector<GroundTruthRow>& gt);

EvalReport evaluate(const std::vector<ScoredLabel>& labels,
                    const std::vector<GroundTruthRow>& gt);

// Reads a labels CSV written by the pipeline. Rows with provenance
// "background" are returned in `background` instead of the labels.
struct LabelsFile {
  std::vector<ScoredLabel> labels;
  std::vector<std::string> background;
};
LabelsFile read_labels_csv(const std::filesystem::path& path);

// Writes report.json and pr.csv into out_dir. Ground-truth rows of tracks
// the labels file marks as background are left out and counted.
EvalReport evaluate_files(const std::filesystem::path& labels_path,
                          const std::filesystem::path& gt_path,
                          const std::filesystem::path& out_dir);

void write_pr_csv(const std::vector<PrPoint>& pr, const std::filesystem::path& path);
void write_report_json(const EvalReport& report, const std::filesystem::path& path);

}  // namespace castid

#endif  // CASTID_EVAL_HPP_
