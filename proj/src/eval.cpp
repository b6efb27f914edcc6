// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "castid/eval.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "castid/csv.hpp"
#include "castid/error.hpp"
#include "castid/ingest.hpp"

namespace castid {

namespace {

struct Joined {
  double confidence;
  bool correct;
};

std::vector<Joined> join(const std::vector<ScoredLabel>& labels,
                         const std::vector<GroundTruthRow>& gt) {
  std::unordered_map<std::string, const ScoredLabel*> by_id;
  for (const auto& l : labels) by_id.emplace(l.track_id, &l);
  std::vector<Joined> out;
  out.reserve(gt.size());
  for (const auto& g : gt) {
    auto it = by_id.find(g.track_id);
    if (it == by_id.end()) {
      throw Error(Errc::kMissingPrediction, "track '" + g.track_id + "'");
    }
    out.push_back({it->second->confidence, it->second->character == g.character});
  }
  return out;
}

}  // namespace

double accuracy(const std::vector<ScoredLabel>& labels,
                const std::vector<GroundTruthRow>& gt) {
  const auto joined = join(labels, gt);
  if (joined.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& j : joined) correct += j.correct;
  return static_cast<double>(correct) / static_cast<double>(joined.size());
}

std::vector<PrPoint> pr_curve(const std::vector<ScoredLabel>& labels,
                              const std::vector<GroundTruthRow>& gt) {
  auto joined = join(labels, gt);
  std::sort(joined.begin(), joined.end(),
            [](const Joined& a, const Joined& b) { return a.confidence > b.confidence; });
  const double n = static_cast<double>(joined.size());
  std::vector<PrPoint> points;
  std::size_t predicted = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < joined.size();) {
    const double t = joined[i].confidence;
    while (i < joined.size() && joined[i].confidence == t) {
      ++predicted;
      correct += joined[i].correct;
      ++i;
    }
    points.push_back({t, static_cast<double>(predicted) / n,
                      static_cast<double>(correct) / static_cast<double>(predicted)});
  }
  return points;
}

double average_precision(const std::vector<PrPoint>& pr) {
  if (pr.empty()) throw Error(Errc::kEmptyCurve, "no PR points");
  double ap = 0.0;
  double prev = 0.0;
  for (const auto& p : pr) {
    ap += (p.recall - prev) * p.precision;
    prev = p.recall;
  }
  return ap;
}

std::map<std::string, CharacterStats> per_character_report(
    const std::vector<ScoredLabel>& labels, const std::vector<GroundTruthRow>& gt) {
  const auto joined = join(labels, gt);
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    auto& c = counts[gt[i].character];
    ++c.first;
    c.second += joined[i].correct;
  }
  std::map<std::string, CharacterStats> out;
  for (const auto& [name, c] : counts) {
    out[name] = {c.first, static_cast<double>(c.second) / static_cast<double>(c.first)};
  }
  return out;
}

EvalReport evaluate(const std::vector<ScoredLabel>& labels,
                    const std::vector<GroundTruthRow>& gt) {
  EvalReport r;
  r.n_tracks = gt.size();
  r.accuracy = accuracy(labels, gt);
  r.pr_points = pr_curve(labels, gt);
  r.average_precision = average_precision(r.pr_points);
  r.per_character = per_character_report(labels, gt);
  return r;
}

LabelsFile read_labels_csv(const std::filesystem::path& path) {
  auto rows = csv::read_file(
      path, {"track_id", "character", "confidence", "provenance", "confident"});
  LabelsFile out;
  for (auto& r : rows) {
    if (r[3] == "background") {
      out.background.push_back(std::move(r[0]));
      continue;
    }
    out.labels.push_back({std::move(r[0]), std::move(r[1]),
                          csv::to_double(r[2], "labels.confidence")});
  }
  return out;
}

EvalReport evaluate_files(const std::filesystem::path& labels_path,
                          const std::filesystem::path& gt_path,
                          const std::filesystem::path& out_dir) {
  const LabelsFile lf = read_labels_csv(labels_path);
  const std::set<std::string> excluded(lf.background.begin(), lf.background.end());
  std::vector<GroundTruthRow> gt;
  std::size_t n_excluded = 0;
  for (auto& [id, character] : load_ground_truth(gt_path)) {
    if (excluded.count(id)) {
      ++n_excluded;
      continue;
    }
    gt.push_back({id, character});
  }
  EvalReport report = evaluate(lf.labels, gt);
  report.n_excluded = n_excluded;
  std::filesystem::create_directories(out_dir);
  write_report_json(report, out_dir / "report.json");
  write_pr_csv(report.pr_points, out_dir / "pr.csv");
  return report;
}

void write_pr_csv(const std::vector<PrPoint>& pr, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(Errc::kIoError, "cannot open " + path.string());
  csv::write_row(f, {"threshold", "recall", "precision"});
  for (const auto& p : pr) {
    csv::write_row(f, {csv::format_double(p.threshold), csv::format_double(p.recall),
                       csv::format_double(p.precision)});
  }
  if (!f) throw Error(Errc::kIoError, "write failed for " + path.string());
}

void write_report_json(const EvalReport& report, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["accuracy"] = report.accuracy;
  j["average_precision"] = report.average_precision;
  j["n_tracks"] = report.n_tracks;
  j["n_excluded"] = report.n_excluded;
  j["pr_points"] = nlohmann::ordered_json::array();
  for (const auto& p : report.pr_points) {
    j["pr_points"].push_back({{"recall", p.recall}, {"precision", p.precision}});
  }
  j["per_character"] = nlohmann::ordered_json::object();
  for (const auto& [name, s] : report.per_character) {
    j["per_character"][name] = {{"n_tracks", s.n_tracks}, {"accuracy", s.accuracy}};
  }
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(Errc::kIoError, "cannot open " + path.string());
  f << j.dump(2) << '\n';
  if (!f) throw Error(Errc::kIoError, "write failed for " + path.string());
}

}  // namespace castid
