// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "castid/asv.hpp"

#include <algorithm>
#include <fstream>

#include "castid/csv.hpp"
#include "castid/error.hpp"

namespace castid {

std::vector<double> median_filter(const std::vector<double>& scores, int window) {
  if (window < 1 || window % 2 == 0) {
    throw Error(Errc::kEvenWindow, "median window " + std::to_string(window) +
                                       " must be odd and positive");
  }
  const auto n = static_cast<long>(scores.size());
  const long half = window / 2;
  std::vector<double> out(scores.size());
  std::vector<double> buf(static_cast<std::size_t>(window));
  for (long i = 0; i < n; ++i) {
    for (long k = -half; k <= half; ++k) {
      buf[static_cast<std::size_t>(k + half)] = scores[static_cast<std::size_t>(std::clamp(i + k, 0L, n - 1))];
    }
    std::nth_element(buf.begin(), buf.begin() + half, buf.end());
    out[static_cast<std::size_t>(i)] = buf[static_cast<std::size_t>(half)];
  }
  return out;
}

std::string segment_id_for(const std::string& track_id) { return "seg_" + track_id; }

std::vector<SpeechSegment> gate_speaking_tracks(const std::vector<TrackRecord>& tracks,
                                                const GateConfig& config) {
  if (!(config.fps > 0.0)) throw Error(Errc::kPreconditionViolation, "fps must be > 0");
  std::vector<SpeechSegment> segments;
  for (const auto& t : tracks) {
    if (!t.asv_scores) {
      throw Error(Errc::kMissingAsvScores, "track '" + t.track_id + "'");
    }
    if (t.n_frames < config.min_frames) continue;
    const auto filtered = median_filter(*t.asv_scores, config.window);
    const bool speaking =
        !filtered.empty() &&
        std::all_of(filtered.begin(), filtered.end(),
                    [&](double s) { return s >= config.speak_threshold; });
    if (!speaking) continue;
    SpeechSegment seg;
    seg.segment_id = segment_id_for(t.track_id);
    seg.track_id = t.track_id;
    seg.duration_s = t.n_frames / config.fps;
    segments.push_back(std::move(seg));
  }
  return segments;
}

void write_segment_manifest(const std::vector<SpeechSegment>& segments,
                            const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(Errc::kIoError, "cannot open " + path.string());
  csv::write_row(f, {"segment_id", "track_id", "duration_s"});
  for (const auto& s : segments) {
    csv::write_row(f, {s.segment_id, s.track_id, csv::format_double(s.duration_s)});
  }
  if (!f) throw Error(Errc::kIoError, "write failed for " + path.string());
}

}  // namespace castid
