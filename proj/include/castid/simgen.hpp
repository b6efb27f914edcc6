// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef CASTID_SIMGEN_HPP_
#define CASTID_SIMGEN_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace castid {

// Synthetic episode: per character a face prototype, a context prototype and
// a voice prototype on unit spheres. Actor images are displaced from the face
// prototype by a fixed per-identity shift (the web/video domain gap); profile
// tracks rotate the internal descriptor away from the prototype while their
// context keeps part of the character's context prototype.
struct SimConfig {
  int n_characters = 15;
  int n_tracks = 1700;
  int n_actor_images_mean = 85;
  int n_segments = 350;
  int dim_face = 64;
  int dim_voice = 32;
  double domain_gap = 0.8;
  double profile_fraction = 0.3;
  double profile_gap = 1.2;  // radians between frontal and profile internal
  double noise_sigma = 0.15;
  // Fraction of the remaining long, non-speaking tracks whose ASV scores are
  // high for only part of the track (rejected by the entire-track gate).
  double speaking_fraction = 0.25;
  double background_fraction = 0.0;
  std::uint64_t seed = 1;

  // Shape parameters, recorded in sim_meta.
  double profile_context_gap = 1.1;  // radians, profile context vs c_i
  double appearance_exponent = 0.8;  // track share of character i ~ (i+1)^-e
  double mean_track_frames = 120.0;
  int background_training_size = 400;
};

SimConfig parse_sim_config(const std::string& text);
SimConfig load_sim_config(const std::filesystem::path& path);
std::string format_sim_config(const SimConfig& config);

struct GeneratedEpisode {
  std::filesystem::path dir;
  std::filesystem::path manifest_path;
  std::vector<std::filesystem::path> files;  // every file written, sorted
};

// Writes manifest.json, actors.cmeb, tracks_internal.cmeb,
// tracks_context.cmeb, track_meta.csv, asv_scores.csv, voice.cmeb,
// ground_truth.csv, track_kinds.csv, sim_meta.txt and, with background
// tracks, background_training.csv. Same config, same bytes.
GeneratedEpisode generate_episode(const SimConfig& config,
                                  const std::filesystem::path& out_dir);

struct SimSummary {
  std::size_t actor_images_max = 0;
  double actor_images_avg = 0.0;
  std::size_t actor_images_min = 0;
  std::size_t tracks = 0;
  std::size_t segments = 0;
  std::size_t characters = 0;

  // (label, value) rows in the order of the statistics table; empty for an
  // episode without characters.
  std::vector<std::pair<std::string, std::string>> rows() const;
};

SimSummary summarize(const std::filesystem::path& episode_dir);
std::string format_summary(const SimSummary& summary);

// Per-track simulator annotations read back from track_kinds.csv.
struct TrackKind {
  std::string track_id;
  bool profile = false;
  bool speaking = false;
  bool background = false;
};
std::vector<TrackKind> load_track_kinds(const std::filesystem::path& episode_dir);

}  // namespace castid

#endif  // CASTID_SIMGEN_HPP_
