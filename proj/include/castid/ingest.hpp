// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef CASTID_INGEST_HPP_
#define CASTID_INGEST_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace castid {

namespace fs = std::filesystem;

struct CastEntry {
  std::string character;
  std::string actor;
};

/// Everything a run needs, as referenced from the manifest JSON. Relative
/// paths in the manifest are resolved against the manifest's directory.
struct DatasetManifest {
  std::vector<CastEntry> cast;
  fs::path actor_embeddings_path;
  fs::path track_internal_path;
  fs::path track_context_path;
  std::optional<fs::path> voice_embeddings_path;
  std::optional<fs::path> asv_scores_path;
  std::optional<fs::path> ground_truth_path;
  // CSV track_id,n_frames,face_area
  std::optional<fs::path> track_meta_path;
  // CSV n_frames,face_area,raw_norm,mean_asv,is_background
  std::optional<fs::path> background_training_path;
  std::uint32_t embedding_dim_face = 0;
  std::uint32_t embedding_dim_voice = 1024;
  double fps = 25.0;

  const CastEntry* find_actor(const std::string& actor) const;
  bool has_character(const std::string& character) const;
};

/// Row-major id-tagged matrix; the in-memory form of a CMEB file.
struct EmbeddingSet {
  std::uint32_t dim = 0;
  std::vector<std::string> ids;
  std::vector<float> values;  // ids.size() * dim

  std::size_t size() const { return ids.size(); }
  std::span<const float> row(std::size_t i) const {
    return {values.data() + i * dim, dim};
  }
  void add(std::string id, std::span<const float> v);

  // Bitwise comparison (distinguishes -0.0 from 0.0).
  bool bit_equal(const EmbeddingSet& other) const;
};

struct TrackRecord {
  std::string track_id;
  std::uint32_t n_frames = 1;
  std::vector<float> internal_descriptor;
  std::vector<float> context_descriptor;
  std::optional<std::vector<double>> asv_scores;
  std::optional<std::string> gt_character;
  // Track-level statistics for the background classifier.
  double face_area = 0.0;
  double raw_norm = 0.0;
};

inline constexpr char kCmebMagic[4] = {'C', 'M', 'E', 'B'};
inline constexpr std::uint32_t kCmebVersion = 1;
inline constexpr std::size_t kCmebHeaderBytes = 16;

// Checks the set invariants: unique ids, ids that fit a u16 length, finite
// values and a consistent matrix size. Throws PreconditionViolation or
// NonFiniteValue.
void validate_embeddings(const EmbeddingSet& set);

EmbeddingSet read_embeddings(const fs::path& path);
void write_embeddings(const EmbeddingSet& set, const fs::path& path);

struct CmebHeader {
  std::uint32_t version = 0;
  std::uint32_t dim = 0;
  std::uint32_t count = 0;
};
CmebHeader read_embeddings_header(const fs::path& path);

DatasetManifest load_manifest(const fs::path& path);
void write_manifest(const DatasetManifest& manifest, const fs::path& path);

// Builds one TrackRecord per track id in the internal-channel file. Rows
// whose id has the form "<track>@<frame>" are grouped and sum-pooled;
// bare ids are taken as already-pooled descriptors and re-normalized.
// Attaches track metadata, ASV scores and ground truth when the manifest
// references them.
std::vector<TrackRecord> load_tracks(const DatasetManifest& manifest);

void load_asv_scores(const fs::path& path, std::vector<TrackRecord>& tracks);

// track_id -> character, in file order.
std::vector<std::pair<std::string, std::string>> load_ground_truth(
    const fs::path& path);

}  // namespace castid

#endif  // CASTID_INGEST_HPP_
