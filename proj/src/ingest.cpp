// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "castid/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "castid/csv.hpp"
#include "castid/descriptors.hpp"
#include "castid/error.hpp"

namespace castid {

namespace {

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  put_u32(out, bits);
}

class ByteReader {
 public:
  ByteReader(const std::string& buf, const fs::path& path)
      : buf_(buf), path_(path) {}

  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) {
      throw Error(Errc::kTruncatedFile,
                  path_.string() + ": needed " + std::to_string(n) +
                      " bytes at offset " + std::to_string(pos_));
    }
  }
  std::uint16_t u16() {
    need(2);
    auto b = reinterpret_cast<const unsigned char*>(buf_.data() + pos_);
    pos_ += 2;
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }
  std::uint32_t u32() {
    need(4);
    auto b = reinterpret_cast<const unsigned char*>(buf_.data() + pos_);
    pos_ += 4;
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
  }
  float f32() {
    std::uint32_t bits = u32();
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return buf_.size() - pos_; }

 private:
  const std::string& buf_;
  const fs::path& path_;
  std::size_t pos_ = 0;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kMissingFile, path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

bool bad_name(const std::string& s) {
  return s.empty() || s.find_first_of("\t\n\r") != std::string::npos;
}

}  // namespace

const CastEntry* DatasetManifest::find_actor(const std::string& actor) const {
  for (const auto& c : cast) {
    if (c.actor == actor) return &c;
  }
  return nullptr;
}

bool DatasetManifest::has_character(const std::string& character) const {
  return std::any_of(cast.begin(), cast.end(),
                     [&](const CastEntry& c) { return c.character == character; });
}

void EmbeddingSet::add(std::string id, std::span<const float> v) {
  if (v.size() != dim) {
    throw Error(Errc::kDimMismatch, "vector for '" + id + "' has dim " +
                                        std::to_string(v.size()) + ", set has " +
                                        std::to_string(dim));
  }
  ids.push_back(std::move(id));
  values.insert(values.end(), v.begin(), v.end());
}

bool EmbeddingSet::bit_equal(const EmbeddingSet& other) const {
  return dim == other.dim && ids == other.ids &&
         values.size() == other.values.size() &&
         (values.empty() || std::memcmp(values.data(), other.values.data(),
                                        values.size() * sizeof(float)) == 0);
}

void validate_embeddings(const EmbeddingSet& set) {
  if (set.values.size() != set.ids.size() * set.dim) {
    throw Error(Errc::kPreconditionViolation,
                "matrix holds " + std::to_string(set.values.size()) +
                    " values for " + std::to_string(set.ids.size()) +
                    " ids of dim " + std::to_string(set.dim));
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : set.ids) {
    if (id.size() > 0xffff) {
      throw Error(Errc::kPreconditionViolation, "id longer than 65535 bytes");
    }
    if (!seen.insert(id).second) {
      throw Error(Errc::kPreconditionViolation, "duplicate id '" + id + "'");
    }
  }
  for (std::size_t i = 0; i < set.values.size(); ++i) {
    if (!std::isfinite(set.values[i])) {
      throw Error(Errc::kNonFiniteValue,
                  "id '" + set.ids[i / set.dim] + "' component " +
                      std::to_string(i % set.dim));
    }
  }
}

CmebHeader read_embeddings_header(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kMissingFile, path.string());
  std::string head(kCmebHeaderBytes, '\0');
  in.read(head.data(), kCmebHeaderBytes);
  head.resize(static_cast<std::size_t>(in.gcount()));
  ByteReader r(head, path);
  std::string magic = r.bytes(4);
  if (std::memcmp(magic.data(), kCmebMagic, 4) != 0) {
    throw Error(Errc::kBadMagic, path.string());
  }
  CmebHeader h;
  h.version = r.u32();
  if (h.version != kCmebVersion) {
    throw Error(Errc::kUnsupportedVersion,
                path.string() + ": version " + std::to_string(h.version));
  }
  h.dim = r.u32();
  h.count = r.u32();
  return h;
}

EmbeddingSet read_embeddings(const fs::path& path) {
  const std::string buf = slurp(path);
  ByteReader r(buf, path);
  std::string magic = r.bytes(4);
  if (std::memcmp(magic.data(), kCmebMagic, 4) != 0) {
    throw Error(Errc::kBadMagic, path.string());
  }
  std::uint32_t version = r.u32();
  if (version != kCmebVersion) {
    throw Error(Errc::kUnsupportedVersion,
                path.string() + ": version " + std::to_string(version));
  }
  EmbeddingSet set;
  set.dim = r.u32();
  const std::uint32_t count = r.u32();
  // Each record is at least 2 + 4*dim bytes; refuse absurd counts before
  // reserving memory for them.
  const std::size_t min_record = 2 + 4 * static_cast<std::size_t>(set.dim);
  if (static_cast<std::size_t>(count) * min_record > r.remaining()) {
    throw Error(Errc::kTruncatedFile,
                path.string() + ": " + std::to_string(count) +
                    " records do not fit in " + std::to_string(r.remaining()) +
                    " bytes");
  }
  set.ids.reserve(count);
  set.values.reserve(static_cast<std::size_t>(count) * set.dim);
  std::unordered_set<std::string> seen;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint16_t len = r.u16();
    std::string id = r.bytes(len);
    if (!seen.insert(id).second) {
      throw Error(Errc::kParseError, path.string() + ": duplicate id '" + id + "'");
    }
    for (std::uint32_t d = 0; d < set.dim; ++d) {
      float v = r.f32();
      if (!std::isfinite(v)) {
        throw Error(Errc::kNonFiniteValue, path.string() + ": id '" + id +
                                               "' component " + std::to_string(d));
      }
      set.values.push_back(v);
    }
    set.ids.push_back(std::move(id));
  }
  if (r.remaining() != 0) {
    throw Error(Errc::kParseError, path.string() + ": " +
                                       std::to_string(r.remaining()) +
                                       " trailing bytes");
  }
  return set;
}

void write_embeddings(const EmbeddingSet& set, const fs::path& path) {
  validate_embeddings(set);
  std::string out;
  out.reserve(kCmebHeaderBytes + set.values.size() * 4 + set.ids.size() * 16);
  out.append(kCmebMagic, 4);
  put_u32(out, kCmebVersion);
  put_u32(out, set.dim);
  put_u32(out, static_cast<std::uint32_t>(set.ids.size()));
  for (std::size_t i = 0; i < set.ids.size(); ++i) {
    put_u16(out, static_cast<std::uint16_t>(set.ids[i].size()));
    out += set.ids[i];
    for (float v : set.row(i)) put_f32(out, v);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::kIoError, "cannot open " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error(Errc::kIoError, "write failed for " + path.string());
}

// --- manifest ---------------------------------------------------------------

DatasetManifest load_manifest(const fs::path& path) {
  const std::string text = slurp(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kParseError, path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw Error(Errc::kParseError, "manifest is not an object");

  const fs::path base = path.parent_path();
  DatasetManifest m;

  auto field = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) {
      throw Error(Errc::kParseError, std::string("missing field '") + key + "'");
    }
    return j.at(key);
  };
  auto str_field = [&](const char* key) {
    const auto& v = field(key);
    if (!v.is_string()) {
      throw Error(Errc::kParseError, std::string("field '") + key + "' must be a string");
    }
    return v.get<std::string>();
  };
  auto file_field = [&](const char* key) {
    fs::path p = base / str_field(key);
    if (!fs::is_regular_file(p)) {
      throw Error(Errc::kMissingFile, std::string(key) + ": " + p.string());
    }
    return p;
  };
  auto opt_file_field = [&](const char* key) -> std::optional<fs::path> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return file_field(key);
  };
  auto dim_field = [&](const char* key, std::uint32_t fallback) -> std::uint32_t {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() <= 0 ||
        v.get<long long>() > 0xffffffffLL) {
      throw Error(Errc::kParseError, std::string("field '") + key +
                                         "' must be a positive integer");
    }
    return static_cast<std::uint32_t>(v.get<long long>());
  };

  const auto& cast = field("cast");
  if (!cast.is_array()) throw Error(Errc::kParseError, "field 'cast' must be an array");
  std::set<std::string> characters;
  for (const auto& entry : cast) {
    if (!entry.is_object() || !entry.contains("character") ||
        !entry.contains("actor") || !entry["character"].is_string() ||
        !entry["actor"].is_string()) {
      throw Error(Errc::kParseError,
                  "cast entries need string 'character' and 'actor'");
    }
    CastEntry c{entry["character"].get<std::string>(),
                entry["actor"].get<std::string>()};
    if (bad_name(c.character) || bad_name(c.actor)) {
      throw Error(Errc::kParseError, "cast: empty name or name with tab/newline");
    }
    if (!characters.insert(c.character).second) {
      throw Error(Errc::kDuplicateCharacter, "cast.character '" + c.character + "'");
    }
    m.cast.push_back(std::move(c));
  }

  m.embedding_dim_face = dim_field("embedding_dim_face", 0);
  if (m.embedding_dim_face == 0) {
    throw Error(Errc::kParseError, "missing field 'embedding_dim_face'");
  }
  m.embedding_dim_voice = dim_field("embedding_dim_voice", 1024);
  if (j.contains("fps")) {
    if (!j["fps"].is_number() || !(j["fps"].get<double>() > 0.0)) {
      throw Error(Errc::kParseError, "field 'fps' must be a positive number");
    }
    m.fps = j["fps"].get<double>();
  }

  m.actor_embeddings_path = file_field("actor_embeddings_path");
  m.track_internal_path = file_field("track_internal_path");
  m.track_context_path = file_field("track_context_path");
  m.voice_embeddings_path = opt_file_field("voice_embeddings_path");
  m.asv_scores_path = opt_file_field("asv_scores_path");
  m.ground_truth_path = opt_file_field("ground_truth_path");
  m.track_meta_path = opt_file_field("track_meta_path");
  m.background_training_path = opt_file_field("background_training_path");

  auto check_dim = [](const char* key, const fs::path& p, std::uint32_t want) {
    CmebHeader h = read_embeddings_header(p);
    if (h.dim != want) {
      throw Error(Errc::kDimMismatch, std::string(key) + ": file header dim " +
                                          std::to_string(h.dim) +
                                          ", manifest says " + std::to_string(want));
    }
  };
  check_dim("actor_embeddings_path", m.actor_embeddings_path, m.embedding_dim_face);
  check_dim("track_internal_path", m.track_internal_path, m.embedding_dim_face);
  check_dim("track_context_path", m.track_context_path, m.embedding_dim_face);
  if (m.voice_embeddings_path) {
    check_dim("voice_embeddings_path", *m.voice_embeddings_path,
              m.embedding_dim_voice);
  }
  return m;
}

void write_manifest(const DatasetManifest& m, const fs::path& path) {
  const fs::path base = path.parent_path();
  auto rel = [&](const fs::path& p) {
    return p.lexically_relative(base).generic_string();
  };
  nlohmann::ordered_json j;
  j["cast"] = nlohmann::ordered_json::array();
  for (const auto& c : m.cast) {
    j["cast"].push_back({{"character", c.character}, {"actor", c.actor}});
  }
  j["actor_embeddings_path"] = rel(m.actor_embeddings_path);
  j["track_internal_path"] = rel(m.track_internal_path);
  j["track_context_path"] = rel(m.track_context_path);
  if (m.voice_embeddings_path) j["voice_embeddings_path"] = rel(*m.voice_embeddings_path);
  if (m.asv_scores_path) j["asv_scores_path"] = rel(*m.asv_scores_path);
  if (m.ground_truth_path) j["ground_truth_path"] = rel(*m.ground_truth_path);
  if (m.track_meta_path) j["track_meta_path"] = rel(*m.track_meta_path);
  if (m.background_training_path) {
    j["background_training_path"] = rel(*m.background_training_path);
  }
  j["embedding_dim_face"] = m.embedding_dim_face;
  j["embedding_dim_voice"] = m.embedding_dim_voice;
  j["fps"] = m.fps;
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(Errc::kIoError, "cannot open " + path.string());
  f << j.dump(2) << '\n';
  if (!f) throw Error(Errc::kIoError, "write failed for " + path.string());
}

// --- tracks -----------------------------------------------------------------

namespace {

struct Grouped {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<std::span<const float>>> frames;
};

Grouped group_frames(const EmbeddingSet& set) {
  Grouped g;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const std::string& id = set.ids[i];
    auto at = id.rfind('@');
    std::string track = at == std::string::npos ? id : id.substr(0, at);
    auto [it, fresh] = g.frames.try_emplace(track);
    if (fresh) g.order.push_back(track);
    it->second.push_back(set.row(i));
  }
  return g;
}

}  // namespace

std::vector<TrackRecord> load_tracks(const DatasetManifest& manifest) {
  const EmbeddingSet internal = read_embeddings(manifest.track_internal_path);
  const EmbeddingSet context = read_embeddings(manifest.track_context_path);
  Grouped gi = group_frames(internal);
  Grouped gc = group_frames(context);

  std::vector<TrackRecord> tracks;
  tracks.reserve(gi.order.size());
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& id : gi.order) {
    auto ctx = gc.frames.find(id);
    if (ctx == gc.frames.end()) {
      throw Error(Errc::kUnknownTrackId,
                  "track '" + id + "' has no context descriptor");
    }
    TrackRecord t;
    t.track_id = id;
    const auto& frames = gi.frames.at(id);
    PooledDescriptor pi = pool_frames(frames);
    t.internal_descriptor = std::move(pi.unit);
    t.raw_norm = pi.raw_norm;
    t.context_descriptor = pool_frames(ctx->second).unit;
    t.n_frames = static_cast<std::uint32_t>(frames.size());
    index.emplace(id, tracks.size());
    tracks.push_back(std::move(t));
  }
  for (const auto& id : gc.order) {
    if (!index.count(id)) {
      throw Error(Errc::kUnknownTrackId,
                  "context track '" + id + "' has no internal descriptor");
    }
  }

  if (manifest.track_meta_path) {
    auto rows = csv::read_file(*manifest.track_meta_path,
                               {"track_id", "n_frames", "face_area"});
    for (const auto& r : rows) {
      auto it = index.find(r[0]);
      if (it == index.end()) {
        throw Error(Errc::kUnknownTrackId, "track_meta: '" + r[0] + "'");
      }
      long long n = csv::to_int(r[1], "track_meta.n_frames");
      if (n <= 0 || n > 0xffffffffLL) {
        throw Error(Errc::kParseError, "track_meta.n_frames must be positive");
      }
      tracks[it->second].n_frames = static_cast<std::uint32_t>(n);
      tracks[it->second].face_area = csv::to_double(r[2], "track_meta.face_area");
    }
  }

  if (manifest.asv_scores_path) {
    if (!manifest.track_meta_path) {
      // Without metadata, a track's length is taken from its ASV rows.
      auto rows = csv::read_file(*manifest.asv_scores_path,
                                 {"track_id", "frame_idx", "score"});
      std::unordered_map<std::string, long long> max_idx;
      for (const auto& r : rows) {
        long long f = csv::to_int(r[1], "asv.frame_idx");
        auto& m = max_idx.try_emplace(r[0], -1).first->second;
        m = std::max(m, f);
      }
      for (auto& t : tracks) {
        auto it = max_idx.find(t.track_id);
        if (it != max_idx.end() && it->second + 1 > t.n_frames &&
            it->second < 0xffffffffLL) {
          t.n_frames = static_cast<std::uint32_t>(it->second + 1);
        }
      }
    }
    load_asv_scores(*manifest.asv_scores_path, tracks);
  }

  if (manifest.ground_truth_path) {
    for (auto& [id, character] : load_ground_truth(*manifest.ground_truth_path)) {
      auto it = index.find(id);
      if (it == index.end()) {
        throw Error(Errc::kUnknownTrackId, "ground_truth: '" + id + "'");
      }
      tracks[it->second].gt_character = character;
    }
  }
  return tracks;
}

void load_asv_scores(const fs::path& path, std::vector<TrackRecord>& tracks) {
  auto rows = csv::read_file(path, {"track_id", "frame_idx", "score"});
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < tracks.size(); ++i) index.emplace(tracks[i].track_id, i);

  std::unordered_map<std::size_t, std::vector<std::pair<long long, double>>> per_track;
  for (const auto& r : rows) {
    auto it = index.find(r[0]);
    if (it == index.end()) throw Error(Errc::kUnknownTrackId, "asv: '" + r[0] + "'");
    long long frame = csv::to_int(r[1], "asv.frame_idx");
    double score = csv::to_double(r[2], "asv.score");
    if (!std::isfinite(score)) {
      throw Error(Errc::kNonFiniteValue, "asv score for '" + r[0] + "'");
    }
    const auto& t = tracks[it->second];
    if (frame < 0 || frame >= static_cast<long long>(t.n_frames)) {
      throw Error(Errc::kFrameIndexOutOfRange,
                  "asv: track '" + r[0] + "' frame " + std::to_string(frame) +
                      " outside [0, " + std::to_string(t.n_frames) + ")");
    }
    per_track[it->second].emplace_back(frame, score);
  }

  for (auto& [ti, entries] : per_track) {
    auto& t = tracks[ti];
    std::sort(entries.begin(), entries.end());
    for (std::size_t k = 0; k < entries.size(); ++k) {
      if (entries[k].first != static_cast<long long>(k)) {
        throw Error(Errc::kParseError,
                    "asv: track '" + t.track_id + "' has duplicate or missing frame " +
                        std::to_string(k));
      }
    }
    if (entries.size() != t.n_frames) {
      throw Error(Errc::kParseError, "asv: track '" + t.track_id + "' has " +
                                         std::to_string(entries.size()) + " of " +
                                         std::to_string(t.n_frames) + " frames");
    }
    std::vector<double> scores;
    scores.reserve(entries.size());
    for (const auto& e : entries) scores.push_back(e.second);
    t.asv_scores = std::move(scores);
  }
}

std::vector<std::pair<std::string, std::string>> load_ground_truth(
    const fs::path& path) {
  auto rows = csv::read_file(path, {"track_id", "character"});
  std::vector<std::pair<std::string, std::string>> out;
  std::unordered_set<std::string> seen;
  out.reserve(rows.size());
  for (auto& r : rows) {
    if (!seen.insert(r[0]).second) {
      throw Error(Errc::kParseError, "ground truth: duplicate track '" + r[0] + "'");
    }
    out.emplace_back(std::move(r[0]), std::move(r[1]));
  }
  return out;
}

}  // namespace castid
