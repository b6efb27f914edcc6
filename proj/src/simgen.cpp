// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "castid/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "castid/csv.hpp"
#include "castid/error.hpp"
#include "castid/ingest.hpp"
#include "castid/rng.hpp"

namespace castid {

namespace fs = std::filesystem;

// --- config -----------------------------------------------------------------

namespace {

std::string trim(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), issp));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), issp).base(), s.end());
  return s;
}

}  // namespace

namespace {
void validate(const SimConfig& c);
}  // namespace

SimConfig parse_sim_config(const std::string& text) {
  SimConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::kParseError, "sim config line " + std::to_string(lineno) +
                                         ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    auto as_int = [&] { return static_cast<int>(csv::to_int(v, key)); };
    auto as_real = [&] { return csv::to_double(v, key); };
    if (key == "n_characters") c.n_characters = as_int();
    else if (key == "n_tracks") c.n_tracks = as_int();
    else if (key == "n_actor_images_mean") c.n_actor_images_mean = as_int();
    else if (key == "n_segments") c.n_segments = as_int();
    else if (key == "dim_face") c.dim_face = as_int();
    else if (key == "dim_voice") c.dim_voice = as_int();
    else if (key == "domain_gap") c.domain_gap = as_real();
    else if (key == "profile_fraction") c.profile_fraction = as_real();
    else if (key == "profile_gap") c.profile_gap = as_real();
    else if (key == "noise_sigma") c.noise_sigma = as_real();
    else if (key == "speaking_fraction") c.speaking_fraction = as_real();
    else if (key == "background_fraction") c.background_fraction = as_real();
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(csv::to_int(v, key));
    else if (key == "profile_context_gap") c.profile_context_gap = as_real();
    else if (key == "appearance_exponent") c.appearance_exponent = as_real();
    else if (key == "mean_track_frames") c.mean_track_frames = as_real();
    else if (key == "background_training_size") c.background_training_size = as_int();
    else throw Error(Errc::kParseError, "unknown sim config key '" + key + "'");
  }
  validate(c);
  return c;
}

SimConfig load_sim_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kMissingFile, path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_sim_config(buf.str());
}

std::string format_sim_config(const SimConfig& c) {
  auto r = [](double v) { return csv::format_double(v); };
  std::ostringstream out;
  out << "n_characters = " << c.n_characters << '\n'
      << "n_tracks = " << c.n_tracks << '\n'
      << "n_actor_images_mean = " << c.n_actor_images_mean << '\n'
      << "n_segments = " << c.n_segments << '\n'
      << "dim_face = " << c.dim_face << '\n'
      << "dim_voice = " << c.dim_voice << '\n'
      << "domain_gap = " << r(c.domain_gap) << '\n'
      << "profile_fraction = " << r(c.profile_fraction) << '\n'
      << "profile_gap = " << r(c.profile_gap) << '\n'
      << "noise_sigma = " << r(c.noise_sigma) << '\n'
      << "speaking_fraction = " << r(c.speaking_fraction) << '\n'
      << "background_fraction = " << r(c.background_fraction) << '\n'
      << "seed = " << c.seed << '\n'
      << "profile_context_gap = " << r(c.profile_context_gap) << '\n'
      << "appearance_exponent = " << r(c.appearance_exponent) << '\n'
      << "mean_track_frames = " << r(c.mean_track_frames) << '\n'
      << "background_training_size = " << c.background_training_size << '\n';
  return out.str();
}

namespace {

void validate(const SimConfig& c) {
  auto fail = [](const std::string& m) { throw Error(Errc::kPreconditionViolation, m); };
  if (c.n_characters < 0 || c.n_tracks < 0 || c.n_segments < 0 ||
      c.n_actor_images_mean < 1) {
    fail("counts must be non-negative (n_actor_images_mean >= 1)");
  }
  if (c.n_characters == 0 && c.n_tracks > 0) fail("tracks need at least one character");
  if (c.dim_face < 2 || c.dim_voice < 2) fail("dims must be >= 2");
  for (double f : {c.profile_fraction, c.speaking_fraction, c.background_fraction}) {
    if (!(f >= 0.0 && f <= 1.0)) fail("fractions must lie in [0, 1]");
  }
  if (!(c.domain_gap >= 0.0) || !(c.noise_sigma >= 0.0)) {
    fail("domain_gap and noise_sigma must be >= 0");
  }
  if (!(c.mean_track_frames > 0.0)) fail("mean_track_frames must be > 0");
}

using Vec = std::vector<double>;

Vec gaussian(Rng& rng, int dim) {
  Vec v(static_cast<std::size_t>(dim));
  for (auto& x : v) x = rng.normal();
  return v;
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Vec normalized(Vec v) {
  const double n = std::sqrt(dot(v, v));
  if (n > 0.0) {
    for (auto& x : v) x /= n;
  }
  return v;
}

Vec unit(Rng& rng, int dim) { return normalized(gaussian(rng, dim)); }

// Orthonormal basis of span(vs) by modified Gram-Schmidt.
std::vector<Vec> orthonormal_basis(const std::vector<Vec>& vs) {
  std::vector<Vec> basis;
  for (Vec v : vs) {
    for (const auto& q : basis) {
      const double d = dot(v, q);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= d * q[i];
    }
    const double n = std::sqrt(dot(v, v));
    if (n > 1e-9) {
      for (auto& x : v) x /= n;
      basis.push_back(std::move(v));
    }
  }
  return basis;
}

// Random unit vector orthogonal to span(basis), when one exists.
Vec unit_outside(Rng& rng, int dim, const std::vector<Vec>& basis) {
  Vec v = gaussian(rng, dim);
  for (const auto& q : basis) {
    const double d = dot(v, q);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= d * q[i];
  }
  if (std::sqrt(dot(v, v)) < 1e-9) return unit(rng, dim);
  return normalized(std::move(v));
}

// normalize(sum_k coef_k * v_k + sigma * eps), eps ~ N(0, I).
std::vector<float> sample(Rng& rng, std::initializer_list<std::pair<double, const Vec*>> parts,
                          double sigma, int dim) {
  Vec x(static_cast<std::size_t>(dim), 0.0);
  for (const auto& [coef, v] : parts) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += coef * (*v)[i];
  }
  for (auto& xi : x) xi += sigma * rng.normal();
  x = normalized(std::move(x));
  return std::vector<float>(x.begin(), x.end());
}

double exponential(Rng& rng, double mean) { return -mean * std::log(1.0 - rng.uniform()); }

double round3(double v) { return std::round(v * 1e3) / 1e3; }
double round6(double v) { return std::round(v * 1e6) / 1e6; }

std::string two_digit(int i) {
  std::ostringstream s;
  s << std::setw(2) << std::setfill('0') << i;
  return s.str();
}

std::string track_name(int t) {
  std::ostringstream s;
  s << 't' << std::setw(5) << std::setfill('0') << t;
  return s.str();
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::kIoError, "cannot open " + p.string());
  return f;
}

struct SimTrack {
  std::string id;
  int character = -1;  // -1 for background
  bool profile = false;
  bool speaking = false;
  bool partial = false;
  std::uint32_t n_frames = 0;
  double face_area = 0.0;
  std::vector<float> internal;
  std::vector<float> context;
  std::vector<double> asv;
};

}  // namespace

GeneratedEpisode generate_episode(const SimConfig& c, const fs::path& out_dir) {
  validate(c);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw Error(Errc::kIoError, "cannot create " + out_dir.string());
  }

  Rng rng(c.seed);
  const int k = c.n_characters;
  const int d = c.dim_face;

  // Identity prototypes.
  std::vector<Vec> face(k), shift(k), context(k), voice(k);
  for (int i = 0; i < k; ++i) face[i] = unit(rng, d);
  for (int i = 0; i < k; ++i) shift[i] = unit(rng, d);
  for (int i = 0; i < k; ++i) context[i] = unit(rng, d);
  for (int i = 0; i < k; ++i) voice[i] = unit(rng, c.dim_voice);
  // Profile directions avoid the prototype spans, so with no domain gap and
  // no noise a profile internal descriptor only rescales prototype scores.
  const auto face_basis = orthonormal_basis(face);
  const auto context_basis = orthonormal_basis(context);
  std::vector<Vec> profile_axis(k), profile_context_axis(k);
  for (int i = 0; i < k; ++i) profile_axis[i] = unit_outside(rng, d, face_basis);
  for (int i = 0; i < k; ++i) profile_context_axis[i] = unit_outside(rng, d, context_basis);

  std::vector<Vec> profile_face(k), profile_context(k);
  for (int i = 0; i < k; ++i) {
    profile_face[i].resize(static_cast<std::size_t>(d));
    profile_context[i].resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      profile_face[i][j] = std::cos(c.profile_gap) * face[i][j] +
                           std::sin(c.profile_gap) * profile_axis[i][j];
      profile_context[i][j] = std::cos(c.profile_context_gap) * context[i][j] +
                              std::sin(c.profile_context_gap) * profile_context_axis[i][j];
    }
  }

  // Actor images.
  EmbeddingSet actors;
  actors.dim = static_cast<std::uint32_t>(d);
  for (int i = 0; i < k; ++i) {
    const double factor = rng.uniform(0.15, 1.85);
    const int count = std::max(1, static_cast<int>(std::lround(c.n_actor_images_mean * factor)));
    for (int n = 0; n < count; ++n) {
      std::ostringstream id;
      id << "actor_" << two_digit(i) << "/img_" << std::setw(4) << std::setfill('0') << n;
      actors.add(id.str(),
                 sample(rng, {{1.0, &face[i]}, {c.domain_gap, &shift[i]}}, c.noise_sigma, d));
    }
  }

  // Character appearance shares.
  std::vector<double> cumulative(k);
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    total += std::pow(i + 1.0, -c.appearance_exponent);
    cumulative[i] = total;
  }

  std::vector<SimTrack> tracks(static_cast<std::size_t>(c.n_tracks));
  for (int t = 0; t < c.n_tracks; ++t) {
    SimTrack& tr = tracks[t];
    tr.id = track_name(t);
    if (rng.uniform() < c.background_fraction) {
      Vec a = unit(rng, d), b = unit(rng, d);
      tr.internal = sample(rng, {{1.0, &a}}, c.noise_sigma, d);
      tr.context = sample(rng, {{1.0, &b}}, c.noise_sigma, d);
      tr.n_frames = 10 + static_cast<std::uint32_t>(exponential(rng, 30.0));
      tr.face_area = rng.uniform(0.003, 0.03);
      continue;
    }
    const double u = rng.uniform() * total;
    tr.character = static_cast<int>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    tr.character = std::min(tr.character, k - 1);
    tr.profile = rng.uniform() < c.profile_fraction;
    tr.n_frames = 10 + static_cast<std::uint32_t>(exponential(rng, c.mean_track_frames));
    tr.face_area = rng.uniform(0.04, 0.25);
    const int i = tr.character;
    tr.internal = sample(rng, {{1.0, tr.profile ? &profile_face[i] : &face[i]}},
                         c.noise_sigma, d);
    tr.context = sample(rng, {{1.0, tr.profile ? &profile_context[i] : &context[i]}},
                        c.noise_sigma, d);
  }

  // Speakers: n_segments long principal tracks speak throughout; a share of
  // the other long tracks speak for part of the track only.
  constexpr std::uint32_t kLongTrack = 50;
  std::vector<std::size_t> long_tracks;
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    if (tracks[t].character >= 0 && tracks[t].n_frames >= kLongTrack) long_tracks.push_back(t);
  }
  rng.shuffle(long_tracks);
  const std::size_t n_speaking =
      std::min(long_tracks.size(), static_cast<std::size_t>(c.n_segments));
  for (std::size_t n = 0; n < long_tracks.size(); ++n) {
    auto& tr = tracks[long_tracks[n]];
    if (n < n_speaking) {
      tr.speaking = true;
    } else {
      tr.partial = rng.uniform() < c.speaking_fraction;
    }
  }

  EmbeddingSet voices;
  voices.dim = static_cast<std::uint32_t>(c.dim_voice);
  for (auto& tr : tracks) {
    const std::uint32_t half = tr.n_frames / 2;
    tr.asv.resize(tr.n_frames);
    for (std::uint32_t f = 0; f < tr.n_frames; ++f) {
      const bool high = tr.speaking || (tr.partial && f < half);
      const double mean = high ? 0.85 : 0.15;
      tr.asv[f] = round3(std::clamp(mean + 0.08 * rng.normal(), 0.0, 1.0));
    }
    if (tr.speaking) {
      voices.add("seg_" + tr.id,
                 sample(rng, {{1.0, &voice[tr.character]}}, c.noise_sigma, c.dim_voice));
    }
  }

  // Held-out labelled statistics for the background classifier.
  std::vector<std::array<double, 5>> bg_training;
  if (c.background_fraction > 0.0) {
    for (int n = 0; n < c.background_training_size; ++n) {
      const bool bg = n % 2 == 0;
      const double frames = 10 + std::floor(exponential(rng, bg ? 30.0 : c.mean_track_frames));
      const double area = bg ? rng.uniform(0.003, 0.03) : rng.uniform(0.04, 0.25);
      double asv = 0.0;
      for (int f = 0; f < static_cast<int>(frames); ++f) {
        asv += round3(std::clamp(0.15 + 0.08 * rng.normal(), 0.0, 1.0));
      }
      bg_training.push_back({frames, area, 1.0, asv / frames, bg ? 1.0 : 0.0});
    }
  }

  // --- write ---
  GeneratedEpisode ep;
  ep.dir = out_dir;
  DatasetManifest m;
  for (int i = 0; i < k; ++i) {
    m.cast.push_back({"char_" + two_digit(i), "actor_" + two_digit(i)});
  }
  m.embedding_dim_face = static_cast<std::uint32_t>(d);
  m.embedding_dim_voice = static_cast<std::uint32_t>(c.dim_voice);
  m.fps = 25.0;
  m.actor_embeddings_path = out_dir / "actors.cmeb";
  m.track_internal_path = out_dir / "tracks_internal.cmeb";
  m.track_context_path = out_dir / "tracks_context.cmeb";
  m.voice_embeddings_path = out_dir / "voice.cmeb";
  m.asv_scores_path = out_dir / "asv_scores.csv";
  m.ground_truth_path = out_dir / "ground_truth.csv";
  m.track_meta_path = out_dir / "track_meta.csv";
  if (!bg_training.empty()) m.background_training_path = out_dir / "background_training.csv";

  write_embeddings(actors, m.actor_embeddings_path);
  EmbeddingSet internal, ctx;
  internal.dim = ctx.dim = static_cast<std::uint32_t>(d);
  for (const auto& tr : tracks) {
    internal.add(tr.id, tr.internal);
    ctx.add(tr.id, tr.context);
  }
  write_embeddings(internal, m.track_internal_path);
  write_embeddings(ctx, m.track_context_path);
  write_embeddings(voices, *m.voice_embeddings_path);

  {
    auto f = open_out(*m.track_meta_path);
    csv::write_row(f, {"track_id", "n_frames", "face_area"});
    for (const auto& tr : tracks) {
      csv::write_row(f, {tr.id, std::to_string(tr.n_frames),
                         csv::format_double(round6(tr.face_area))});
    }
  }
  {
    auto f = open_out(*m.asv_scores_path);
    csv::write_row(f, {"track_id", "frame_idx", "score"});
    for (const auto& tr : tracks) {
      for (std::size_t n = 0; n < tr.asv.size(); ++n) {
        csv::write_row(f, {tr.id, std::to_string(n), csv::format_double(tr.asv[n])});
      }
    }
  }
  {
    auto f = open_out(*m.ground_truth_path);
    csv::write_row(f, {"track_id", "character"});
    for (const auto& tr : tracks) {
      csv::write_row(f, {tr.id, tr.character < 0 ? "background" : m.cast[tr.character].character});
    }
  }
  {
    auto f = open_out(out_dir / "track_kinds.csv");
    csv::write_row(f, {"track_id", "pose", "speaking", "background"});
    for (const auto& tr : tracks) {
      csv::write_row(f, {tr.id, tr.profile ? "profile" : "frontal", tr.speaking ? "1" : "0",
                         tr.character < 0 ? "1" : "0"});
    }
  }
  if (m.background_training_path) {
    auto f = open_out(*m.background_training_path);
    csv::write_row(f, {"n_frames", "face_area", "raw_norm", "mean_asv", "is_background"});
    for (const auto& r : bg_training) {
      csv::write_row(f, {csv::format_double(r[0]), csv::format_double(round6(r[1])),
                         csv::format_double(r[2]), csv::format_double(r[3]),
                         r[4] > 0.5 ? "1" : "0"});
    }
  }
  {
    auto f = open_out(out_dir / "sim_meta.txt");
    f << "# castid synthetic episode\n"
      << format_sim_config(c)
      << "generator = " << Rng::kDescription << '\n'
      << "noise = eps ~ N(0, I) per coordinate, scaled by noise_sigma\n"
      << "draw_order = face, shift, context, voice prototypes; profile axes; "
         "profile context axes; actor images; tracks; speaker shuffle; ASV and "
         "voice descriptors; background training rows\n";
  }
  ep.manifest_path = out_dir / "manifest.json";
  write_manifest(m, ep.manifest_path);

  for (const auto& entry : fs::directory_iterator(out_dir)) {
    if (entry.is_regular_file()) ep.files.push_back(entry.path());
  }
  std::sort(ep.files.begin(), ep.files.end());
  return ep;
}

// --- summary ----------------------------------------------------------------

std::vector<std::pair<std::string, std::string>> SimSummary::rows() const {
  if (characters == 0) return {};
  std::ostringstream avg;
  avg << std::fixed << std::setprecision(1) << actor_images_avg;
  return {
      {"# Actor images", std::to_string(actor_images_max) + " / " + avg.str() + " / " +
                             std::to_string(actor_images_min)},
      {"# Face tracks", std::to_string(tracks)},
      {"# Speech segments", std::to_string(segments)},
      {"# Characters", std::to_string(characters)},
  };
}

SimSummary summarize(const fs::path& episode_dir) {
  const DatasetManifest m = load_manifest(episode_dir / "manifest.json");
  SimSummary s;
  s.characters = m.cast.size();
  const EmbeddingSet actors = read_embeddings(m.actor_embeddings_path);
  std::map<std::string, std::size_t> per_actor;
  for (const auto& c : m.cast) per_actor[c.actor] = 0;
  for (const auto& id : actors.ids) {
    auto slash = id.rfind('/');
    auto it = per_actor.find(slash == std::string::npos ? id : id.substr(0, slash));
    if (it != per_actor.end()) ++it->second;
  }
  if (!per_actor.empty()) {
    std::size_t sum = 0;
    s.actor_images_min = SIZE_MAX;
    for (const auto& [actor, n] : per_actor) {
      s.actor_images_max = std::max(s.actor_images_max, n);
      s.actor_images_min = std::min(s.actor_images_min, n);
      sum += n;
    }
    s.actor_images_avg = static_cast<double>(sum) / static_cast<double>(per_actor.size());
  }
  s.tracks = read_embeddings_header(m.track_internal_path).count;
  if (m.voice_embeddings_path) s.segments = read_embeddings_header(*m.voice_embeddings_path).count;
  return s;
}

std::string format_summary(const SimSummary& summary) {
  std::ostringstream out;
  for (const auto& [label, value] : summary.rows()) {
    out << std::left << std::setw(20) << label << value << '\n';
  }
  return out.str();
}

std::vector<TrackKind> load_track_kinds(const fs::path& episode_dir) {
  auto rows = csv::read_file(episode_dir / "track_kinds.csv",
                             {"track_id", "pose", "speaking", "background"});
  std::vector<TrackKind> out;
  for (const auto& r : rows) {
    out.push_back({r[0], r[1] == "profile", r[2] == "1", r[3] == "1"});
  }
  return out;
}

}  // namespace castid
