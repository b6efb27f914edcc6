// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "castid/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "castid/csv.hpp"
#include "castid/error.hpp"
#include "castid/selection.hpp"

namespace castid {

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kStage1: return "stage1";
    case Provenance::kStage2: return "stage2";
    case Provenance::kVoice: return "voice";
    case Provenance::kStage3: return "stage3";
    case Provenance::kBackground: return "background";
  }
  return "unknown";
}

Provenance parse_provenance(std::string_view name) {
  for (auto p : {Provenance::kStage1, Provenance::kStage2, Provenance::kVoice,
                 Provenance::kStage3, Provenance::kBackground}) {
    if (provenance_name(p) == name) return p;
  }
  throw Error(Errc::kParseError, "unknown provenance '" + std::string(name) + "'");
}

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::kNone: return "none";
    case Stage::kStage1: return "stage1";
    case Stage::kStage2: return "stage2";
    case Stage::kVoice: return "voice";
    case Stage::kStage3: return "stage3";
  }
  return "unknown";
}

void PipelineState::audit(std::string stage, std::string event, std::string detail) {
  audit_log.push_back({std::move(stage), std::move(event), std::move(detail)});
}

// --- config -----------------------------------------------------------------

namespace {

std::string trim(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), issp));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), issp).base(), s.end());
  return s;
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(Errc::kParseError, key + ": expected a boolean, got '" + v + "'");
}

}  // namespace

PipelineConfig parse_pipeline_config(const std::string& text) {
  PipelineConfig c;
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
      throw Error(Errc::kParseError, "config line " + std::to_string(lineno) +
                                         ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "face_rank_fraction") {
      c.face_rank_fraction = csv::to_double(value, key);
    } else if (key == "speech_correct_fraction") {
      c.speech_correct_fraction = csv::to_double(value, key);
    } else if (key == "min_frames") {
      long long v = csv::to_int(value, key);
      if (v < 0) throw Error(Errc::kParseError, key + " must be >= 0");
      c.min_frames = static_cast<std::uint32_t>(v);
    } else if (key == "speak_threshold") {
      c.speak_threshold = csv::to_double(value, key);
    } else if (key == "median_window") {
      c.median_window = static_cast<int>(csv::to_int(value, key));
    } else if (key == "background_enabled") {
      c.background_enabled = parse_bool(value, key);
    } else if (key == "train.lambda_grid") {
      c.train.lambda_grid.clear();
      std::istringstream items(value);
      std::string item;
      while (std::getline(items, item, ',')) {
        c.train.lambda_grid.push_back(csv::to_double(trim(item), key));
      }
    } else if (key == "train.epochs") {
      c.train.epochs = static_cast<int>(csv::to_int(value, key));
    } else if (key == "train.seed") {
      c.train.seed = static_cast<std::uint64_t>(csv::to_int(value, key));
    } else if (key == "train.tolerance") {
      c.train.tolerance = csv::to_double(value, key);
    } else {
      throw Error(Errc::kParseError, "unknown config key '" + key + "'");
    }
  }
  for (double f : {c.face_rank_fraction, c.speech_correct_fraction}) {
    if (!(f > 0.0 && f <= 1.0)) {
      throw Error(Errc::kBadFraction, "config fraction " + std::to_string(f));
    }
  }
  if (c.train.lambda_grid.empty() || c.train.epochs < 1) {
    throw Error(Errc::kParseError, "train.lambda_grid must be non-empty, train.epochs >= 1");
  }
  return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kMissingFile, path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_pipeline_config(buf.str());
}

std::string format_pipeline_config(const PipelineConfig& c) {
  std::ostringstream out;
  out << "face_rank_fraction = " << csv::format_double(c.face_rank_fraction) << '\n'
      << "speech_correct_fraction = " << csv::format_double(c.speech_correct_fraction)
      << '\n'
      << "min_frames = " << c.min_frames << '\n'
      << "speak_threshold = " << csv::format_double(c.speak_threshold) << '\n'
      << "median_window = " << c.median_window << '\n'
      << "background_enabled = " << (c.background_enabled ? "true" : "false") << '\n'
      << "train.lambda_grid = ";
  for (std::size_t i = 0; i < c.train.lambda_grid.size(); ++i) {
    out << (i ? "," : "") << csv::format_double(c.train.lambda_grid[i]);
  }
  out << '\n'
      << "train.epochs = " << c.train.epochs << '\n'
      << "train.seed = " << c.train.seed << '\n'
      << "train.tolerance = " << csv::format_double(c.train.tolerance) << '\n';
  return out.str();
}

// --- inputs -----------------------------------------------------------------

PipelineInputs load_inputs(const DatasetManifest& manifest) {
  PipelineInputs in;
  in.manifest = manifest;
  in.actor_embeddings = read_embeddings(manifest.actor_embeddings_path);
  in.tracks = load_tracks(manifest);
  if (manifest.voice_embeddings_path) {
    in.voice_embeddings = read_embeddings(*manifest.voice_embeddings_path);
  }
  if (manifest.background_training_path) {
    auto rows = csv::read_file(*manifest.background_training_path,
                               {"n_frames", "face_area", "raw_norm", "mean_asv",
                                "is_background"});
    for (const auto& r : rows) {
      BackgroundExample ex;
      for (int k = 0; k < 4; ++k) ex.stats[k] = csv::to_double(r[k], "background_training");
      ex.is_background = parse_bool(r[4], "background_training.is_background");
      in.background_training.push_back(ex);
    }
  }
  return in;
}

// --- background -------------------------------------------------------------

std::array<double, 4> track_statistics(const TrackRecord& t) {
  double mean_asv = 0.0;
  if (t.asv_scores && !t.asv_scores->empty()) {
    mean_asv = std::accumulate(t.asv_scores->begin(), t.asv_scores->end(), 0.0) /
               static_cast<double>(t.asv_scores->size());
  }
  return {static_cast<double>(t.n_frames), t.face_area, t.raw_norm, mean_asv};
}

namespace {

constexpr const char* kBackgroundClass = "background";
constexpr const char* kForegroundClass = "foreground";

}  // namespace

std::vector<bool> classify_background(const std::vector<TrackRecord>& tracks,
                                      const std::vector<BackgroundExample>& examples,
                                      const TrainConfig& train, SvmModel* model_out) {
  std::vector<bool> flags(tracks.size(), false);
  if (examples.empty()) return flags;
  const bool any_bg = std::any_of(examples.begin(), examples.end(),
                                  [](const auto& e) { return e.is_background; });
  const bool any_fg = std::any_of(examples.begin(), examples.end(),
                                  [](const auto& e) { return !e.is_background; });
  if (!any_bg || !any_fg) {
    std::fill(flags.begin(), flags.end(), any_bg);
    return flags;
  }

  std::array<double, 4> mean{}, sd{};
  for (const auto& e : examples) {
    for (int k = 0; k < 4; ++k) mean[k] += e.stats[k];
  }
  for (auto& m : mean) m /= static_cast<double>(examples.size());
  for (const auto& e : examples) {
    for (int k = 0; k < 4; ++k) sd[k] += (e.stats[k] - mean[k]) * (e.stats[k] - mean[k]);
  }
  for (auto& s : sd) {
    s = std::sqrt(s / static_cast<double>(examples.size()));
    if (!(s > 0.0)) s = 1.0;
  }
  auto standardize = [&](const std::array<double, 4>& x) {
    std::array<float, 4> z{};
    for (int k = 0; k < 4; ++k) z[k] = static_cast<float>((x[k] - mean[k]) / sd[k]);
    return z;
  };

  LabeledSet data;
  data.dim = 4;
  for (const auto& e : examples) {
    data.add(standardize(e.stats), e.is_background ? kBackgroundClass : kForegroundClass);
  }
  SvmModel model = train_ovr(data, train);
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    flags[i] = predict(model, standardize(track_statistics(tracks[i]))).label ==
               kBackgroundClass;
  }
  if (model_out) *model_out = std::move(model);
  return flags;
}

// --- stages -----------------------------------------------------------------

namespace {

std::string actor_of(const std::string& id) {
  auto slash = id.rfind('/');
  return slash == std::string::npos ? id : id.substr(0, slash);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::unordered_map<std::string, const TrackRecord*> track_index(
    const std::vector<TrackRecord>& tracks) {
  std::unordered_map<std::string, const TrackRecord*> idx;
  for (const auto& t : tracks) idx.emplace(t.track_id, &t);
  return idx;
}

void require_stage(const PipelineState& state, Stage want, std::string_view running) {
  if (state.completed != want) {
    throw Error(Errc::kStageOrder, std::string(running) + " needs " +
                                       std::string(stage_name(want)) +
                                       " output, have " +
                                       std::string(stage_name(state.completed)));
  }
}

std::string fmt(double v) { return csv::format_double(v); }

double class_score(const SvmModel& model, std::span<const float> x,
                   const std::string& cls) {
  const auto s = score(model, x);
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    if (model.classes[c] == cls) return s[c];
  }
  return -HUGE_VAL;
}

// Trains a character classifier on the context descriptors of the tracks
// accepted by `use`; characters without examples are logged and dropped.
SvmModel train_character_model(const PipelineInputs& inputs, PipelineState& state,
                               const std::string& stage,
                               const std::function<bool(const LabelRecord&)>& use) {
  LabeledSet train;
  train.dim = inputs.manifest.embedding_dim_face;
  std::set<std::string> present;
  const auto idx = track_index(inputs.tracks);
  for (const auto& [id, rec] : state.labels) {
    if (rec.provenance == Provenance::kBackground || !use(rec)) continue;
    train.add(idx.at(id)->context_descriptor, rec.character);
    present.insert(rec.character);
  }
  for (const auto& c : inputs.manifest.cast) {
    if (!present.count(c.character)) {
      state.audit(stage, "dropped", c.character + " has no confident tracks");
    }
  }
  if (present.size() < 2) {
    throw Error(Errc::kEmptyConfidentSet,
                stage + ": " + std::to_string(present.size()) +
                    " characters have confident tracks, need 2");
  }
  SvmModel model = train_ovr(train, state.config.train);
  state.audit(stage, "trained",
              "classes=" + std::to_string(model.classes.size()) +
                  " examples=" + std::to_string(train.size()) +
                  " lambda=" + fmt(model.lambda));
  return model;
}

void mark_confident(PipelineState& state, const std::vector<RankedPrediction>& preds,
                    double fraction, const std::string& stage) {
  const auto ranked = rank_items(preds);
  const auto sel = select_top_fraction(ranked, fraction);
  for (const auto& p : sel.confident) state.labels.at(p.item_id).confident = true;
  for (const auto& p : sel.remainder) state.labels.at(p.item_id).confident = false;
  state.audit(stage, "confident",
              std::to_string(sel.confident.size()) + " of " +
                  std::to_string(ranked.size()));
}

}  // namespace

PipelineState run_stage1(const PipelineInputs& inputs, const PipelineConfig& config,
                         PipelineState state) {
  require_stage(state, Stage::kNone, "stage1");
  state.config = config;
  const auto& manifest = inputs.manifest;
  const auto& actors = inputs.actor_embeddings;
  if (actors.dim != manifest.embedding_dim_face) {
    throw Error(Errc::kDimMismatch, "actor embeddings dim " + std::to_string(actors.dim));
  }

  LabeledSet train;
  train.dim = actors.dim;
  std::map<std::string, std::size_t> per_actor;
  std::size_t ignored = 0;
  for (std::size_t i = 0; i < actors.size(); ++i) {
    const std::string actor = actor_of(actors.ids[i]);
    const CastEntry* entry = manifest.find_actor(actor);
    if (!entry) {
      ++ignored;
      continue;
    }
    train.add(actors.row(i), entry->character);
    ++per_actor[actor];
  }
  for (const auto& c : manifest.cast) {
    if (!per_actor.count(c.actor)) {
      throw Error(Errc::kUncoveredCastEntry, "actor '" + c.actor + "' (character '" +
                                                 c.character + "') has no images");
    }
  }
  if (ignored) {
    state.audit("stage1", "ignored", std::to_string(ignored) + " images of uncast actors");
  }
  SvmModel model = train_ovr(train, config.train);
  state.audit("stage1", "trained",
              "classes=" + std::to_string(model.classes.size()) +
                  " examples=" + std::to_string(train.size()) +
                  " lambda=" + fmt(model.lambda));

  std::vector<RankedPrediction> preds;
  for (const auto& t : inputs.tracks) {
    if (state.background.count(t.track_id)) continue;
    const Prediction p = predict(model, t.internal_descriptor);
    state.labels[t.track_id] = {t.track_id, p.label, p.confidence, Provenance::kStage1,
                                false};
    preds.push_back({t.track_id, p.label, p.confidence});
  }
  mark_confident(state, preds, config.face_rank_fraction, "stage1");
  state.models["stage1"] = std::move(model);
  state.completed = Stage::kStage1;
  return state;
}

PipelineState run_stage2(const PipelineInputs& inputs, PipelineState state) {
  require_stage(state, Stage::kStage1, "stage2");
  SvmModel model = train_character_model(inputs, state, "stage2",
                                         [](const LabelRecord& r) { return r.confident; });
  const auto idx = track_index(inputs.tracks);
  std::vector<RankedPrediction> preds;
  std::size_t relabeled = 0;
  for (auto& [id, rec] : state.labels) {
    if (rec.provenance == Provenance::kBackground) continue;
    const auto& ctx = idx.at(id)->context_descriptor;
    if (rec.confident) {
      // Kept label; ranked by the character model's score for it.
      rec.confidence = class_score(model, ctx, rec.character);
    } else {
      const Prediction p = predict(model, ctx);
      if (p.label != rec.character) ++relabeled;
      rec.character = p.label;
      rec.confidence = p.confidence;
      rec.provenance = Provenance::kStage2;
    }
    preds.push_back({id, rec.character, rec.confidence});
  }
  state.audit("stage2", "relabeled", std::to_string(relabeled) + " tracks changed label");
  mark_confident(state, preds, state.config.face_rank_fraction, "stage2");
  state.models["stage2"] = std::move(model);
  state.completed = Stage::kStage2;
  return state;
}

PipelineState run_voice_stage(const PipelineInputs& inputs, PipelineState state) {
  require_stage(state, Stage::kStage2, "voice");
  if (!inputs.voice_embeddings) {
    throw Error(Errc::kPreconditionViolation, "voice stage needs voice embeddings");
  }
  const auto& voice = *inputs.voice_embeddings;

  std::vector<TrackRecord> candidates;
  std::size_t without_asv = 0;
  for (const auto& t : inputs.tracks) {
    if (!state.labels.count(t.track_id) ||
        state.labels.at(t.track_id).provenance == Provenance::kBackground) {
      continue;
    }
    if (!t.asv_scores) {
      ++without_asv;
      continue;
    }
    candidates.push_back(t);
  }
  if (without_asv) {
    state.audit("voice", "no_asv", std::to_string(without_asv) + " tracks without ASV scores");
  }
  GateConfig gate{inputs.manifest.fps, state.config.min_frames,
                  state.config.speak_threshold, state.config.median_window};
  auto segments = gate_speaking_tracks(candidates, gate);
  state.audit("voice", "gated",
              std::to_string(segments.size()) + " speaking of " +
                  std::to_string(candidates.size()) + " tracks");

  std::unordered_map<std::string, std::size_t> voice_row;
  for (std::size_t i = 0; i < voice.size(); ++i) voice_row.emplace(voice.ids[i], i);
  std::size_t missing = 0;
  std::vector<SpeechSegment> kept;
  for (auto& s : segments) {
    auto it = voice_row.find(s.segment_id);
    if (it == voice_row.end()) {
      ++missing;
      continue;
    }
    auto row = voice.row(it->second);
    s.descriptor = std::vector<float>(row.begin(), row.end());
    kept.push_back(std::move(s));
  }
  if (missing) {
    state.audit("voice", "no_descriptor", std::to_string(missing) + " segments skipped");
  }

  LabeledSet train, val;
  train.dim = val.dim = voice.dim;
  std::vector<std::size_t> test;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    auto& s = kept[i];
    const LabelRecord& rec = state.labels.at(s.track_id);
    if (rec.confident) {
      s.label_state = LabelState::kPropagated;
      s.label = rec.character;
      (fnv1a(s.segment_id) % 5 == 0 ? val : train).add(*s.descriptor, rec.character);
    } else {
      test.push_back(i);
    }
  }
  state.audit("voice", "split",
              "train=" + std::to_string(train.size()) + " val=" + std::to_string(val.size()) +
                  " test=" + std::to_string(test.size()));

  if (test.empty()) {
    state.audit("voice", "skipped", "no test segments");
    state.segments = std::move(kept);
    state.completed = Stage::kVoice;
    return state;
  }
  if (train.size() == 0) {
    throw Error(Errc::kNoTrainSegments, "no confident track has a speech segment");
  }

  TrainDiagnostics diag;
  SvmModel model = train_ovr(train, state.config.train, &val, &diag);
  state.audit("voice", "trained",
              "classes=" + std::to_string(model.classes.size()) +
                  " examples=" + std::to_string(train.size()) +
                  " lambda=" + fmt(model.lambda));

  std::vector<RankedPrediction> preds;
  for (std::size_t i : test) {
    auto& s = kept[i];
    const Prediction p = predict(model, *s.descriptor);
    s.label_state = LabelState::kPredicted;
    s.label = p.label;
    s.confidence = p.confidence;
    preds.push_back({s.track_id, p.label, p.confidence});
  }
  const auto sel = select_top_fraction(rank_items(preds), state.config.speech_correct_fraction);
  std::size_t changed = 0;
  for (const auto& p : sel.confident) {
    auto& rec = state.labels.at(p.item_id);
    if (rec.character != p.predicted_class) ++changed;
    rec.character = p.predicted_class;
    rec.confidence = p.confidence;
    rec.provenance = Provenance::kVoice;
    rec.confident = true;
  }
  state.audit("voice", "corrected",
              std::to_string(sel.confident.size()) + " tracks, " + std::to_string(changed) +
                  " changed label");
  state.segments = std::move(kept);
  state.models["voice"] = std::move(model);
  state.completed = Stage::kVoice;
  return state;
}

PipelineState run_stage3_retrain(const PipelineInputs& inputs, PipelineState state) {
  require_stage(state, Stage::kVoice, "stage3");
  SvmModel model = train_character_model(inputs, state, "stage3",
                                         [](const LabelRecord& r) { return r.confident; });
  const auto idx = track_index(inputs.tracks);
  std::vector<RankedPrediction> preds;
  std::size_t disagreements = 0;
  for (auto& [id, rec] : state.labels) {
    if (rec.provenance == Provenance::kBackground) continue;
    const Prediction p = predict(model, idx.at(id)->context_descriptor);
    if (rec.provenance == Provenance::kVoice) {
      if (p.label != rec.character) ++disagreements;
      continue;
    }
    rec.character = p.label;
    rec.confidence = p.confidence;
    rec.provenance = Provenance::kStage3;
    preds.push_back({id, p.label, p.confidence});
  }
  if (disagreements) {
    state.audit("stage3", "voice_kept",
                std::to_string(disagreements) + " voice labels differ from the face model");
  }
  mark_confident(state, preds, state.config.face_rank_fraction, "stage3");
  state.models["stage3"] = std::move(model);
  state.completed = Stage::kStage3;
  return state;
}

PipelineState run_background_exclusion(const PipelineInputs& inputs,
                                       const PipelineConfig& config) {
  PipelineState state;
  state.config = config;
  if (!config.background_enabled) return state;
  SvmModel bg_model;
  const auto flags = classify_background(inputs.tracks, inputs.background_training,
                                         config.train, &bg_model);
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (!flags[i]) continue;
    const auto& id = inputs.tracks[i].track_id;
    state.background.insert(id);
    state.labels[id] = {id, "", 0.0, Provenance::kBackground, false};
  }
  if (!bg_model.classes.empty()) state.models["background"] = std::move(bg_model);
  state.audit("background", "flagged",
              std::to_string(state.background.size()) + " of " +
                  std::to_string(inputs.tracks.size()) + " tracks");
  return state;
}

PipelineState run_all(const PipelineInputs& inputs, const PipelineConfig& config) {
  PipelineState state = run_background_exclusion(inputs, config);
  if (state.background.size() == inputs.tracks.size()) {
    state.audit("pipeline", "empty", "no tracks to label");
    return state;
  }
  state = run_stage1(inputs, config, std::move(state));
  state = run_stage2(inputs, std::move(state));
  const bool any_asv = std::any_of(inputs.tracks.begin(), inputs.tracks.end(),
                                   [](const TrackRecord& t) { return t.asv_scores.has_value(); });
  if (!inputs.voice_embeddings || !any_asv) {
    state.audit("pipeline", "stopped", "no voice embeddings or ASV scores; final = stage2");
    return state;
  }
  state = run_voice_stage(inputs, std::move(state));
  return run_stage3_retrain(inputs, std::move(state));
}

// --- outputs ----------------------------------------------------------------

void write_labels_csv(const PipelineState& state, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::kIoError, "cannot open " + path.string());
  csv::write_row(f, {"track_id", "character", "confidence", "provenance", "confident"});
  for (const auto& [id, r] : state.labels) {
    csv::write_row(f, {id, r.character, fmt(r.confidence),
                       std::string(provenance_name(r.provenance)),
                       r.confident ? "1" : "0"});
  }
  if (!f) throw Error(Errc::kIoError, "write failed for " + path.string());
}

void write_audit_log(const PipelineState& state, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::kIoError, "cannot open " + path.string());
  for (const auto& e : state.audit_log) {
    f << e.stage << '\t' << e.event << '\t' << e.detail << '\n';
  }
  if (!f) throw Error(Errc::kIoError, "write failed for " + path.string());
}

void write_outputs(const PipelineState& state, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_labels_csv(state, out_dir / "labels.csv");
  write_audit_log(state, out_dir / "audit.log");
  if (state.completed >= Stage::kVoice) {
    write_segment_manifest(state.segments, out_dir / "segments.csv");
  }
  for (const auto& [stage, model] : state.models) {
    save_model(model, out_dir / ("model_" + stage + ".cmsv"));
  }
}

// --- checkpoint -------------------------------------------------------------

void save_checkpoint(const PipelineState& state, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["completed"] = stage_name(state.completed);
  j["labels"] = nlohmann::ordered_json::array();
  for (const auto& [id, r] : state.labels) {
    j["labels"].push_back({{"track_id", id},
                           {"character", r.character},
                           {"confidence", r.confidence},
                           {"provenance", provenance_name(r.provenance)},
                           {"confident", r.confident}});
  }
  j["background"] = state.background;
  j["audit"] = nlohmann::ordered_json::array();
  for (const auto& e : state.audit_log) {
    j["audit"].push_back({e.stage, e.event, e.detail});
  }
  j["segments"] = nlohmann::ordered_json::array();
  for (const auto& s : state.segments) {
    j["segments"].push_back({{"segment_id", s.segment_id},
                             {"track_id", s.track_id},
                             {"duration_s", s.duration_s},
                             {"label", s.label},
                             {"confidence", s.confidence},
                             {"state", static_cast<int>(s.label_state)}});
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::kIoError, "cannot open " + path.string());
  f << j.dump(1) << '\n';
  if (!f) throw Error(Errc::kIoError, "write failed for " + path.string());
}

PipelineState load_checkpoint(const std::filesystem::path& path,
                              const PipelineConfig& config) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kStageOrder, "no checkpoint at " + path.string());
  PipelineState state;
  state.config = config;
  try {
    const auto j = nlohmann::json::parse(in);
    const std::string completed = j.at("completed").get<std::string>();
    bool known = false;
    for (auto s : {Stage::kNone, Stage::kStage1, Stage::kStage2, Stage::kVoice,
                   Stage::kStage3}) {
      if (stage_name(s) == completed) {
        state.completed = s;
        known = true;
      }
    }
    if (!known) throw Error(Errc::kParseError, "unknown stage '" + completed + "'");
    for (const auto& l : j.at("labels")) {
      LabelRecord r{l.at("track_id").get<std::string>(),
                    l.at("character").get<std::string>(),
                    l.at("confidence").get<double>(),
                    parse_provenance(l.at("provenance").get<std::string>()),
                    l.at("confident").get<bool>()};
      state.labels[r.track_id] = r;
    }
    for (const auto& b : j.at("background")) state.background.insert(b.get<std::string>());
    for (const auto& e : j.at("audit")) {
      state.audit(e.at(0).get<std::string>(), e.at(1).get<std::string>(),
                  e.at(2).get<std::string>());
    }
    for (const auto& s : j.at("segments")) {
      SpeechSegment seg;
      seg.segment_id = s.at("segment_id").get<std::string>();
      seg.track_id = s.at("track_id").get<std::string>();
      seg.duration_s = s.at("duration_s").get<double>();
      seg.label = s.at("label").get<std::string>();
      seg.confidence = s.at("confidence").get<double>();
      seg.label_state = static_cast<LabelState>(s.at("state").get<int>());
      state.segments.push_back(std::move(seg));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kParseError, path.string() + ": " + e.what());
  }
  return state;
}

}  // namespace castid
