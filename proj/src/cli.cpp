// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "castid/cli.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "castid/csv.hpp"
#include "castid/dsp.hpp"
#include "castid/error.hpp"
#include "castid/eval.hpp"
#include "castid/imageops.hpp"
#include "castid/ingest.hpp"
#include "castid/pipeline.hpp"
#include "castid/simgen.hpp"

namespace castid::cli {

namespace {

// Exclusive advisory lock on <dir>/.lock for the lifetime of the object.
class DirLock {
 public:
  explicit DirLock(const fs::path& dir) {
    const fs::path p = dir / ".lock";
    fd_ = ::open(p.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(Errc::kIoError, "cannot create " + p.string());
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw Error(Errc::kLocked, dir.string() + " is in use by another run");
    }
  }
  ~DirLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  int fd_ = -1;
};

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  }
}

constexpr const char* kCheckpoint = "checkpoint.json";

}  // namespace

int cmd_validate(const fs::path& manifest, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const DatasetManifest m = load_manifest(manifest);
    const PipelineInputs in = load_inputs(m);
    std::size_t covered = 0;
    for (const auto& c : m.cast) {
      const std::string prefix = c.actor + "/";
      covered += std::any_of(in.actor_embeddings.ids.begin(), in.actor_embeddings.ids.end(),
                             [&](const std::string& id) {
                               return id == c.actor || id.rfind(prefix, 0) == 0;
                             });
    }
    out << "valid: " << m.cast.size() << " cast entries (" << covered
        << " with actor images), " << in.actor_embeddings.size() << " actor images, "
        << in.tracks.size() << " tracks";
    if (in.voice_embeddings) out << ", " << in.voice_embeddings->size() << " voice segments";
    out << '\n';
    return 0;
  });
}

int cmd_simulate(const std::optional<fs::path>& config, const fs::path& out_dir,
                 std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    SimConfig c = config ? load_sim_config(*config) : SimConfig{};
    if (seed) c.seed = *seed;
    const GeneratedEpisode ep = generate_episode(c, out_dir);
    out << format_summary(summarize(ep.dir));
    return 0;
  });
}

int cmd_run(const fs::path& manifest, const std::optional<fs::path>& config,
            const fs::path& out_dir, const std::string& stage,
            std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (stage != "1" && stage != "2" && stage != "voice" && stage != "3" && stage != "all") {
      err << "error: --stage must be one of 1, 2, voice, 3, all\n";
      return 1;
    }
    PipelineConfig pc = config ? load_pipeline_config(*config) : PipelineConfig{};
    if (seed) pc.train.seed = *seed;
    const DatasetManifest m = load_manifest(manifest);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) {
      throw Error(Errc::kIoError, "cannot create " + out_dir.string());
    }
    DirLock lock(out_dir);
    const PipelineInputs in = load_inputs(m);

    PipelineState state;
    if (stage == "all") {
      state = run_all(in, pc);
    } else if (stage == "1") {
      state = run_stage1(in, pc, run_background_exclusion(in, pc));
    } else {
      state = load_checkpoint(out_dir / kCheckpoint, pc);
      if (stage == "2") {
        state = run_stage2(in, std::move(state));
      } else if (stage == "voice") {
        state = run_voice_stage(in, std::move(state));
      } else {
        state = run_stage3_retrain(in, std::move(state));
      }
    }
    write_outputs(state, out_dir);
    save_checkpoint(state, out_dir / kCheckpoint);
    out << "completed " << stage_name(state.completed) << ": " << state.labels.size()
        << " labels written to " << (out_dir / "labels.csv").string() << '\n';
    return 0;
  });
}

int cmd_eval(const fs::path& labels, const fs::path& gt, const fs::path& out_dir,
             std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const EvalReport r = evaluate_files(labels, gt, out_dir);
    std::ostringstream line;
    line << std::fixed << std::setprecision(4) << "accuracy " << r.accuracy << ", AP "
         << r.average_precision;
    out << line.str() << '\n';
    if (r.n_excluded) out << "excluded " << r.n_excluded << " background tracks\n";
    return 0;
  });
}

int cmd_spectrogram(const fs::path& wav, const fs::path& out_path, std::ostream& out,
                    std::ostream& err) {
  return guarded(err, [&] {
    const AudioClip clip = read_wav(wav);
    const Spectrogram spec = compute_spectrogram(clip);
    if (out_path.extension() == ".csv") {
      std::ofstream f(out_path, std::ios::trunc);
      if (!f) throw Error(Errc::kIoError, "cannot open " + out_path.string());
      csv::Row header{"frame"};
      for (std::size_t k = 0; k < spec.bins; ++k) header.push_back("bin_" + std::to_string(k));
      csv::write_row(f, header);
      for (std::size_t t = 0; t < spec.frames; ++t) {
        csv::Row row{std::to_string(t)};
        for (float v : spec.frame(t)) row.push_back(csv::format_double(v));
        csv::write_row(f, row);
      }
      if (!f) throw Error(Errc::kIoError, "write failed for " + out_path.string());
    } else {
      EmbeddingSet set;
      set.dim = static_cast<std::uint32_t>(spec.bins);
      for (std::size_t t = 0; t < spec.frames; ++t) {
        char id[32];
        std::snprintf(id, sizeof(id), "frame_%06zu", t);
        set.add(id, spec.frame(t));
      }
      write_embeddings(set, out_path);
    }
    out << spec.bins << " x " << spec.frames << '\n';
    return 0;
  });
}

int cmd_augment(const fs::path& in_dir, const fs::path& out_dir, bool grayscale,
                std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!fs::is_directory(in_dir)) throw Error(Errc::kMissingFile, in_dir.string());
    std::vector<fs::path> inputs;
    for (const auto& e : fs::directory_iterator(in_dir)) {
      if (e.is_regular_file() && e.path().extension() == ".png") inputs.push_back(e.path());
    }
    std::sort(inputs.begin(), inputs.end());
    std::vector<RasterImage> images;
    images.reserve(inputs.size());
    for (const auto& p : inputs) images.push_back(read_png(p));
    const auto augmented = augment_set(images, grayscale);
    fs::create_directories(out_dir);
    static constexpr const char* kSuffix[] = {"_orig", "_con", "_low", "_flip"};
    const std::size_t n = inputs.size();
    for (std::size_t v = 0; v < 4; ++v) {
      for (std::size_t i = 0; i < n; ++i) {
        write_png(augmented[v * n + i],
                  out_dir / (inputs[i].stem().string() + kSuffix[v] + ".png"));
      }
    }
    out << "wrote " << augmented.size() << " images\n";
    return 0;
  });
}

}  // namespace castid::cli
