// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <sstream>

#include "castid/cli.hpp"
#include "castid/descriptors.hpp"
#include "castid/dsp.hpp"
#include "castid/error.hpp"
#include "castid/eval.hpp"
#include "castid/imageops.hpp"
#include "castid/ingest.hpp"
#include "castid/selection.hpp"
#include "castid/simgen.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

PyObject* g_error_type = nullptr;

// HxW or HxWxC float array -> RasterImage.
castid::RasterImage to_image(const FloatArray& a) {
  if (a.ndim() != 2 && a.ndim() != 3) throw py::value_error("image must be HxW or HxWxC");
  const int h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
  const int c = a.ndim() == 3 ? static_cast<int>(a.shape(2)) : 1;
  if (c != 1 && c != 3) throw py::value_error("image must have 1 or 3 channels");
  castid::RasterImage img(w, h, c);
  std::memcpy(img.pixels.data(), a.data(), img.pixels.size() * sizeof(float));
  return img;
}

FloatArray from_image(const castid::RasterImage& img) {
  std::vector<py::ssize_t> shape{img.height, img.width};
  if (img.channels == 3) shape.push_back(3);
  FloatArray out(shape);
  std::memcpy(out.mutable_data(), img.pixels.data(), img.pixels.size() * sizeof(float));
  return out;
}

castid::EmbeddingSet to_set(const std::vector<std::string>& ids, const FloatArray& values) {
  if (values.ndim() != 2) throw py::value_error("values must be 2-D");
  if (static_cast<std::size_t>(values.shape(0)) != ids.size()) {
    throw py::value_error("one row per id required");
  }
  castid::EmbeddingSet s;
  s.dim = static_cast<std::uint32_t>(values.shape(1));
  s.ids = ids;
  s.values.assign(values.data(), values.data() + values.size());
  return s;
}

py::tuple from_set(const castid::EmbeddingSet& s) {
  FloatArray values({static_cast<py::ssize_t>(s.ids.size()), static_cast<py::ssize_t>(s.dim)});
  std::memcpy(values.mutable_data(), s.values.data(), s.values.size() * sizeof(float));
  return py::make_tuple(s.ids, values);
}

std::vector<castid::ScoredLabel> to_labels(
    const std::vector<std::tuple<std::string, std::string, double>>& rows) {
  std::vector<castid::ScoredLabel> out;
  for (const auto& [id, ch, conf] : rows) out.push_back({id, ch, conf});
  return out;
}

// Runs a CLI command, raising on a non-zero exit with its diagnostics.
template <typename F>
std::string run_command(F&& command) {
  std::ostringstream out, err;
  const int code = command(out, err);
  if (code != 0) {
    py::object e = py::handle(g_error_type)(err.str().empty() ? "command failed" : err.str());
    e.attr("exit_code") = code;
    PyErr_SetObject(g_error_type, e.ptr());
    throw py::error_already_set();
  }
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "castid native core";

  // Held for the life of the process; the module keeps its own reference.
  g_error_type =
      py::exception<castid::Error>(m, "CastidError", PyExc_RuntimeError).release().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const castid::Error& e) {
      py::object err = py::handle(g_error_type)(e.what());
      err.attr("code") = std::string(castid::errc_name(e.code()));
      err.attr("exit_code") = castid::exit_code_for(e.code());
      PyErr_SetObject(g_error_type, err.ptr());
    }
  });

  // Embedding files.
  m.def("read_embeddings", [](const fs::path& p) { return from_set(castid::read_embeddings(p)); },
        py::arg("path"), "Read a CMEB file as (ids, float32 array of shape (n, dim)).");
  m.def(
      "write_embeddings",
      [](const fs::path& p, const std::vector<std::string>& ids, const FloatArray& values) {
        castid::write_embeddings(to_set(ids, values), p);
      },
      py::arg("path"), py::arg("ids"), py::arg("values"));

  // Descriptors.
  m.def(
      "pool_track",
      [](const FloatArray& frames) {
        if (frames.ndim() != 2) throw py::value_error("frames must be 2-D");
        const std::size_t n = frames.shape(0), d = frames.shape(1);
        std::vector<std::span<const float>> rows;
        for (std::size_t i = 0; i < n; ++i) rows.emplace_back(frames.data() + i * d, d);
        const auto pooled = castid::pool_frames(rows);
        return FloatArray(static_cast<py::ssize_t>(pooled.unit.size()), pooled.unit.data());
      },
      py::arg("frames"), "Sum-pool frame descriptors and L2-normalize.");

  // Audio.
  m.def("frames_for_duration", &castid::frames_for_duration, py::arg("seconds"),
        py::arg("sample_rate") = 16000);
  m.def(
      "spectrogram",
      [](const DoubleArray& samples, int sample_rate) {
        castid::AudioClip clip;
        clip.sample_rate = sample_rate;
        clip.samples.assign(samples.data(), samples.data() + samples.size());
        const auto s = castid::compute_spectrogram(clip);
        FloatArray out({static_cast<py::ssize_t>(s.frames), static_cast<py::ssize_t>(s.bins)});
        std::memcpy(out.mutable_data(), s.values.data(), s.values.size() * sizeof(float));
        return out;
      },
      py::arg("samples"), py::arg("sample_rate") = 16000,
      "Magnitude spectrogram, shape (frames, 512).");
  m.def(
      "read_wav",
      [](const fs::path& p) {
        const auto clip = castid::read_wav(p);
        return py::make_tuple(DoubleArray(static_cast<py::ssize_t>(clip.samples.size()),
                                          clip.samples.data()),
                              clip.sample_rate);
      },
      py::arg("path"));

  // Images, float arrays in [0, 1].
  m.def("contrast_stretch",
        [](const FloatArray& a, double lo, double hi) {
          return from_image(castid::contrast_stretch(to_image(a), lo, hi));
        },
        py::arg("image"), py::arg("lo") = castid::kContrastLo, py::arg("hi") = castid::kContrastHi);
  m.def("horizontal_flip",
        [](const FloatArray& a) { return from_image(castid::horizontal_flip(to_image(a))); },
        py::arg("image"));
  m.def("bicubic_resize",
        [](const FloatArray& a, int w, int h) {
          return from_image(castid::bicubic_resize(to_image(a), w, h));
        },
        py::arg("image"), py::arg("width"), py::arg("height"));
  m.def("to_grayscale",
        [](const FloatArray& a) { return from_image(castid::to_grayscale(to_image(a))); },
        py::arg("image"));
  m.def(
      "augment",
      [](const std::vector<FloatArray>& images, bool grayscale) {
        std::vector<castid::RasterImage> in;
        for (const auto& a : images) in.push_back(to_image(a));
        std::vector<FloatArray> out;
        for (const auto& img : castid::augment_set(in, grayscale)) out.push_back(from_image(img));
        return out;
      },
      py::arg("images"), py::arg("grayscale") = false,
      "Originals, contrast-stretched, low-resolution and flipped copies, in that order.");
  m.def("read_png", [](const fs::path& p) { return from_image(castid::read_png(p)); },
        py::arg("path"));
  m.def("write_png",
        [](const FloatArray& a, const fs::path& p) { castid::write_png(to_image(a), p); },
        py::arg("image"), py::arg("path"));

  // Selection and scoring.
  m.def("confident_count", &castid::confident_count, py::arg("n"), py::arg("fraction"));
  m.def(
      "average_precision",
      [](const std::vector<std::tuple<std::string, std::string, double>>& labels,
         const std::vector<std::pair<std::string, std::string>>& gt) {
        std::vector<castid::GroundTruthRow> rows;
        for (const auto& [id, ch] : gt) rows.push_back({id, ch});
        return castid::average_precision(castid::pr_curve(to_labels(labels), rows));
      },
      py::arg("labels"), py::arg("ground_truth"),
      "labels: (track_id, character, confidence); ground_truth: (track_id, character).");

  // Episode-level operations.
  m.def(
      "simulate",
      [](const fs::path& out_dir, const std::string& config_text,
         std::optional<std::uint64_t> seed) {
        castid::SimConfig c = castid::parse_sim_config(config_text);
        if (seed) c.seed = *seed;
        return castid::generate_episode(c, out_dir).manifest_path;
      },
      py::arg("out_dir"), py::arg("config_text") = "", py::arg("seed") = py::none(),
      "Write a synthetic episode from `key = value` config text; returns the manifest path.");
  m.def(
      "validate",
      [](const fs::path& manifest) {
        return run_command([&](std::ostream& o, std::ostream& e) {
          return castid::cli::cmd_validate(manifest, o, e);
        });
      },
      py::arg("manifest"));
  m.def(
      "run",
      [](const fs::path& manifest, const fs::path& out_dir, const std::string& stage,
         std::optional<fs::path> config, std::optional<std::uint64_t> seed) {
        return run_command([&](std::ostream& o, std::ostream& e) {
          return castid::cli::cmd_run(manifest, config, out_dir, stage, seed, o, e);
        });
      },
      py::arg("manifest"), py::arg("out_dir"), py::arg("stage") = "all",
      py::arg("config") = py::none(), py::arg("seed") = py::none());
  m.def(
      "evaluate",
      [](const fs::path& labels, const fs::path& gt, const fs::path& out_dir) {
        const auto r = castid::evaluate_files(labels, gt, out_dir);
        py::dict d;
        d["accuracy"] = r.accuracy;
        d["average_precision"] = r.average_precision;
        d["n_tracks"] = r.n_tracks;
        d["n_excluded"] = r.n_excluded;
        return d;
      },
      py::arg("labels"), py::arg("ground_truth"), py::arg("out_dir"));
}
