// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "castid/dsp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "castid/error.hpp"

namespace castid {

namespace {

// FFTW's planner is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        in_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
        out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.get(), out_.get(),
                                 FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_.get(); }
  const fftw_complex* output() const { return out_.get(); }
  void execute() { fftw_execute(plan_); }

 private:
  std::size_t n_;
  std::unique_ptr<double, FftwFree> in_;
  std::unique_ptr<fftw_complex, FftwFree> out_;
  fftw_plan plan_;
};

}  // namespace

std::size_t window_samples(int sample_rate) {
  return static_cast<std::size_t>(std::llround(kWindowSeconds * sample_rate));
}

std::size_t hop_samples(int sample_rate) {
  return static_cast<std::size_t>(std::llround(kHopSeconds * sample_rate));
}

std::vector<double> hamming_window(std::size_t size) {
  std::vector<double> w(size);
  for (std::size_t n = 0; n < size; ++n) {
    w[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                  static_cast<double>(size));
  }
  return w;
}

std::size_t frames_for_samples(std::size_t n_samples, int sample_rate) {
  if (sample_rate <= 0) {
    throw Error(Errc::kPreconditionViolation, "sample rate must be positive");
  }
  const std::size_t win = window_samples(sample_rate);
  const std::size_t hop = hop_samples(sample_rate);
  if (n_samples < win) {
    throw Error(Errc::kTooShort, std::to_string(n_samples) +
                                     " samples is shorter than one " +
                                     std::to_string(win) + "-sample window");
  }
  return (n_samples - win) / hop + 1;
}

std::size_t frames_for_duration(double seconds, int sample_rate) {
  if (!(seconds >= 0.0) || !std::isfinite(seconds)) {
    throw Error(Errc::kTooShort, "duration must be a non-negative number");
  }
  return frames_for_samples(
      static_cast<std::size_t>(std::llround(seconds * sample_rate)), sample_rate);
}

Spectrogram compute_spectrogram(const AudioClip& clip) {
  const std::size_t win = window_samples(clip.sample_rate);
  const std::size_t hop = hop_samples(clip.sample_rate);
  Spectrogram spec;
  spec.frames = frames_for_samples(clip.samples.size(), clip.sample_rate);
  if (win > kFftSize) {
    throw Error(Errc::kPreconditionViolation,
                "window of " + std::to_string(win) + " samples exceeds the FFT size");
  }
  spec.values.assign(spec.frames * spec.bins, 0.0f);

  const auto window = hamming_window(win);
  RealFft fft(kFftSize);
  double* in = fft.input();
  for (std::size_t t = 0; t < spec.frames; ++t) {
    const std::size_t start = t * hop;
    for (std::size_t n = 0; n < win; ++n) in[n] = clip.samples[start + n] * window[n];
    std::fill(in + win, in + kFftSize, 0.0);
    fft.execute();
    const fftw_complex* out = fft.output();
    float* dst = spec.values.data() + t * spec.bins;
    for (std::size_t k = 0; k < spec.bins; ++k) {
      dst[k] = static_cast<float>(std::hypot(out[k + 1][0], out[k + 1][1]));
    }
  }
  return spec;
}

// --- WAV --------------------------------------------------------------------

namespace {

std::uint32_t le32(const unsigned char* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

AudioClip read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kMissingFile, path.string());
  std::string buf(std::istreambuf_iterator<char>(in), {});
  const auto* b = reinterpret_cast<const unsigned char*>(buf.data());
  if (buf.size() < 12 || std::memcmp(b, "RIFF", 4) != 0 ||
      std::memcmp(b + 8, "WAVE", 4) != 0) {
    throw Error(Errc::kParseError, path.string() + ": not a RIFF/WAVE file");
  }
  AudioClip clip;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::uint32_t size = le32(b + pos + 4);
    const unsigned char* body = b + pos + 8;
    if (pos + 8 + size > buf.size()) {
      throw Error(Errc::kTruncatedFile, path.string() + ": chunk overruns file");
    }
    if (std::memcmp(b + pos, "fmt ", 4) == 0) {
      if (size < 16) throw Error(Errc::kParseError, path.string() + ": short fmt chunk");
      const std::uint16_t format = le16(body);
      const std::uint16_t channels = le16(body + 2);
      const std::uint32_t rate = le32(body + 4);
      const std::uint16_t bits = le16(body + 14);
      if (format != 1 || channels != 1 || bits != 16) {
        throw Error(Errc::kParseError,
                    path.string() + ": only 16-bit PCM mono is supported");
      }
      clip.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (std::memcmp(b + pos, "data", 4) == 0) {
      if (!have_fmt) throw Error(Errc::kParseError, path.string() + ": data before fmt");
      clip.samples.resize(size / 2);
      for (std::size_t i = 0; i < clip.samples.size(); ++i) {
        auto s = static_cast<std::int16_t>(le16(body + 2 * i));
        clip.samples[i] = s / 32768.0;
      }
      return clip;
    }
    pos += 8 + size + (size & 1);
  }
  throw Error(Errc::kParseError, path.string() + ": no data chunk");
}

void write_wav(const AudioClip& clip, const std::filesystem::path& path) {
  std::string out;
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  auto u16 = [&](std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>(v >> 8));
  };
  const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  out += "RIFF";
  u32(36 + data_bytes);
  out += "WAVEfmt ";
  u32(16);
  u16(1);
  u16(1);
  u32(static_cast<std::uint32_t>(clip.sample_rate));
  u32(static_cast<std::uint32_t>(clip.sample_rate) * 2);
  u16(2);
  u16(16);
  out += "data";
  u32(data_bytes);
  for (double s : clip.samples) {
    long q = std::lround(std::clamp(s, -1.0, 1.0) * 32767.0);
    u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::kIoError, "cannot open " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error(Errc::kIoError, "write failed for " + path.string());
}

}  // namespace castid
