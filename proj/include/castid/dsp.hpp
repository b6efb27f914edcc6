// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef CASTID_DSP_HPP_
#define CASTID_DSP_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace castid {

struct AudioClip {
  std::vector<double> samples;  // [-1, 1]
  int sample_rate = 16000;
};

inline constexpr double kWindowSeconds = 0.025;
inline constexpr double kHopSeconds = 0.010;
inline constexpr std::size_t kFftSize = 1024;
inline constexpr std::size_t kSpectrogramBins = kFftSize / 2;

// Magnitude spectrogram stored frame-major: values[frame * bins + bin].
// Output bin k holds FFT bin k + 1 (DC is dropped), so bin k is centred on
// (k + 1) * sample_rate / 1024 Hz.
struct Spectrogram {
  std::size_t bins = kSpectrogramBins;
  std::size_t frames = 0;
  std::vector<float> values;

  std::span<const float> frame(std::size_t t) const {
    return {values.data() + t * bins, bins};
  }
  float at(std::size_t bin, std::size_t t) const { return values[t * bins + bin]; }
};

std::size_t window_samples(int sample_rate);
std::size_t hop_samples(int sample_rate);

// Periodic Hamming window, w[n] = 0.54 - 0.46 cos(2 pi n / size).
std::vector<double> hamming_window(std::size_t size);

// floor((len - win) / hop) + 1 in samples. Throws TooShort below one window.
std::size_t frames_for_samples(std::size_t n_samples, int sample_rate = 16000);
std::size_t frames_for_duration(double seconds, int sample_rate = 16000);

// 25 ms periodic Hamming windows every 10 ms, zero-padded to a 1024-point
// FFT. Throws TooShort if the clip is shorter than one window.
Spectrogram compute_spectrogram(const AudioClip& clip);

// 16-bit PCM mono WAV.
AudioClip read_wav(const std::filesystem::path& path);
void write_wav(const AudioClip& clip, const std::filesystem::path& path);

}  // namespace castid

#endif  // CASTID_DSP_HPP_
