// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef CASTID_IMAGEOPS_HPP_
#define CASTID_IMAGEOPS_HPP_

#include <filesystem>
#include <vector>

namespace castid {

// Interleaved row-major raster, values in [0, 1].
struct RasterImage {
  int width = 0;
  int height = 0;
  int channels = 1;  // 1 or 3
  std::vector<float> pixels;

  RasterImage() = default;
  RasterImage(int w, int h, int c, float fill = 0.0f);

  float& at(int y, int x, int c) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  float at(int y, int x, int c) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  bool operator==(const RasterImage&) const = default;
};

// Per channel, maps [min, max] linearly onto [lo, hi]. A constant channel
// maps to (lo + hi) / 2. Throws BadLimits unless 0 <= lo < hi <= 1.
RasterImage contrast_stretch(const RasterImage& img, double lo, double hi);

// Catmull-Rom bicubic (a = -0.5) with pixel-centre alignment and clamped
// borders; output clamped to [0, 1].
RasterImage bicubic_resize(const RasterImage& img, int out_w, int out_h);

RasterImage horizontal_flip(const RasterImage& img);

// BT.601 luma. Throws AlreadyGray on single-channel input.
RasterImage to_grayscale(const RasterImage& img);

inline constexpr double kContrastLo = 0.4;
inline constexpr double kContrastHi = 1.0;

// originals ++ contrast-stretched ++ half-resolution ++ flipped.
std::vector<RasterImage> augment_set(const std::vector<RasterImage>& images,
                                     bool grayscale);

RasterImage read_png(const std::filesystem::path& path);
void write_png(const RasterImage& img, const std::filesystem::path& path);

}  // namespace castid

#endif  // CASTID_IMAGEOPS_HPP_
