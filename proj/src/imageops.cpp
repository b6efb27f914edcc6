// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "castid/imageops.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "castid/error.hpp"

namespace castid {

RasterImage::RasterImage(int w, int h, int c, float fill)
    : width(w), height(h), channels(c),
      pixels(static_cast<std::size_t>(w) * h * c, fill) {
  if (w <= 0 || h <= 0 || (c != 1 && c != 3)) {
    throw Error(Errc::kPreconditionViolation,
                "bad raster shape " + std::to_string(w) + "x" + std::to_string(h) +
                    "x" + std::to_string(c));
  }
}

RasterImage contrast_stretch(const RasterImage& img, double lo, double hi) {
  if (!(lo >= 0.0 && lo < hi && hi <= 1.0)) {
    throw Error(Errc::kBadLimits,
                "limits (" + std::to_string(lo) + ", " + std::to_string(hi) + ")");
  }
  RasterImage out = img;
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  for (int c = 0; c < img.channels; ++c) {
    float mn = 1.0f, mx = 0.0f;
    for (std::size_t i = 0; i < n; ++i) {
      float v = img.pixels[i * img.channels + c];
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    if (mx <= mn) {
      const auto mid = static_cast<float>((lo + hi) / 2.0);
      for (std::size_t i = 0; i < n; ++i) out.pixels[i * img.channels + c] = mid;
      continue;
    }
    const double scale = (hi - lo) / (static_cast<double>(mx) - mn);
    for (std::size_t i = 0; i < n; ++i) {
      double v = img.pixels[i * img.channels + c];
      double s = lo + (v - mn) * scale;
      out.pixels[i * img.channels + c] = static_cast<float>(std::clamp(s, lo, hi));
    }
  }
  return out;
}

namespace {

double catmull_rom(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

struct Taps {
  int index[4];
  double weight[4];
};

// Source taps for each output coordinate along one axis.
std::vector<Taps> axis_taps(int in_size, int out_size) {
  std::vector<Taps> taps(out_size);
  const double scale = static_cast<double>(in_size) / out_size;
  for (int o = 0; o < out_size; ++o) {
    const double src = (o + 0.5) * scale - 0.5;
    const int base = static_cast<int>(std::floor(src));
    for (int k = 0; k < 4; ++k) {
      int i = base - 1 + k;
      taps[o].index[k] = std::clamp(i, 0, in_size - 1);
      taps[o].weight[k] = catmull_rom(src - i);
    }
  }
  return taps;
}

}  // namespace

RasterImage bicubic_resize(const RasterImage& img, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) {
    throw Error(Errc::kPreconditionViolation, "output size must be positive");
  }
  const auto xs = axis_taps(img.width, out_w);
  const auto ys = axis_taps(img.height, out_h);
  RasterImage out(out_w, out_h, img.channels);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        double acc = 0.0;
        for (int j = 0; j < 4; ++j) {
          double row = 0.0;
          for (int i = 0; i < 4; ++i) {
            row += xs[x].weight[i] * img.at(ys[y].index[j], xs[x].index[i], c);
          }
          acc += ys[y].weight[j] * row;
        }
        out.at(y, x, c) = static_cast<float>(std::clamp(acc, 0.0, 1.0));
      }
    }
  }
  return out;
}

RasterImage horizontal_flip(const RasterImage& img) {
  RasterImage out = img;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        out.at(y, img.width - 1 - x, c) = img.at(y, x, c);
      }
    }
  }
  return out;
}

RasterImage to_grayscale(const RasterImage& img) {
  if (img.channels == 1) throw Error(Errc::kAlreadyGray, "image has one channel");
  RasterImage out(img.width, img.height, 1);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double luma = 0.299 * img.at(y, x, 0) + 0.587 * img.at(y, x, 1) +
                    0.114 * img.at(y, x, 2);
      out.at(y, x, 0) = static_cast<float>(std::clamp(luma, 0.0, 1.0));
    }
  }
  return out;
}

std::vector<RasterImage> augment_set(const std::vector<RasterImage>& images,
                                     bool grayscale) {
  std::vector<RasterImage> base;
  base.reserve(images.size());
  for (const auto& img : images) {
    base.push_back(grayscale && img.channels == 3 ? to_grayscale(img) : img);
  }
  std::vector<RasterImage> out;
  out.reserve(4 * base.size());
  out.insert(out.end(), base.begin(), base.end());
  for (const auto& img : base) out.push_back(contrast_stretch(img, kContrastLo, kContrastHi));
  for (const auto& img : base) {
    out.push_back(bicubic_resize(img, std::max(1, img.width / 2),
                                 std::max(1, img.height / 2)));
  }
  for (const auto& img : base) out.push_back(horizontal_flip(img));
  return out;
}

// --- PNG --------------------------------------------------------------------

RasterImage read_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    std::string msg = image.message;
    png_image_free(&image);
    if (!std::filesystem::exists(path)) throw Error(Errc::kMissingFile, path.string());
    throw Error(Errc::kParseError, path.string() + ": " + msg);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(Errc::kParseError, path.string() + ": " + msg);
  }
  RasterImage out(static_cast<int>(image.width), static_cast<int>(image.height),
                  color ? 3 : 1);
  for (std::size_t i = 0; i < buf.size(); ++i) out.pixels[i] = buf[i] / 255.0f;
  return out;
}

void write_png(const RasterImage& img, const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> buf(img.pixels.size());
  for (std::size_t i = 0; i < buf.size(); ++i) {
    double v = std::clamp(static_cast<double>(img.pixels[i]), 0.0, 1.0);
    buf[i] = static_cast<png_byte>(std::floor(v * 255.0 + 0.5));
  }
  if (!png_image_write_to_file(&image, path.c_str(), 0, buf.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(Errc::kIoError, path.string() + ": " + msg);
  }
}

}  // namespace castid
