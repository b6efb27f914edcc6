// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "castid/imageops.hpp"
#include "error_matchers.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

namespace castid {
namespace {

RasterImage random_image(std::mt19937_64& gen, int w, int h, int c) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  RasterImage img(w, h, c);
  for (auto& v : img.pixels) v = u(gen);
  return img;
}

}  // namespace

TEST_CASE("contrast stretch maps channel extremes onto the limits") {
  RasterImage img(3, 1, 1);
  img.pixels = {0.0f, 0.5f, 1.0f};
  const auto out = contrast_stretch(img, 0.4, 1.0);
  CHECK(out.pixels[0] == doctest::Approx(0.4));
  CHECK(out.pixels[1] == doctest::Approx(0.7));
  CHECK(out.pixels[2] == doctest::Approx(1.0));
}

TEST_CASE("contrast stretch works per channel") {
  RasterImage img(2, 1, 3);
  img.pixels = {0.2f, 0.5f, 0.1f, 0.6f, 0.5f, 0.3f};
  const auto out = contrast_stretch(img, 0.4, 1.0);
  CHECK(out.at(0, 0, 0) == doctest::Approx(0.4));
  CHECK(out.at(0, 1, 0) == doctest::Approx(1.0));
  CHECK(out.at(0, 0, 1) == doctest::Approx(0.7));  // constant channel
  CHECK(out.at(0, 1, 2) == doctest::Approx(1.0));
}

TEST_CASE("constant image maps to the midpoint") {
  const auto out = contrast_stretch(RasterImage(4, 4, 1, 0.3f), 0.4, 1.0);
  for (float v : out.pixels) CHECK(v == doctest::Approx(0.7));
}

TEST_CASE("contrast stretch rejects bad limits") {
  CHECK_ERRC(contrast_stretch(RasterImage(1, 1, 1), 0.5, 0.5), Errc::kBadLimits);
  CHECK_ERRC(contrast_stretch(RasterImage(1, 1, 1), 0.9, 0.1), Errc::kBadLimits);
}

TEST_CASE("bicubic resize to the same size is the identity") {
  std::mt19937_64 gen(1);
  const auto img = random_image(gen, 7, 5, 3);
  const auto out = bicubic_resize(img, 7, 5);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    CHECK(std::fabs(out.pixels[i] - img.pixels[i]) < 1e-6);
  }
}

TEST_CASE("bicubic resize keeps constants") {
  const auto out = bicubic_resize(RasterImage(6, 6, 1, 0.42f), 11, 3);
  CHECK(out.width == 11);
  CHECK(out.height == 3);
  for (float v : out.pixels) CHECK(v == doctest::Approx(0.42f).epsilon(1e-6));
}

TEST_CASE("bicubic 4x4 ramp to 2x2 matches the kernel-sum oracle") {
  RasterImage ramp(4, 4, 1);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) ramp.at(y, x, 0) = static_cast<float>(x + 4 * y) / 15.0f;
  }
  const auto out = bicubic_resize(ramp, 2, 2);
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 2; ++x) {
      CHECK(out.at(y, x, 0) == doctest::Approx(oracle::bicubic_at(ramp, 2, 2, x, y, 0)).epsilon(1e-6));
    }
  }
}

TEST_CASE("bicubic resize matches the oracle on random images") {
  std::mt19937_64 gen(2);
  const auto img = random_image(gen, 9, 6, 3);
  const auto out = bicubic_resize(img, 5, 13);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        CHECK(std::fabs(out.at(y, x, c) - oracle::bicubic_at(img, 5, 13, x, y, c)) < 1e-5);
      }
    }
  }
}

TEST_CASE("horizontal flip") {
  RasterImage two(2, 1, 1);
  two.pixels = {0.1f, 0.9f};
  CHECK(horizontal_flip(two).pixels == std::vector<float>{0.9f, 0.1f});
  RasterImage column(1, 3, 1);
  column.pixels = {0.1f, 0.2f, 0.3f};
  CHECK(horizontal_flip(column) == column);
  std::mt19937_64 gen(4);
  const auto img = random_image(gen, 5, 4, 3);
  CHECK(horizontal_flip(horizontal_flip(img)) == img);
}

TEST_CASE("grayscale uses BT.601 weights") {
  RasterImage px(1, 1, 3);
  px.pixels = {1, 1, 1};
  CHECK(to_grayscale(px).pixels[0] == doctest::Approx(1.0));
  px.pixels = {1, 0, 0};
  CHECK(to_grayscale(px).pixels[0] == doctest::Approx(0.299));
  px.pixels = {0.37f, 0.37f, 0.37f};
  CHECK(std::fabs(to_grayscale(px).pixels[0] - 0.37f) < 1e-6);
  CHECK_ERRC(to_grayscale(RasterImage(1, 1, 1)), Errc::kAlreadyGray);
}

TEST_CASE("augment_set quadruples in a fixed variant order") {
  std::mt19937_64 gen(6);
  std::vector<RasterImage> imgs;
  for (int i = 0; i < 10; ++i) imgs.push_back(random_image(gen, 8, 6, 3));
  const auto out = augment_set(imgs, false);
  REQUIRE(out.size() == 40);
  CHECK(out[0] == imgs[0]);
  CHECK(out[10] == contrast_stretch(imgs[0], kContrastLo, kContrastHi));
  CHECK(out[20] == bicubic_resize(imgs[0], 4, 3));
  CHECK(out[30] == horizontal_flip(imgs[0]));
  CHECK(augment_set({}, false).empty());

  const auto gray = augment_set(imgs, true);
  REQUIRE(gray.size() == 40);
  for (const auto& g : gray) CHECK(g.channels == 1);
}

TEST_CASE("PNG round trip keeps 8-bit values") {
  testing::TempDir dir;
  RasterImage img(3, 2, 3);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    img.pixels[i] = static_cast<float>(i * 13 % 256) / 255.0f;
  }
  write_png(img, dir / "a.png");
  const auto back = read_png(dir / "a.png");
  REQUIRE(back.width == 3);
  REQUIRE(back.channels == 3);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    CHECK(back.pixels[i] == doctest::Approx(img.pixels[i]).epsilon(1e-6));
  }
  CHECK_ERRC(read_png(dir / "missing.png"), Errc::kMissingFile);
}

}  // namespace castid
