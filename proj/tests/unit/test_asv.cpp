// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <algorithm>
#include <random>

#include "castid/asv.hpp"
#include "error_matchers.hpp"
#include "temp_dir.hpp"

namespace castid {
namespace {

TrackRecord scored(const std::string& id, std::vector<double> scores) {
  TrackRecord t;
  t.track_id = id;
  t.n_frames = static_cast<std::uint32_t>(scores.size());
  t.asv_scores = std::move(scores);
  return t;
}

}  // namespace

TEST_CASE("median filter") {
  const std::vector<double> x{0.3, 0.9, 0.1, 0.5};
  CHECK(median_filter(x, 1) == x);
  CHECK(median_filter({0, 10, 0}, 3) == std::vector<double>{0, 0, 0});
  CHECK(median_filter({2, 2, 2, 2}, 5) == std::vector<double>{2, 2, 2, 2});
  CHECK(median_filter({1, 5, 2, 8, 3}, 3) == std::vector<double>{1, 2, 5, 3, 3});
  CHECK_ERRC(median_filter(x, 4), Errc::kEvenWindow);
}

TEST_CASE("median filter agrees with a brute-force clamped window") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u;
  std::vector<double> x(57);
  for (auto& v : x) v = u(gen);
  for (int w : {3, 5, 9}) {
    const auto got = median_filter(x, w);
    for (int i = 0; i < static_cast<int>(x.size()); ++i) {
      std::vector<double> win;
      for (int k = i - w / 2; k <= i + w / 2; ++k) {
        win.push_back(x[std::clamp(k, 0, static_cast<int>(x.size()) - 1)]);
      }
      std::sort(win.begin(), win.end());
      CHECK(got[i] == win[w / 2]);
    }
  }
}

TEST_CASE("gate keeps only long tracks speaking throughout") {
  GateConfig cfg;
  const auto seg = gate_speaking_tracks({scored("long", std::vector<double>(60, 0.9))}, cfg);
  REQUIRE(seg.size() == 1);
  CHECK(seg[0].segment_id == segment_id_for("long"));
  CHECK(seg[0].track_id == "long");
  CHECK(seg[0].duration_s == doctest::Approx(2.4));

  CHECK(gate_speaking_tracks({scored("short", std::vector<double>(49, 1.0))}, cfg).empty());
  CHECK(gate_speaking_tracks({scored("edge", std::vector<double>(50, 1.0))}, cfg).size() == 1);

  // A dip wider than half the window survives filtering.
  std::vector<double> dip(60, 0.9);
  std::fill(dip.begin() + 20, dip.begin() + 30, 0.1);
  CHECK(gate_speaking_tracks({scored("dip", dip)}, cfg).empty());

  // A single-frame dip is removed by the median filter.
  std::vector<double> blip(60, 0.9);
  blip[30] = 0.0;
  CHECK(gate_speaking_tracks({scored("blip", blip)}, cfg).size() == 1);

  TrackRecord none;
  none.track_id = "none";
  none.n_frames = 60;
  CHECK_ERRC(gate_speaking_tracks({none}, cfg), Errc::kMissingAsvScores);
}

TEST_CASE("segment manifest CSV") {
  testing::TempDir dir;
  const auto seg = gate_speaking_tracks({scored("t1", std::vector<double>(75, 0.8))}, GateConfig{});
  write_segment_manifest(seg, dir / "s.csv");
  CHECK(testing::read_text(dir / "s.csv") ==
        "segment_id,track_id,duration_s\n" + segment_id_for("t1") + ",t1,3\n");
}

}  // namespace castid
