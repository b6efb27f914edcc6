// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>
#include <random>

#include "castid/eval.hpp"
#include "error_matchers.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

namespace castid {
namespace {

struct Instance {
  std::vector<ScoredLabel> labels;
  std::vector<GroundTruthRow> gt;
};

Instance random_instance(std::mt19937_64& gen, std::size_t n, bool distinct) {
  Instance in;
  std::uniform_int_distribution<int> ch(0, 2);
  std::uniform_int_distribution<int> coarse(0, 3);
  std::uniform_real_distribution<double> u;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = "t" + std::to_string(i);
    in.gt.push_back({id, "c" + std::to_string(ch(gen))});
    const double conf = distinct ? u(gen) : 0.25 * coarse(gen);
    in.labels.push_back({id, "c" + std::to_string(ch(gen)), conf});
  }
  return in;
}

}  // namespace

TEST_CASE("accuracy") {
  std::vector<GroundTruthRow> gt{{"a", "X"}, {"b", "Y"}, {"c", "X"}, {"d", "Z"}};
  std::vector<ScoredLabel> all{{"a", "X", 1}, {"b", "Y", 1}, {"c", "X", 1}, {"d", "Z", 1}};
  CHECK(accuracy(all, gt) == 1.0);
  all[3].character = "X";
  CHECK(accuracy(all, gt) == 0.75);
  all.pop_back();
  CHECK_ERRC(accuracy(all, gt), Errc::kMissingPrediction);

  std::mt19937_64 gen(2);
  for (int k = 0; k < 50; ++k) {
    const auto in = random_instance(gen, 1 + gen() % 20, true);
    CHECK(accuracy(in.labels, in.gt) == oracle::recount_accuracy(in.labels, in.gt));
  }
}

TEST_CASE("pr curve hand cases") {
  std::vector<GroundTruthRow> gt{{"a", "X"}, {"b", "Y"}};
  std::vector<ScoredLabel> labels{{"a", "Y", 0.9}, {"b", "Y", 0.4}};
  const auto pr = pr_curve(labels, gt);
  REQUIRE(pr.size() == 2);
  CHECK(pr[0].recall == 0.5);
  CHECK(pr[0].precision == 0.0);
  CHECK(pr[1].recall == 1.0);
  CHECK(pr[1].precision == 0.5);
  CHECK(average_precision(pr) == 0.25);

  const auto single = pr_curve({{"a", "X", 0.3}}, {{"a", "X"}});
  REQUIRE(single.size() == 1);
  CHECK(single[0].recall == 1.0);
  CHECK(single[0].precision == 1.0);
  CHECK(average_precision(single) == 1.0);

  CHECK_ERRC(average_precision({}), Errc::kEmptyCurve);
}

TEST_CASE("ties enter the predicted set together") {
  std::vector<GroundTruthRow> gt{{"a", "X"}, {"b", "X"}, {"c", "X"}};
  std::vector<ScoredLabel> labels{{"a", "X", 0.5}, {"b", "Y", 0.5}, {"c", "X", 0.1}};
  const auto pr = pr_curve(labels, gt);
  REQUIRE(pr.size() == 2);
  CHECK(pr[0].threshold == 0.5);
  CHECK(pr[0].recall == doctest::Approx(2.0 / 3.0));
  CHECK(pr[0].precision == 0.5);
}

TEST_CASE("AP equals exhaustive enumeration, precision at full recall equals accuracy") {
  std::mt19937_64 gen(4);
  for (int k = 0; k < 200; ++k) {
    const auto in = random_instance(gen, 1 + gen() % 10, k % 2 == 0);
    const auto pr = pr_curve(in.labels, in.gt);
    CHECK(average_precision(pr) == doctest::Approx(oracle::ap_by_enumeration(in.labels, in.gt)).epsilon(1e-12));
    CHECK(pr.back().recall == 1.0);
    CHECK(pr.back().precision == doctest::Approx(accuracy(in.labels, in.gt)).epsilon(1e-15));
    for (std::size_t i = 1; i < pr.size(); ++i) CHECK(pr[i].recall > pr[i - 1].recall);
  }
}

TEST_CASE("AP is invariant under strictly monotone transforms") {
  std::mt19937_64 gen(6);
  for (int k = 0; k < 50; ++k) {
    auto in = random_instance(gen, 2 + gen() % 8, true);
    const double ap = average_precision(pr_curve(in.labels, in.gt));
    for (auto& l : in.labels) l.confidence = std::exp(3.0 * l.confidence) - 7.0;
    CHECK(average_precision(pr_curve(in.labels, in.gt)) == doctest::Approx(ap).epsilon(1e-12));
  }
}

TEST_CASE("per-character report") {
  std::vector<GroundTruthRow> gt{{"a", "X"}, {"b", "X"}, {"c", "Y"}};
  std::vector<ScoredLabel> labels{{"a", "X", 1}, {"b", "Y", 1}, {"c", "X", 1}};
  const auto r = per_character_report(labels, gt);
  REQUIRE(r.size() == 2);
  CHECK(r.at("X").n_tracks == 2);
  CHECK(r.at("X").accuracy == 0.5);
  CHECK(r.at("Y").accuracy == 0.0);

  std::vector<GroundTruthRow> solo{{"a", "X"}, {"b", "X"}};
  std::vector<ScoredLabel> solo_labels{{"a", "X", 1}, {"b", "Z", 1}};
  const auto s = per_character_report(solo_labels, solo);
  REQUIRE(s.size() == 1);
  CHECK(s.at("X").accuracy == accuracy(solo_labels, solo));
}

TEST_CASE("evaluate_files writes report and PR CSV, excludes background") {
  testing::TempDir dir;
  testing::write_text(dir / "labels.csv",
                      "track_id,character,confidence,provenance,confident\n"
                      "a,Y,0.9,stage2,1\nb,Y,0.4,stage3,0\nc,,0,background,0\n");
  testing::write_text(dir / "gt.csv", "track_id,character\na,X\nb,Y\nc,background\n");
  const EvalReport r = evaluate_files(dir / "labels.csv", dir / "gt.csv", dir / "out");
  CHECK(r.accuracy == 0.5);
  CHECK(r.average_precision == 0.25);
  CHECK(r.n_tracks == 2);
  CHECK(r.n_excluded == 1);
  CHECK(testing::read_text(dir / "out" / "pr.csv") ==
        "threshold,recall,precision\n0.9,0.5,0\n0.4,1,0.5\n");
  const auto j = nlohmann::json::parse(testing::read_text(dir / "out" / "report.json"));
  CHECK(j.at("accuracy").get<double>() == 0.5);
  CHECK(j.at("average_precision").get<double>() == 0.25);

  testing::write_text(dir / "gt2.csv", "track_id,character\nz,X\n");
  CHECK_ERRC(evaluate_files(dir / "labels.csv", dir / "gt2.csv", dir / "out"),
             Errc::kMissingPrediction);
}

}  // namespace castid
