// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "castid/selection.hpp"

#include <algorithm>
#include <cmath>

#include "castid/error.hpp"

namespace castid {

std::vector<RankedPrediction> rank_items(std::vector<RankedPrediction> predictions) {
  std::stable_sort(predictions.begin(), predictions.end(),
                   [](const RankedPrediction& a, const RankedPrediction& b) {
                     if (a.confidence != b.confidence) return a.confidence > b.confidence;
                     return a.item_id < b.item_id;
                   });
  return predictions;
}

std::size_t confident_count(std::size_t n, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(Errc::kBadFraction, "fraction " + std::to_string(fraction) +
                                        " outside (0, 1]");
  }
  // The epsilon absorbs representation error, e.g. 0.8 * 10 = 8.000...002.
  const double exact = fraction * static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
  return std::min(k, n);
}

Selection select_top_fraction(const std::vector<RankedPrediction>& ranked,
                              double fraction) {
  const std::size_t k = confident_count(ranked.size(), fraction);
  Selection s;
  s.confident.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k));
  s.remainder.assign(ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end());
  return s;
}

}  // namespace castid
