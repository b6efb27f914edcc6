// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef CASTID_SELECTION_HPP_
#define CASTID_SELECTION_HPP_

#include <string>
#include <vector>

namespace castid {

struct RankedPrediction {
  std::string item_id;
  std::string predicted_class;
  double confidence = 0.0;
};

// Descending confidence; equal confidences in ascending item_id order.
std::vector<RankedPrediction> rank_items(std::vector<RankedPrediction> predictions);

struct Selection {
  std::vector<RankedPrediction> confident;
  std::vector<RankedPrediction> remainder;
};

// Number of items kept for a given fraction: ceil(fraction * n).
std::size_t confident_count(std::size_t n, double fraction);

// Splits an already-ranked list after its first ceil(fraction * n) items.
// Throws BadFraction unless 0 < fraction <= 1.
Selection select_top_fraction(const std::vector<RankedPrediction>& ranked,
                              double fraction);

}  // namespace castid

#endif  // CASTID_SELECTION_HPP_
