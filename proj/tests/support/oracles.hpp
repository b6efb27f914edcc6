// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef CASTID_TESTS_ORACLES_HPP_
#define CASTID_TESTS_ORACLES_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "castid/eval.hpp"
#include "castid/imageops.hpp"
#include "castid/svm.hpp"

// Straightforward reference implementations used to check the library.
// None of them shares code with the code under test.
namespace castid::oracle {

struct ReferenceSvm {
  std::vector<double> weights;  // dim + 1, bias last
  double primal = 0.0;
  double gap = 0.0;
  long iterations = 0;
};

// Accelerated projected gradient on the box-constrained dual of
// (lambda/2)||w~||^2 + mean hinge, stopped on a primal-dual gap of `tol`
// (measured on the primal objective scale).
ReferenceSvm reference_svm(const LabeledSet& data, std::span<const int> signs,
                           double lambda, double tol, long max_iter = 20'000'000);

// Primal objective evaluated in long double.
long double primal_ld(const LabeledSet& data, std::span<const int> signs,
                      std::span<const double> weights, double lambda);

// |DFT| of a zero-padded windowed frame, bins 1..n_fft/2, by direct summation.
std::vector<double> dft_magnitudes(std::span<const double> frame, std::size_t n_fft);

// Catmull-Rom resampling of one output pixel written as an explicit 4x4
// kernel sum.
double bicubic_at(const RasterImage& img, int out_w, int out_h, int ox, int oy, int c);

// Sum in long double, then normalize.
std::vector<double> pool_ld(const std::vector<std::vector<float>>& frames);

// AP by enumerating every threshold directly over the tracks.
double ap_by_enumeration(const std::vector<ScoredLabel>& labels,
                         const std::vector<GroundTruthRow>& gt);

// Fraction of matching rows, recounted.
double recount_accuracy(const std::vector<ScoredLabel>& labels,
                        const std::vector<GroundTruthRow>& gt);

// Random linearly separable problem with a margin, labels "neg"/"pos".
struct ToyProblem {
  LabeledSet data;
  std::vector<int> signs;
};
ToyProblem separable_problem(std::uint64_t seed, std::size_t n, std::size_t dim,
                             double margin = 0.1);

}  // namespace castid::oracle

#endif  // CASTID_TESTS_ORACLES_HPP_
