// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef CASTID_SVM_HPP_
#define CASTID_SVM_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace castid {

/// Row-major feature matrix with one class label per row.
struct LabeledSet {
  std::size_t dim = 0;
  std::vector<float> features;
  std::vector<std::string> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const float> row(std::size_t i) const {
    return {features.data() + i * dim, dim};
  }
  void add(std::span<const float> x, std::string label);
};

struct TrainConfig {
  std::vector<double> lambda_grid{1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  int epochs = 200;
  std::uint64_t seed = 0;
  double tolerance = 1e-6;
};

struct SvmModel {
  std::vector<std::string> classes;            // sorted
  std::vector<std::vector<double>> weights;    // per class, dim entries
  std::vector<double> biases;
  double lambda = 0.0;

  std::size_t dim() const { return weights.empty() ? 0 : weights.front().size(); }
};

// One binary problem of the one-vs-rest decomposition.
//
// Minimizes (lambda/2)||w~||^2 + (1/n) sum_i max(0, 1 - s_i w~.x~_i) where
// x~ = [x, 1] so the bias is the last (regularized) weight. Solved through
// the box-constrained dual with C = 1 / (lambda n) by exact coordinate
// minimization, sweeping coordinates in one seeded permutation every epoch.
// Each step cannot increase the dual objective.
struct BinarySolution {
  std::vector<double> weights;  // dim + 1, bias last
  std::vector<double> dual_history;  // 0.5||w||^2 - sum(alpha) after each epoch
  int epochs_run = 0;
  bool converged = false;
};

BinarySolution train_binary(const LabeledSet& data, std::span<const int> signs,
                            double lambda, int epochs, double tolerance,
                            std::uint64_t seed);

// (lambda/2)||w~||^2 + mean hinge, with w~ holding the bias last.
double primal_objective(const LabeledSet& data, std::span<const int> signs,
                        std::span<const double> weights, double lambda);

struct TrainDiagnostics {
  // Per class of the selected model, in model.classes order.
  std::vector<BinarySolution> solutions;
  // Validation accuracy for each grid value tried (empty without val).
  std::vector<double> val_accuracy;
};

// One-vs-rest training. With a non-empty validation set every lambda in the
// grid is tried and the most accurate wins (ties go to the smaller lambda);
// otherwise the smallest grid value is used. Throws SingleClass, EmptyClass
// or DimMismatch.
SvmModel train_ovr(const LabeledSet& train, const TrainConfig& config,
                   const LabeledSet* val = nullptr,
                   TrainDiagnostics* diagnostics = nullptr);

std::vector<double> score(const SvmModel& model, std::span<const float> x);

struct Prediction {
  std::string label;
  double confidence = 0.0;
};

// Argmax over score(); equal scores resolve to the lexicographically
// smallest class name.
Prediction predict(const SvmModel& model, std::span<const float> x);

double accuracy_on(const SvmModel& model, const LabeledSet& data);

void save_model(const SvmModel& model, const std::filesystem::path& path);
SvmModel load_model(const std::filesystem::path& path);

}  // namespace castid

#endif  // CASTID_SVM_HPP_
