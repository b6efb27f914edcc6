// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "castid/svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <numeric>

#include "castid/error.hpp"
#include "castid/rng.hpp"

namespace castid {

void LabeledSet::add(std::span<const float> x, std::string label) {
  if (labels.empty() && features.empty() && dim == 0) dim = x.size();
  if (x.size() != dim) {
    throw Error(Errc::kDimMismatch, "example of dim " + std::to_string(x.size()) +
                                        ", set has " + std::to_string(dim));
  }
  features.insert(features.end(), x.begin(), x.end());
  labels.push_back(std::move(label));
}

namespace {

double dot_aug(std::span<const double> w, std::span<const float> x) {
  double s = w[x.size()];  // bias feature is 1
  for (std::size_t d = 0; d < x.size(); ++d) s += w[d] * x[d];
  return s;
}

}  // namespace

BinarySolution train_binary(const LabeledSet& data, std::span<const int> signs,
                            double lambda, int epochs, double tolerance,
                            std::uint64_t seed) {
  const std::size_t n = data.size();
  const std::size_t dim = data.dim;
  if (signs.size() != n) {
    throw Error(Errc::kPreconditionViolation, "one sign per example required");
  }
  if (!(lambda > 0.0)) throw Error(Errc::kPreconditionViolation, "lambda must be > 0");

  BinarySolution sol;
  sol.weights.assign(dim + 1, 0.0);
  if (n == 0) {
    sol.converged = true;
    return sol;
  }
  const double upper = 1.0 / (lambda * static_cast<double>(n));

  std::vector<double> qd(n);
  for (std::size_t i = 0; i < n; ++i) {
    double q = 1.0;
    for (float v : data.row(i)) q += static_cast<double>(v) * v;
    qd[i] = q;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<double> alpha(n, 0.0);
  auto& w = sol.weights;
  double alpha_sum = 0.0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    double pg_max = -HUGE_VAL;
    double pg_min = HUGE_VAL;
    for (std::size_t i : order) {
      const auto x = data.row(i);
      const double s = signs[i];
      const double g = s * dot_aug(w, x) - 1.0;
      double pg = g;
      if (alpha[i] == 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha[i] == upper) {
        pg = std::max(g, 0.0);
      }
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (std::abs(pg) > 1e-12) {
        const double old = alpha[i];
        alpha[i] = std::min(std::max(old - g / qd[i], 0.0), upper);
        const double delta = (alpha[i] - old) * s;
        for (std::size_t d = 0; d < dim; ++d) w[d] += delta * x[d];
        w[dim] += delta;
        alpha_sum += alpha[i] - old;
      }
    }
    double wsq = 0.0;
    for (double v : w) wsq += v * v;
    sol.dual_history.push_back(0.5 * wsq - alpha_sum);
    sol.epochs_run = epoch + 1;
    if (pg_max - pg_min <= tolerance) {
      sol.converged = true;
      break;
    }
  }
  return sol;
}

double primal_objective(const LabeledSet& data, std::span<const int> signs,
                        std::span<const double> weights, double lambda) {
  double wsq = 0.0;
  for (double v : weights) wsq += v * v;
  double loss = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    loss += std::max(0.0, 1.0 - signs[i] * dot_aug(weights, data.row(i)));
  }
  const double n = static_cast<double>(std::max<std::size_t>(data.size(), 1));
  return 0.5 * lambda * wsq + loss / n;
}

namespace {

std::vector<std::string> class_list(const LabeledSet& train) {
  std::vector<std::string> classes = train.labels;
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  return classes;
}

SvmModel fit(const LabeledSet& train, const std::vector<std::string>& classes,
             double lambda, const TrainConfig& config,
             std::vector<BinarySolution>* solutions) {
  SvmModel model;
  model.classes = classes;
  model.lambda = lambda;
  std::vector<int> signs(train.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (std::size_t i = 0; i < train.size(); ++i) {
      signs[i] = train.labels[i] == classes[c] ? 1 : -1;
    }
    BinarySolution sol = train_binary(train, signs, lambda, config.epochs,
                                      config.tolerance, config.seed);
    model.biases.push_back(sol.weights.back());
    model.weights.emplace_back(sol.weights.begin(), sol.weights.end() - 1);
    if (solutions) solutions->push_back(std::move(sol));
  }
  return model;
}

}  // namespace

SvmModel train_ovr(const LabeledSet& train, const TrainConfig& config,
                   const LabeledSet* val, TrainDiagnostics* diagnostics) {
  if (config.lambda_grid.empty()) {
    throw Error(Errc::kPreconditionViolation, "empty lambda grid");
  }
  if (config.epochs < 1) throw Error(Errc::kPreconditionViolation, "epochs must be >= 1");
  if (train.size() == 0) throw Error(Errc::kEmptyClass, "no training examples");
  if (train.features.size() != train.size() * train.dim) {
    throw Error(Errc::kDimMismatch, "feature matrix does not match label count");
  }
  for (float v : train.features) {
    if (!std::isfinite(v)) throw Error(Errc::kNonFiniteValue, "training feature");
  }
  const auto classes = class_list(train);
  if (classes.size() < 2) {
    throw Error(Errc::kSingleClass, "only class '" + classes.front() + "' present");
  }
  for (const auto& c : classes) {
    if (c.empty()) throw Error(Errc::kEmptyClass, "empty class name");
  }
  if (val && val->size() > 0 && val->dim != train.dim) {
    throw Error(Errc::kDimMismatch, "validation dim " + std::to_string(val->dim) +
                                        " vs training dim " + std::to_string(train.dim));
  }

  std::vector<double> grid = config.lambda_grid;
  std::sort(grid.begin(), grid.end());
  for (double l : grid) {
    if (!(l > 0.0)) throw Error(Errc::kPreconditionViolation, "lambda must be > 0");
  }

  std::vector<BinarySolution>* solutions = diagnostics ? &diagnostics->solutions : nullptr;
  if (!val || val->size() == 0 || grid.size() == 1) {
    return fit(train, classes, grid.front(), config, solutions);
  }

  SvmModel best;
  double best_acc = -1.0;
  std::vector<BinarySolution> best_solutions;
  for (double lambda : grid) {
    std::vector<BinarySolution> sols;
    SvmModel m = fit(train, classes, lambda, config, solutions ? &sols : nullptr);
    const double acc = accuracy_on(m, *val);
    if (diagnostics) diagnostics->val_accuracy.push_back(acc);
    if (acc > best_acc) {
      best_acc = acc;
      best = std::move(m);
      best_solutions = std::move(sols);
    }
  }
  if (solutions) *solutions = std::move(best_solutions);
  return best;
}

std::vector<double> score(const SvmModel& model, std::span<const float> x) {
  if (x.size() != model.dim()) {
    throw Error(Errc::kDimMismatch, "input dim " + std::to_string(x.size()) +
                                        ", model dim " + std::to_string(model.dim()));
  }
  std::vector<double> out(model.classes.size());
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    double s = model.biases[c];
    const auto& w = model.weights[c];
    for (std::size_t d = 0; d < x.size(); ++d) s += w[d] * x[d];
    out[c] = s;
  }
  return out;
}

Prediction predict(const SvmModel& model, std::span<const float> x) {
  const auto s = score(model, x);
  if (s.empty()) throw Error(Errc::kPreconditionViolation, "model has no classes");
  std::size_t best = 0;
  for (std::size_t c = 1; c < s.size(); ++c) {
    if (s[c] > s[best] || (s[c] == s[best] && model.classes[c] < model.classes[best])) {
      best = c;
    }
  }
  return {model.classes[best], s[best]};
}

double accuracy_on(const SvmModel& model, const LabeledSet& data) {
  if (data.size() == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (predict(model, data.row(i)).label == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

// --- CMSV -------------------------------------------------------------------

void save_model(const SvmModel& model, const std::filesystem::path& path) {
  std::string out = "CMSV";
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  auto f32 = [&](double d) {
    float f = static_cast<float>(d);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    u32(bits);
  };
  u32(1);
  u32(static_cast<std::uint32_t>(model.classes.size()));
  u32(static_cast<std::uint32_t>(model.dim()));
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    const auto& name = model.classes[c];
    if (name.size() > 0xffff) throw Error(Errc::kPreconditionViolation, "class name too long");
    out.push_back(static_cast<char>(name.size() & 0xff));
    out.push_back(static_cast<char>(name.size() >> 8));
    out += name;
    for (double w : model.weights[c]) f32(w);
    f32(model.biases[c]);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::kIoError, "cannot open " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error(Errc::kIoError, "write failed for " + path.string());
}

SvmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kMissingFile, path.string());
  const std::string buf(std::istreambuf_iterator<char>(in), {});
  std::size_t pos = 0;
  auto need = [&](std::size_t k) {
    if (pos + k > buf.size()) throw Error(Errc::kTruncatedFile, path.string());
  };
  auto u32 = [&]() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    }
    pos += 4;
    return v;
  };
  need(4);
  if (buf.compare(0, 4, "CMSV") != 0) throw Error(Errc::kBadMagic, path.string());
  pos = 4;
  if (u32() != 1) throw Error(Errc::kUnsupportedVersion, path.string());
  const std::uint32_t n_classes = u32();
  const std::uint32_t dim = u32();
  SvmModel model;
  for (std::uint32_t c = 0; c < n_classes; ++c) {
    need(2);
    std::size_t len = static_cast<unsigned char>(buf[pos]) |
                      (static_cast<unsigned char>(buf[pos + 1]) << 8);
    pos += 2;
    need(len);
    model.classes.push_back(buf.substr(pos, len));
    pos += len;
    std::vector<double> w(dim);
    for (auto& v : w) {
      std::uint32_t bits = u32();
      float f;
      std::memcpy(&f, &bits, 4);
      v = f;
    }
    std::uint32_t bits = u32();
    float b;
    std::memcpy(&b, &bits, 4);
    model.weights.push_back(std::move(w));
    model.biases.push_back(b);
  }
  if (pos != buf.size()) throw Error(Errc::kParseError, path.string() + ": trailing bytes");
  return model;
}

}  // namespace castid
