// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef CASTID_RNG_HPP_
#define CASTID_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>
#include <vector>

namespace castid {

// Portable random source. The raw engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; the standard distributions are not,
// so every derived draw is defined here explicitly. Any implementation that
// reproduces these few lines reproduces our simulated episodes bit for bit.
class Rng {
 public:
  static constexpr std::string_view kDescription =
      "mt19937_64 (ISO C++ std::mt19937_64, default constants); "
      "uniform = (next >> 11) * 2^-53; "
      "normal = Box-Muller cos branch with u1 = 1 - uniform, u2 = uniform; "
      "below(n) = floor(uniform * n); "
      "shuffle = Fisher-Yates from the back using below(i + 1)";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // [0, 1)
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // [0, n)
  std::size_t below(std::size_t n) {
    auto k = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return k < n ? k : n - 1;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace castid

#endif  // CASTID_RNG_HPP_
