#pragma once

#include <cmath>
#include <cstddef>

namespace entperc {

// Running mean and variance (Welford). Adding samples in a fixed order gives
// bit-identical results.
struct Welford {
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;

  void add(double x) noexcept {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }

  double variance() const noexcept { return n < 2 ? 0.0 : m2 / static_cast<double>(n - 1); }
  double std_error() const noexcept { return n < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(n)); }
};

}  // namespace entperc
