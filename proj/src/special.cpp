#include "entperc/special.hpp"

#include <cmath>
#include <numbers>

namespace entperc {

namespace {

constexpr double kSeriesLimit = 15.0;

double i0_series(double z) noexcept {
  const double q = 0.25 * z * z;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

// e^{-z} I0(z) ~ (2 pi z)^{-1/2} sum_k ((2k-1)!!)^2 / (k! (8z)^k)
double i0_scaled_asymptotic(double z) noexcept {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * odd * odd / (8.0 * k * z);
    if (next >= term) break;  // series starts diverging
    term = next;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * z);
}

}  // namespace

double bessel_i0_scaled(double z) noexcept {
  const double a = std::abs(z);
  if (a < kSeriesLimit) return i0_series(a) * std::exp(-a);
  return i0_scaled_asymptotic(a);
}

double bessel_i0(double z) noexcept {
  const double a = std::abs(z);
  if (a < kSeriesLimit) return i0_series(a);
  return i0_scaled_asymptotic(a) * std::exp(a);
}

}  // namespace entperc
