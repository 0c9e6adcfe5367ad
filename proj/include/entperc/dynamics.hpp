#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

namespace entperc {

// Amplitudes Psi_ij of sum_ij Psi_ij |i>|j>, row-major {00, 01, 10, 11}.
struct TwoQubitState {
  std::array<std::complex<double>, 4> amplitudes{};

  double norm_squared() const noexcept;
  std::complex<double> det() const noexcept { return amplitudes[0] * amplitudes[3] - amplitudes[1] * amplitudes[2]; }
};

// State of an edge initialised in |00> after evolving for time t under
// (omega/2) sigma_x (x) sigma_x: cos(omega t/2)|00> - i sin(omega t/2)|11>.
TwoQubitState edge_state(double omega, double t) noexcept;

// Largest Schmidt coefficient (1 + sqrt(1 - 4|det Psi|^2)) / 2, in [1/2, 1].
// Throws DomainError unless the state is normalised within 1e-12.
double schmidt_lambda(const TwoQubitState& state);

// Optimal singlet-conversion probability min{1, 2(1 - lambda)}.
double conversion_probability_from_lambda(double lambda) noexcept;

// 1 - |cos(omega t)|: probability that the edge is active at time t.
inline double conversion_probability(double omega, double t) noexcept {
  return 1.0 - std::abs(std::cos(omega * t));
}

// Expected active fraction for two-valued frequencies.
double p_bernoulli(double t, double eta, double omega1, double omega2);

inline constexpr int kDefaultSeriesTerms = 100;

// Fourier-series expected active fraction for Gaussian frequencies:
//   1 - 2/pi + (4/pi) sum_{k=1}^{k_max} (-1)^k/(4k^2-1) cos(2 Omega k t) exp(-2 sigma^2 t^2 k^2).
// Truncation error is at most 4 / (pi (4 k_max^2 - 1)) in magnitude.
double p_gaussian(double t, double mean, double stddev, int k_max = kDefaultSeriesTerms);

// Leading-order form 1 - 2/pi - (4/(3 pi)) cos(2 Omega t) exp(-2 sigma^2 t^2).
// Only meaningful once sigma t is of order one; at t = 0 it is negative.
double p_asymptotic_gaussian(double t, double mean, double stddev) noexcept;

inline constexpr double kAsymptoticActiveFraction = 1.0 - 2.0 / 3.14159265358979323846;

// Frequency distribution for the quadrature route: a continuous density on
// [lower, upper] plus optional point masses.
struct FrequencyDensity {
  struct Atom {
    double value;
    double weight;
  };
  std::function<double(double)> pdf;
  double lower = 0.0;
  double upper = 0.0;
  std::vector<Atom> atoms;
};

FrequencyDensity gaussian_density(double mean, double stddev);
FrequencyDensity two_point_density(double eta, double omega1, double omega2);
FrequencyDensity uniform_density(double lo, double hi);

// 1 - integral P(x) |cos(x t)| dx by adaptive Gauss-Kronrod quadrature on
// sub-intervals split at the kinks of |cos(x t)|.
// Throws DomainError if the density does not integrate to 1 within tolerance.
double p_numeric(const FrequencyDensity& density, double t, double tolerance = 1e-10);

// Period m*pi/omega1 of p(t) when omega2/omega1 = l/m in lowest terms, found
// by continued-fraction expansion (denominators capped at 1e6, match within
// four ulps of the ratio). std::nullopt means quasi-periodic.
std::optional<double> bernoulli_period(double omega1, double omega2);

// Rational approximation used by bernoulli_period.
struct Fraction {
  long long num;
  long long den;
};
std::optional<Fraction> rational_approximation(double x, long long max_den = 1'000'000);

// Smallest t in (0, t_max] where both 1-|cos t| and 1-|cos(ratio t)| equal 1/2
// (within `tol`), found by bisection on the roots of the first curve.
std::optional<double> half_half_crossing(double ratio, double t_max, double tol = 1e-9);

}  // namespace entperc
