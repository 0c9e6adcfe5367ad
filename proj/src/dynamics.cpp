#include "entperc/dynamics.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>

#include "entperc/errors.hpp"

namespace entperc {

using std::numbers::pi;

double TwoQubitState::norm_squared() const noexcept {
  double s = 0.0;
  for (const auto& a : amplitudes) s += std::norm(a);
  return s;
}

TwoQubitState edge_state(double omega, double t) noexcept {
  TwoQubitState s;
  s.amplitudes[0] = std::cos(0.5 * omega * t);
  s.amplitudes[3] = std::complex<double>(0.0, -std::sin(0.5 * omega * t));
  return s;
}

double schmidt_lambda(const TwoQubitState& state) {
  if (std::abs(state.norm_squared() - 1.0) > 1e-12) throw DomainError("two-qubit state is not normalised");
  const double det2 = std::norm(state.det());
  const double disc = std::max(0.0, 1.0 - 4.0 * det2);
  return 0.5 * (1.0 + std::sqrt(disc));
}

double conversion_probability_from_lambda(double lambda) noexcept { return std::min(1.0, 2.0 * (1.0 - lambda)); }

double p_bernoulli(double t, double eta, double omega1, double omega2) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("eta must lie in [0, 1]");
  return 1.0 - eta * std::abs(std::cos(omega1 * t)) - (1.0 - eta) * std::abs(std::cos(omega2 * t));
}

double p_gaussian(double t, double mean, double stddev, int k_max) {
  if (k_max < 1) throw DomainError("series truncation k_max must be >= 1");
  const double s2t2 = 2.0 * stddev * stddev * t * t;
  double sum = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    const double kk = static_cast<double>(k);
    const double damping = std::exp(-s2t2 * kk * kk);
    if (damping == 0.0) break;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    sum += sign / (4.0 * kk * kk - 1.0) * std::cos(2.0 * mean * kk * t) * damping;
  }
  return 1.0 - 2.0 / pi + 4.0 / pi * sum;
}

double p_asymptotic_gaussian(double t, double mean, double stddev) noexcept {
  return 1.0 - 2.0 / pi - 4.0 / (3.0 * pi) * std::cos(2.0 * mean * t) * std::exp(-2.0 * stddev * stddev * t * t);
}

FrequencyDensity gaussian_density(double mean, double stddev) {
  if (!(stddev > 0.0)) throw DomainError("gaussian density needs stddev > 0");
  FrequencyDensity d;
  const double norm = 1.0 / (stddev * std::sqrt(2.0 * pi));
  d.pdf = [=](double x) {
    const double z = (x - mean) / stddev;
    return norm * std::exp(-0.5 * z * z);
  };
  d.lower = mean - 12.0 * stddev;
  d.upper = mean + 12.0 * stddev;
  return d;
}

FrequencyDensity two_point_density(double eta, double omega1, double omega2) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("eta must lie in [0, 1]");
  FrequencyDensity d;
  d.atoms = {{omega1, eta}, {omega2, 1.0 - eta}};
  return d;
}

FrequencyDensity uniform_density(double lo, double hi) {
  if (!(hi > lo)) throw DomainError("uniform density needs hi > lo");
  FrequencyDensity d;
  const double h = 1.0 / (hi - lo);
  d.pdf = [h](double) { return h; };
  d.lower = lo;
  d.upper = hi;
  return d;
}

namespace {

template <class F>
double integrate_piecewise(F&& f, double a, double b, std::span<const double> cuts, double tol) {
  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  double left = a;
  auto piece = [&](double lo, double hi) {
    if (hi > lo) total += gauss_kronrod<double, 31>::integrate(f, lo, hi, 12, tol);
  };
  for (double c : cuts) {
    if (c <= left || c >= b) continue;
    piece(left, c);
    left = c;
  }
  piece(left, b);
  return total;
}

}  // namespace

double p_numeric(const FrequencyDensity& density, double t, double tolerance) {
  if (!(tolerance > 0.0)) throw DomainError("quadrature tolerance must be > 0");
  const bool continuous = static_cast<bool>(density.pdf) && density.upper > density.lower;

  double mass = 0.0;
  for (const auto& atom : density.atoms) mass += atom.weight;
  if (continuous) {
    mass += integrate_piecewise(density.pdf, density.lower, density.upper, {}, tolerance * 1e-2);
  }
  if (std::abs(mass - 1.0) > std::max(tolerance, 1e-10)) throw DomainError("frequency density is not normalised");

  double expectation = 0.0;
  for (const auto& atom : density.atoms) expectation += atom.weight * std::abs(std::cos(atom.value * t));
  if (continuous) {
    std::vector<double> cuts;
    const double at = std::abs(t);
    if (at > 0.0) {
      // kinks of |cos(x t)| at x = (k + 1/2) pi / t
      const double step = pi / at;
      const double k_lo = std::ceil(density.lower / step - 0.5);
      const double k_hi = std::floor(density.upper / step - 0.5);
      if (k_hi - k_lo > 1e6) throw DomainError("time too large for piecewise quadrature");
      for (double k = k_lo; k <= k_hi; k += 1.0) cuts.push_back((k + 0.5) * step);
    }
    auto integrand = [&](double x) { return density.pdf(x) * std::abs(std::cos(x * t)); };
    expectation += integrate_piecewise(integrand, density.lower, density.upper, cuts, tolerance * 1e-2);
  }
  return 1.0 - expectation;
}

std::optional<Fraction> rational_approximation(double x, long long max_den) {
  if (!std::isfinite(x) || x <= 0.0) return std::nullopt;
  // convergents h_n / k_n of the continued fraction of x
  long long h_prev = 1, h = static_cast<long long>(std::floor(x));
  long long k_prev = 0, k = 1;
  double r = x - std::floor(x);
  const double tol = 4.0 * std::numeric_limits<double>::epsilon() * x;
  for (int iter = 0; iter < 64; ++iter) {
    if (std::abs(x - static_cast<double>(h) / static_cast<double>(k)) <= tol) return Fraction{h, k};
    if (r == 0.0) return std::nullopt;
    const double inv = 1.0 / r;
    const double a = std::floor(inv);
    r = inv - a;
    if (a > static_cast<double>(max_den)) return std::nullopt;
    const auto ai = static_cast<long long>(a);
    const long long h_next = ai * h + h_prev;
    const long long k_next = ai * k + k_prev;
    if (k_next > max_den) return std::nullopt;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
  return std::nullopt;
}

std::optional<double> bernoulli_period(double omega1, double omega2) {
  if (!(omega1 > 0.0) || !(omega2 > 0.0)) throw DomainError("frequencies must be > 0");
  const auto frac = rational_approximation(omega2 / omega1);
  if (!frac) return std::nullopt;
  return static_cast<double>(frac->den) * pi / omega1;
}

std::optional<double> half_half_crossing(double ratio, double t_max, double tol) {
  auto g = [](double t) { return std::abs(std::cos(t)) - 0.5; };
  const double h = pi / 64.0;
  double left = 0.0;
  double g_left = g(left);
  while (left < t_max) {
    const double right = std::min(left + h, t_max);
    const double g_right = g(right);
    if ((g_left > 0.0) != (g_right > 0.0)) {
      double lo = left, hi = right;
      for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((g(mid) > 0.0) == (g_left > 0.0)) lo = mid;
        else hi = mid;
      }
      const double root = 0.5 * (lo + hi);
      if (std::abs(conversion_probability(ratio, root) - 0.5) < tol) return root;
    }
    left = right;
    g_left = g_right;
  }
  return std::nullopt;
}

}  // namespace entperc
