#include "entperc/mean_field.hpp"

#include <algorithm>
#include <cmath>

#include "entperc/errors.hpp"
#include "entperc/two_colour.hpp"

namespace entperc {

namespace {

void check_inputs(double phi1, double phi2, double tol) {
  if (!(phi1 >= 0.0 && phi1 <= 1.0 && phi2 >= 0.0 && phi2 <= 1.0))
    throw ConfigError("activation probabilities must lie in [0, 1]");
  if (!(tol > 0.0)) throw ConfigError("tolerance must be > 0");
}

}  // namespace

MeanFieldSolution solve_fixed_point(double phi1, double phi2, double tol, std::int64_t max_iter) {
  check_inputs(phi1, phi2, tol);
  MeanFieldSolution sol;
  sol.phi1 = phi1;
  sol.phi2 = phi2;
  double m1 = 1.0, m2 = 1.0;
  double damping = 1.0;
  double prev1 = 0.0, prev2 = 0.0;
  for (std::int64_t it = 1; it <= max_iter; ++it) {
    const double a = 1.0 - phi1 * m1;
    const double b = 1.0 - phi2 * m2;
    const double d1 = (1.0 - a * b * b) - m1;
    const double d2 = (1.0 - a * a * b) - m2;
    if (damping == 1.0 && (d1 * prev1 < 0.0 || d2 * prev2 < 0.0)) damping = 0.5;
    m1 += damping * d1;
    m2 += damping * d2;
    prev1 = d1;
    prev2 = d2;
    sol.iterations = it;
    if (std::max(std::abs(d1), std::abs(d2)) < tol) {
      sol.converged = true;
      break;
    }
  }
  if (sol.converged && std::max(m1, m2) < std::sqrt(tol)) m1 = m2 = 0.0;
  sol.m1 = std::clamp(m1, 0.0, 1.0);
  sol.m2 = std::clamp(m2, 0.0, 1.0);
  const double a = 1.0 - phi1 * sol.m1;
  const double b = 1.0 - phi2 * sol.m2;
  sol.S = 1.0 - a * a * b * b;
  return sol;
}

double jacobian_eigenvalue(double phi1, double phi2) {
  return 0.5 * (phi1 + phi2 + std::sqrt(phi1 * phi1 + phi2 * phi2 + 14.0 * phi1 * phi2));
}

double critical_line_phi2(double phi1) {
  if (!(phi1 >= 0.0 && phi1 <= 1.0)) throw DomainError("phi1 must lie in [0, 1]");
  double lo = 0.0, hi = 1.0;
  const double f_lo = jacobian_eigenvalue(phi1, lo) - 1.0;
  const double f_hi = jacobian_eigenvalue(phi1, hi) - 1.0;
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (f_lo > 0.0 || f_hi < 0.0) throw DomainError("no critical phi2 in [0, 1]");
  // the eigenvalue increases with phi2
  while (hi - lo > 0.0) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (jacobian_eigenvalue(phi1, mid) < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(jacobian_eigenvalue(phi1, lo) - 1.0) <= std::abs(jacobian_eigenvalue(phi1, hi) - 1.0) ? lo : hi;
}

UniformSolution uniform_reshuffled(double p, double tol, std::int64_t max_iter) {
  check_inputs(p, p, tol);
  UniformSolution sol;
  sol.p = p;
  double m = 1.0;
  double damping = 1.0;
  double prev = 0.0;
  for (std::int64_t it = 1; it <= max_iter; ++it) {
    const double a = 1.0 - p * m;
    const double d = (1.0 - a * a * a) - m;
    if (damping == 1.0 && d * prev < 0.0) damping = 0.5;
    m += damping * d;
    prev = d;
    sol.iterations = it;
    if (std::abs(d) < tol) {
      sol.converged = true;
      break;
    }
  }
  if (sol.converged && m < std::sqrt(tol)) m = 0.0;
  sol.m = std::clamp(m, 0.0, 1.0);
  const double a = 1.0 - p * sol.m;
  sol.P = 1.0 - a * a * a * a;
  return sol;
}

std::vector<MeanFieldPoint> meanfield_dynamic(double ratio, std::span<const double> times, double tol,
                                              std::int64_t max_iter) {
  std::vector<MeanFieldPoint> out;
  out.reserve(times.size());
  for (const GammaPoint& g : gamma_trajectory(ratio, times)) {
    const MeanFieldSolution s = solve_fixed_point(g.phi1, g.phi2, tol, max_iter);
    const UniformSolution u = uniform_reshuffled(g.p, tol, max_iter);
    out.push_back({g.t, g.phi1, g.phi2, g.p, s.S, u.P, s.converged && u.converged});
  }
  return out;
}

}  // namespace entperc
