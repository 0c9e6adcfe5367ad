#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace entperc {

// Branching-process solution on a 4-regular random graph whose nodes carry
// two colour-1 and two colour-2 edges. m_c is the probability that following
// an active colour-c edge leads to an infinite cluster:
//   m1 = 1 - (1 - phi1 m1)(1 - phi2 m2)^2
//   m2 = 1 - (1 - phi1 m1)^2 (1 - phi2 m2)
//   S  = 1 - (1 - phi1 m1)^2 (1 - phi2 m2)^2
struct MeanFieldSolution {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double S = 0.0;
  std::int64_t iterations = 0;
  bool converged = false;
};

inline constexpr double kMeanFieldTolerance = 1e-12;
inline constexpr std::int64_t kMeanFieldMaxIter = 1'000'000;

// Forward iteration from (1, 1), converged once the largest update is below
// tol. Falls back to half-step damping if successive updates change sign.
// A converged solution with max(m1, m2) < sqrt(tol) is reported as the
// trivial fixed point (0, 0). Throws ConfigError for phi outside [0, 1] or
// tol <= 0.
MeanFieldSolution solve_fixed_point(double phi1, double phi2, double tol = kMeanFieldTolerance,
                                    std::int64_t max_iter = kMeanFieldMaxIter);

// Largest eigenvalue of the Jacobian of the fixed-point map at (0, 0):
//   (phi1 + phi2 + sqrt(phi1^2 + phi2^2 + 14 phi1 phi2)) / 2.
double jacobian_eigenvalue(double phi1, double phi2);

// phi2 on the critical line jacobian_eigenvalue(phi1, phi2) = 1, found by
// bisection on [0, 1]. Throws DomainError when no root exists in [0, 1].
double critical_line_phi2(double phi1);

struct UniformSolution {
  double p = 0.0;
  double m = 0.0;
  double P = 0.0;
  std::int64_t iterations = 0;
  bool converged = false;
};

// Equal activation probability p on every edge: m = 1 - (1 - p m)^3 iterated
// from m = 1, P = 1 - (1 - p m)^4. Same convergence rules as solve_fixed_point.
UniformSolution uniform_reshuffled(double p, double tol = kMeanFieldTolerance,
                                   std::int64_t max_iter = kMeanFieldMaxIter);

struct MeanFieldPoint {
  double t;
  double phi1;
  double phi2;
  double p;
  double P;          // coloured solution S(phi1, phi2)
  double P_uniform;  // uniform_reshuffled(p)
  bool converged;
};

// S along phi1 = 1 - |cos t|, phi2 = 1 - |cos(ratio t)|.
std::vector<MeanFieldPoint> meanfield_dynamic(double ratio, std::span<const double> times,
                                              double tol = kMeanFieldTolerance,
                                              std::int64_t max_iter = kMeanFieldMaxIter);

}  // namespace entperc
