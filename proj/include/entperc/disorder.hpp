#pragma once

#include <cstdint>

#include "entperc/frequency.hpp"
#include "entperc/lattice.hpp"

namespace entperc {

// Density of the distance between two lattice neighbours whose unperturbed
// separation is nu and whose positions carry i.i.d. N(0, sigma^2) noise per
// coordinate: a Rice distribution with scale sqrt(2) sigma,
//   (x / 2 sigma^2) exp(-(x^2 + nu^2) / 4 sigma^2) I0(x nu / 2 sigma^2).
// Throws DomainError for sigma <= 0 or x < 0.
double rice_pdf(double x, double nu, double sigma);

// P[d <= x] by adaptive quadrature.
double rice_cdf(double x, double nu, double sigma);

// E[d] by adaptive quadrature.
double rice_mean(double nu, double sigma);

// Integration window outside which the density is below exp(-200).
struct Interval {
  double lo;
  double hi;
};
Interval rice_support(double nu, double sigma);

enum class EtaMethod { quadrature, montecarlo };

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
};

// eta = P[d > lambda] for unit-spaced neighbours.
Estimate eta(double sigma, double lambda, EtaMethod method, std::uint64_t n_samples = 1'000'000,
             std::uint64_t seed = 0);

// Joint outcome frequencies of (d1 < lambda, d2 < lambda) for a pair of
// adjacent edges: lt_gt means d1 < lambda and d2 >= lambda.
struct CellProbabilities {
  double lt_lt = 0.0;
  double lt_gt = 0.0;
  double gt_lt = 0.0;
  double gt_gt = 0.0;
  std::uint64_t n = 0;

  double beta() const noexcept { return lt_lt; }
  // Probability of exceeding lambda, averaged over both edges of the pair.
  double eta() const noexcept { return 1.0 - lt_lt - 0.5 * (lt_gt + gt_lt); }
  double rho() const;
};

struct MotifCells {
  CellProbabilities collinear;
  CellProbabilities perpendicular;
};

// Monte Carlo over the four-node motif: node 0 at the origin, collinear
// neighbours 1 at (-1, 0) and 2 at (1, 0), perpendicular neighbour 3 at
// (0, 1), all four displaced independently. Pairs are (d10, d20) and
// (d10, d30). Sample i draws from derive_seed(seed, {motif tag, i / 4096}).
MotifCells motif_cells(double sigma, double lambda, std::uint64_t n_samples, std::uint64_t seed);

// Fraction of motif samples with both relevant distances below lambda.
// Requires n_samples >= 1e4.
double beta(double sigma, double lambda, PairOrientation orientation, std::uint64_t n_samples, std::uint64_t seed);

// Pearson coefficient of adjacent two-valued frequencies,
//   (beta - (1 - eta)^2) / (eta (1 - eta)).
// Throws DomainError for eta outside (0, 1) or beta outside the joint
// bounds [max(0, 1 - 2 eta), 1 - eta].
double pearson(double eta, double beta);

// Joint cells of adjacent edge pairs of a two-valued assignment, where the
// "<" outcome is the smaller of the two frequency values.
// Throws DomainError unless exactly two distinct values occur.
CellProbabilities pair_cells(const PerturbedLattice& lattice, const FrequencyAssignment& assignment,
                             PairOrientation orientation);

// Whole-lattice estimate of rho from every adjacent pair of the orientation.
double pearson_from_assignment(const PerturbedLattice& lattice, const FrequencyAssignment& assignment,
                               PairOrientation orientation);

struct CorrelationStats {
  double sigma = 0.0;
  double lambda = 0.0;
  double eta = 0.0;
  double beta_par = 0.0;
  double beta_perp = 0.0;
  double rho_par = 0.0;
  double rho_perp = 0.0;
  std::uint64_t n_samples = 0;
};

// Motif Monte Carlo summary for one (sigma, lambda) cell; eta is the
// quadrature value, the coefficients use each pair's own marginals.
CorrelationStats correlation_stats(double sigma, double lambda, std::uint64_t n_samples, std::uint64_t seed);

}  // namespace entperc
