#include "entperc/disorder.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <vector>

#include "entperc/errors.hpp"
#include "entperc/rng.hpp"
#include "entperc/special.hpp"

namespace entperc {

namespace {

void require_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("Rice density needs sigma > 0");
}

// Integrate the Rice density over [a, b], split around the peak so the
// adaptive rule resolves narrow densities.
double rice_integral(double a, double b, double nu, double sigma) {
  using boost::math::quadrature::gauss_kronrod;
  const Interval s = rice_support(nu, sigma);
  a = std::max(a, s.lo);
  b = std::min(b, s.hi);
  if (!(b > a)) return 0.0;
  const double w = std::sqrt(2.0) * sigma;
  std::vector<double> knots = {a};
  for (double k : {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0}) {
    const double c = nu + k * w;
    if (c > a && c < b) knots.push_back(c);
  }
  knots.push_back(b);
  auto f = [&](double x) { return rice_pdf(x, nu, sigma); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    total += gauss_kronrod<double, 31>::integrate(f, knots[i], knots[i + 1], 15, 1e-13);
  return total;
}

}  // namespace

Interval rice_support(double nu, double sigma) {
  // exp(-(x - nu)^2 / 4 sigma^2) < exp(-200) beyond |x - nu| > 2 sqrt(200) sigma
  const double half = 2.0 * std::sqrt(200.0) * sigma;
  return {std::max(0.0, nu - half), nu + half};
}

double rice_pdf(double x, double nu, double sigma) {
  require_sigma(sigma);
  if (x < 0.0) throw DomainError("Rice density is defined for x >= 0");
  const double s2 = 2.0 * sigma * sigma;
  const double z = x * nu / s2;
  const double gauss = std::exp(-(x - nu) * (x - nu) / (2.0 * s2));
  return x / s2 * gauss * bessel_i0_scaled(z);
}

double rice_cdf(double x, double nu, double sigma) {
  require_sigma(sigma);
  if (x <= 0.0) return 0.0;
  return std::clamp(rice_integral(0.0, x, nu, sigma), 0.0, 1.0);
}

double rice_mean(double nu, double sigma) {
  require_sigma(sigma);
  using boost::math::quadrature::gauss_kronrod;
  const Interval s = rice_support(nu, sigma);
  auto f = [&](double x) { return x * rice_pdf(x, nu, sigma); };
  return gauss_kronrod<double, 61>::integrate(f, s.lo, s.hi, 15, 1e-13);
}

Estimate eta(double sigma, double lambda, EtaMethod method, std::uint64_t n_samples, std::uint64_t seed) {
  require_sigma(sigma);
  Estimate out;
  if (method == EtaMethod::quadrature) {
    const Interval s = rice_support(1.0, sigma);
    if (lambda <= s.lo) {
      out.value = 1.0 - rice_integral(0.0, lambda, 1.0, sigma);
    } else {
      out.value = rice_integral(lambda, s.hi, 1.0, sigma);
    }
    out.value = std::clamp(out.value, 0.0, 1.0);
    return out;
  }
  if (n_samples == 0) throw DomainError("Monte Carlo eta needs n_samples > 0");
  Rng rng(derive_seed(seed, {tag(StreamTag::motif), 0xe7a}));
  std::uint64_t above = 0;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    const double ax = sigma * rng.normal(), ay = sigma * rng.normal();
    const double bx = sigma * rng.normal(), by = sigma * rng.normal();
    if (std::hypot(1.0 + bx - ax, by - ay) > lambda) ++above;
  }
  const double n = static_cast<double>(n_samples);
  out.value = static_cast<double>(above) / n;
  out.std_error = std::sqrt(out.value * (1.0 - out.value) / n);
  out.n_samples = n_samples;
  return out;
}

double CellProbabilities::rho() const { return pearson(eta(), beta()); }

double pearson(double eta, double beta) {
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("pearson coefficient needs eta in (0, 1)");
  constexpr double slack = 1e-12;
  const double lo = std::max(0.0, 1.0 - 2.0 * eta);
  const double hi = 1.0 - eta;
  if (beta < lo - slack || beta > hi + slack) throw DomainError("beta violates the joint-probability bounds");
  const double q = 1.0 - eta;
  return (beta - q * q) / (eta * q);
}

namespace {

struct CellCounter {
  std::uint64_t c[2][2] = {{0, 0}, {0, 0}};
  void add(bool first_lt, bool second_lt) { ++c[first_lt ? 0 : 1][second_lt ? 0 : 1]; }
  CellProbabilities finish() const {
    CellProbabilities p;
    p.n = c[0][0] + c[0][1] + c[1][0] + c[1][1];
    if (p.n == 0) return p;
    const double n = static_cast<double>(p.n);
    p.lt_lt = static_cast<double>(c[0][0]) / n;
    p.lt_gt = static_cast<double>(c[0][1]) / n;
    p.gt_lt = static_cast<double>(c[1][0]) / n;
    p.gt_gt = static_cast<double>(c[1][1]) / n;
    return p;
  }
};

constexpr std::uint64_t kMotifBlock = 4096;

}  // namespace

MotifCells motif_cells(double sigma, double lambda, std::uint64_t n_samples, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw DomainError("sigma must be >= 0");
  CellCounter par, perp;
  for (std::uint64_t start = 0; start < n_samples; start += kMotifBlock) {
    Rng rng(derive_seed(seed, {tag(StreamTag::motif), start / kMotifBlock}));
    const std::uint64_t stop = std::min(n_samples, start + kMotifBlock);
    for (std::uint64_t i = start; i < stop; ++i) {
      double dx[4], dy[4];
      for (int k = 0; k < 4; ++k) {
        dx[k] = sigma * rng.normal();
        dy[k] = sigma * rng.normal();
      }
      const double d1 = std::hypot(-1.0 + dx[1] - dx[0], dy[1] - dy[0]);
      const double d2 = std::hypot(1.0 + dx[2] - dx[0], dy[2] - dy[0]);
      const double d3 = std::hypot(dx[3] - dx[0], 1.0 + dy[3] - dy[0]);
      par.add(d1 < lambda, d2 < lambda);
      perp.add(d1 < lambda, d3 < lambda);
    }
  }
  return {par.finish(), perp.finish()};
}

double beta(double sigma, double lambda, PairOrientation orientation, std::uint64_t n_samples, std::uint64_t seed) {
  if (n_samples < 10'000) throw DomainError("beta needs at least 1e4 motif samples");
  const MotifCells cells = motif_cells(sigma, lambda, n_samples, seed);
  return orientation == PairOrientation::collinear ? cells.collinear.beta() : cells.perpendicular.beta();
}

CellProbabilities pair_cells(const PerturbedLattice& lattice, const FrequencyAssignment& assignment,
                             PairOrientation orientation) {
  const auto& w = assignment.omegas;
  if (w.size() != lattice.edge_count()) throw DomainError("assignment does not match the lattice");
  if (w.empty()) throw DomainError("empty assignment");
  const double first = w.front();
  double second = first;
  for (double v : w) {
    if (v == first) continue;
    if (second == first) {
      second = v;
    } else if (v != second) {
      throw DomainError("pair statistics need a two-valued assignment");
    }
  }
  if (second == first) throw DomainError("pair statistics need a two-valued assignment");
  const double low = std::min(first, second);

  CellCounter counter;
  for (const auto& [e1, e2] : adjacent_edge_pairs(lattice, orientation)) counter.add(w[e1] == low, w[e2] == low);
  return counter.finish();
}

double pearson_from_assignment(const PerturbedLattice& lattice, const FrequencyAssignment& assignment,
                               PairOrientation orientation) {
  return pair_cells(lattice, assignment, orientation).rho();
}

CorrelationStats correlation_stats(double sigma, double lambda, std::uint64_t n_samples, std::uint64_t seed) {
  CorrelationStats s;
  s.sigma = sigma;
  s.lambda = lambda;
  s.n_samples = n_samples;
  s.eta = eta(sigma, lambda, EtaMethod::quadrature).value;
  const MotifCells cells = motif_cells(sigma, lambda, n_samples, seed);
  s.beta_par = cells.collinear.beta();
  s.beta_perp = cells.perpendicular.beta();
  auto rho_or_nan = [](const CellProbabilities& c) {
    const double e = c.eta();
    return (e > 0.0 && e < 1.0) ? c.rho() : std::nan("");
  };
  s.rho_par = rho_or_nan(cells.collinear);
  s.rho_perp = rho_or_nan(cells.perpendicular);
  return s;
}

}  // namespace entperc
