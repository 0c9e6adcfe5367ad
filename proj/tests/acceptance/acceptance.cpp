// Acceptance suite: one PASS/FAIL line per criterion.
//   entperc_acceptance [--only N]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "entperc/disorder.hpp"
#include "entperc/dynamics.hpp"
#include "entperc/experiment.hpp"
#include "entperc/mean_field.hpp"
#include "entperc/percolation.hpp"
#include "entperc/rng.hpp"
#include "entperc/two_colour.hpp"
#include "../unit/oracles.hpp"

using namespace entperc;
using std::numbers::pi;

namespace {

const LatticeSpec kSquare256{Topology::square, 256, Boundary::periodic};

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return v;
}

struct Result {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Result asymptotic_fraction() {
  TrajectoryConfig c;
  c.lattice = {Topology::square, 300, Boundary::periodic};
  c.model = freq::GaussianIid{1.0, 0.3};
  c.times = {20.0};
  c.n_disorder = 4;
  c.n_activation = 20;
  c.seed = 1;
  const auto r = run_trajectory(c);
  const double dev = std::abs(r.p_hat[0] - (1.0 - 2.0 / pi));
  return {dev < 0.01, fmt("p_hat(20) = %.5f, |p_hat - (1 - 2/pi)| = %.5f (< 0.01)", r.p_hat[0], dev)};
}

Result analytic_agreement() {
  const auto times = linspace(0.0, 20.0, 100);
  struct Case {
    const char* label;
    freq::ModelSpec model;
    std::function<double(double)> exact;
  };
  const Case cases[] = {
      {"bernoulli ratio 2", freq::BernoulliIid{0.5, 1.0, 2.0}, [](double t) { return p_bernoulli(t, 0.5, 1.0, 2.0); }},
      {"bernoulli ratio 5/2", freq::BernoulliIid{0.5, 1.0, 2.5}, [](double t) { return p_bernoulli(t, 0.5, 1.0, 2.5); }},
      {"gaussian sigma 0.2", freq::GaussianIid{1.0, 0.2}, [](double t) { return p_gaussian(t, 1.0, 0.2); }},
  };
  bool pass = true;
  std::string detail;
  for (const auto& k : cases) {
    TrajectoryConfig c;
    c.lattice = {Topology::square, 300, Boundary::periodic};
    c.model = k.model;
    c.times = times;
    c.n_disorder = 4;
    c.n_activation = 5;
    c.seed = 2;
    const auto r = run_trajectory(c);
    double worst = 0;
    for (std::size_t i = 0; i < times.size(); ++i) worst = std::max(worst, std::abs(r.p_hat[i] - k.exact(times[i])));
    pass = pass && worst < 0.01;
    detail += fmt("%s max|dp| = %.5f; ", k.label, worst);
  }
  return {pass, detail + "(each < 0.01)"};
}

Result threshold_recovery() {
  const auto grid = linspace(0.47, 0.53, 31);
  const auto small = static_percolation_curve(kSquare256, grid, 200, 3);
  const auto large = static_percolation_curve({Topology::square, 512, Boundary::periodic}, grid, 200, 3);
  const auto raw = estimate_crossing(small, 256, large, 512, 0.0);
  const auto scaled = estimate_crossing(small, 256, large, 512, kBetaOverNu2D);
  const std::vector<double> q = {1.0 - 2.0 / pi};
  const double tri = static_percolation_curve({Topology::triangular, 256, Boundary::periodic}, q, 20, 3)[0].P;
  const bool pass = scaled && *scaled >= 0.49 && *scaled <= 0.51 && tri > 0.05;
  return {pass, fmt("crossing of L^(5/48) P0 for L = 256, 512: %.4f (raw P0 crossing %.4f), in [0.49, 0.51]; "
                    "triangular P0(1 - 2/pi) = %.4f (> 0.05)",
                    scaled.value_or(-1.0), raw.value_or(-1.0), tri)};
}

Result uncorrelated_collapse() {
  std::vector<double> grid;
  for (int k = 0; k < 44; ++k) grid.push_back(k / 100.0);
  for (int i = 0; i <= 60; ++i) grid.push_back(0.44 + 0.002 * i);
  for (int k = 57; k <= 100; ++k) grid.push_back(k / 100.0);
  const auto ref = static_percolation_curve(kSquare256, grid, 400, 99);
  bool pass = true;
  std::string detail;
  for (double sd : {0.1, 0.2, 0.3}) {
    TrajectoryConfig c;
    c.lattice = kSquare256;
    c.model = freq::GaussianIid{1.0, sd};
    c.times = linspace(0.0, 12.0, 120);
    c.n_disorder = 4;
    c.n_activation = 50;
    c.seed = 11;
    const auto r = run_trajectory(c);
    double worst = 0;
    for (std::size_t i = 0; i < r.size(); ++i)
      worst = std::max(worst, std::abs(r.P_hat[i] - interpolate_curve(ref, r.p_hat[i])));
    pass = pass && worst < 0.02;
    detail += fmt("sigma_omega %.1f max|P - P0(p)| = %.4f; ", sd, worst);
  }
  return {pass, detail + "(each < 0.02)"};
}

Result hysteresis() {
  std::vector<ParametricPoint> pts[2];
  for (int reshuffled = 0; reshuffled < 2; ++reshuffled) {
    TrajectoryConfig c;
    c.lattice = kSquare256;
    c.sigma = 0.1;
    c.model = freq::ThresholdDistance{1.0, 2.0, 1.0};
    c.times = linspace(0.0, 30.0, 600);
    c.n_disorder = 4;
    c.n_activation = 20;
    c.seed = 7;
    c.reshuffle = reshuffled == 1;
    pts[reshuffled] = parametric_Pp(run_trajectory(c));
  }
  const std::size_t branches = count_branch_pairs(pts[0], 0.005, 0.05);
  const auto corr = max_branch_gap(pts[0], 0.005);
  const auto ctrl = max_branch_gap(pts[1], 0.005);
  // control restricted to pairs away from the threshold, for the record
  std::vector<ParametricPoint> away;
  for (const auto& p : pts[1])
    if (std::abs(p.p - 0.5) > 0.05) away.push_back(p);
  const auto ctrl_away = max_branch_gap(away, 0.005);
  const auto& a = pts[1][ctrl.i];
  const auto& b = pts[1][ctrl.j];
  const bool pass = branches >= 1 && ctrl.max_dP < 0.02;
  return {pass, fmt("correlated: %zu pairs with |dp| < 0.005 and |dP| > 0.05 (max |dP| = %.4f); reshuffled control "
                    "max |dP| = %.4f (needs < 0.02) between (p=%.4f, P=%.4f) and (p=%.4f, P=%.4f); control max "
                    "|dP| with |p - 1/2| > 0.05: %.4f",
                    branches, corr.max_dP, ctrl.max_dP, a.p, a.P, b.p, b.P, ctrl_away.max_dP)};
}

Result two_colour_effect() {
  const auto grid = unit_grid(0.1);
  std::vector<std::pair<double, double>> pts;
  for (double a : grid)
    for (double b : grid) pts.emplace_back(a, b);
  const std::size_t ncell = pts.size();
  const std::size_t ndiag = 2 * (grid.size() - 1) + 1;
  for (std::size_t k = 0; k < ndiag; ++k) pts.emplace_back(0.05 * static_cast<double>(k), 0.05 * static_cast<double>(k));

  const auto U = sample_surface(SurfaceConfig{256, 400, false, 5}, pts);
  const auto C = sample_surface(SurfaceConfig{256, 50, true, 5}, std::span(pts).first(ncell));
  double contour = 0;
  std::size_t region = 0;
  double max_diff = 0;
  for (std::size_t i = 0; i < ncell; ++i) {
    const auto k = static_cast<std::size_t>(std::llround((pts[i].first + pts[i].second) / 0.1 * 1.0));
    contour = std::max(contour, std::abs(U[i].S - U[ncell + k].S));
    const double d = std::abs(U[i].S - C[i].S);
    max_diff = std::max(max_diff, d);
    if (d > 0.01 && d > 3.0 * std::hypot(U[i].std_error, C[i].std_error)) ++region;
  }
  const bool pass = region > 0 && contour < 0.02;
  return {pass, fmt("%zu grid cells with |S_U - S_C| > 0.01 beyond 3 standard errors (max %.4f); contour "
                    "max |S_U(phi1, phi2) - S_U(p, p)| = %.4f (< 0.02)",
                    region, max_diff, contour)};
}

Result meanfield_exactness() {
  const double lam_onset = oracle::bisect([](double p) { return jacobian_eigenvalue(p, p) - 1.0; }, 0.0, 1.0);
  double lo = 0.3, hi = 0.4;
  bool converged = true;
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    const auto s = solve_fixed_point(mid, mid, kMeanFieldTolerance, 10'000'000);
    converged = converged && s.converged;
    (s.S > 0.0 ? hi : lo) = mid;
  }
  const double fp_onset = 0.5 * (lo + hi);
  double diag = 0;
  std::size_t skipped = 0;
  for (int i = 0; i <= 1000; ++i) {
    const double p = i / 1000.0;
    const auto s = solve_fixed_point(p, p);
    const auto u = uniform_reshuffled(p);
    if (!s.converged || !u.converged) {
      ++skipped;
      continue;
    }
    diag = std::max({diag, std::abs(s.S - u.P), std::abs(s.m1 - u.m), std::abs(s.m2 - u.m)});
  }
  const double end0 = std::abs(critical_line_phi2(0.0) - 1.0);
  const double end1 = std::abs(critical_line_phi2(1.0) - 0.0);
  const bool pass = converged && std::abs(lam_onset - 1.0 / 3) < 1e-6 && std::abs(fp_onset - 1.0 / 3) < 1e-6 &&
                    std::abs(lam_onset - fp_onset) < 1e-6 && diag < 1e-10 && end0 < 1e-10 && end1 < 1e-10;
  return {pass, fmt("onset from Lambda = %.9f, from fixed-point emergence = %.9f%s; diagonal max |S - P_U| = %.2e "
                    "(%zu critical points skipped); endpoints |phi2(0) - 1| = %.1e, |phi2(1)| = %.1e",
                    lam_onset, fp_onset, converged ? "" : " (some bisection steps did not converge)", diag, skipped,
                    end0, end1)};
}

Result correlation_structure() {
  const double e = eta(0.1, 1.0, EtaMethod::quadrature).value;
  const auto mc = correlation_stats(0.1, 1.0, 1'000'000, 8);
  const auto lat = perturb(generate_lattice({Topology::square, 500, Boundary::periodic}), 0.1, 8);
  const auto a = assign(lat, freq::ThresholdDistance{1.0, 2.0, 1.0}, 8);
  const double lp = pearson_from_assignment(lat, a, PairOrientation::collinear);
  const double lq = pearson_from_assignment(lat, a, PairOrientation::perpendicular);
  const bool pass = std::abs(e - 0.5) < 0.05 && mc.rho_par < -0.3 && std::abs(mc.rho_perp) < 0.05 && lp < -0.3 &&
                    std::abs(lq) < 0.05 && std::abs(lp - mc.rho_par) < 0.02 && std::abs(lq - mc.rho_perp) < 0.02;
  return {pass, fmt("eta = %.4f; motif rho_par = %.4f, rho_perp = %.4f; lattice rho_par = %.4f, rho_perp = %.4f",
                    e, mc.rho_par, mc.rho_perp, lp, lq)};
}

Result small_oracle() {
  const auto lat = generate_lattice({Topology::square, 20, Boundary::periodic});
  Rng gen(9);
  int mismatches = 0;
  for (int k = 0; k < 100; ++k) {
    const auto s = sample_uniform_activation(lat, gen.uniform(), gen.next());
    std::vector<bool> active(lat.edge_count());
    for (std::size_t e = 0; e < active.size(); ++e) active[e] = s.active(e);
    if (component_sizes(lat, s) != oracle::bfs_component_sizes(lat.node_count(), lat.edges(), active)) ++mismatches;
  }
  return {mismatches == 0, fmt("%d of 100 configurations differ from BFS labelling", mismatches)};
}

Result determinism() {
  namespace ex = experiment;
  std::size_t files = 0, differ = 0;
  for (const char* name : {"fig3", "fig6", "fig7", "fig8", "fig9"}) {
    std::vector<std::string> csv[2];
    for (int k = 0; k < 2; ++k) {
      const auto def = ex::preset(name, false, {{"threads", k == 0 ? 1 : 4}, {"master_seed", 2024}});
      for (const auto& run : def["runs"])
        for (const auto& t : ex::execute(ex::resolve_config(run))) csv[k].push_back(ex::to_csv(t));
    }
    files += csv[0].size();
    if (csv[0].size() != csv[1].size()) {
      differ += csv[0].size();
      continue;
    }
    for (std::size_t i = 0; i < csv[0].size(); ++i) differ += csv[0][i] != csv[1][i];
  }
  return {differ == 0, fmt("presets fig3, fig6, fig7, fig8, fig9 at 1 and 4 threads: %zu of %zu CSVs differ", differ, files)};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 2;
    }
  }
  const std::function<Result()> criteria[] = {asymptotic_fraction, analytic_agreement, threshold_recovery,
                                               uncorrelated_collapse, hysteresis,        two_colour_effect,
                                               meanfield_exactness, correlation_structure, small_oracle,
                                               determinism};
  const int n = static_cast<int>(std::size(criteria));
  if (only < 0 || only > n) {
    std::fprintf(stderr, "criterion must be in 1..%d\n", n);
    return 2;
  }
  int failed = 0;
  for (int k = 1; k <= n; ++k) {
    if (only != 0 && k != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Result r;
    try {
      r = criteria[k - 1]();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d %s  %s [%.1f s]\n", k, r.pass ? "PASS" : "FAIL", r.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !r.pass;
  }
  return failed == 0 ? 0 : 1;
}
