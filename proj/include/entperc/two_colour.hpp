#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "entperc/lattice.hpp"

namespace entperc {

// Periodic square lattice whose edges carry colour 1 or 2, indexed like the
// edges of generate_lattice(spec).
struct ColouredLattice {
  LatticeSpec spec;
  std::vector<std::uint8_t> colours;
  bool constrained = false;
  std::uint64_t seed = 0;
};

// Alternating colouring: horizontal edges of row j get colour
// 1 + (i + r_j) mod 2, vertical edges of column i get 1 + (j + c_i) mod 2,
// with independent fair bits r_j, c_i drawn from derive_seed(seed, {colouring tag}).
// Throws ConfigError for odd L or L < 2.
ColouredLattice generate_constrained(std::int64_t L, std::uint64_t seed);

// Uniform random permutation of the colours (stream derive_seed(seed, {reshuffle tag})).
ColouredLattice generate_reshuffled(const ColouredLattice& coloured, std::uint64_t seed);

struct GiantEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// Colour-c edges are active with probability phi_c. Sample s draws one
// uniform per edge from derive_seed(seed, {activation tag, s}).
GiantEstimate giant_fraction(const ColouredLattice& coloured, double phi1, double phi2, int n_samples,
                             std::uint64_t seed);

struct SurfaceConfig {
  std::int64_t L = 256;
  int n_samples = 20;
  bool constrained = true;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  double budget = 1e12;  // node-evaluations: N * cells * n_samples
};

struct SurfacePoint {
  double phi1;
  double phi2;
  double S;
  double std_error;
};

// S at arbitrary (phi1, phi2) points. Sample s uses a fresh colouring built
// from derive_seed(seed, {colouring tag, s}) (reshuffled when not
// constrained) and the activation uniforms of derive_seed(seed, {activation
// tag, s}); both are shared by every point, so differences between points
// carry less noise than the points themselves.
std::vector<SurfacePoint> sample_surface(const SurfaceConfig& config,
                                         std::span<const std::pair<double, double>> points);

struct PhaseDiagram {
  std::vector<double> phi1_grid;
  std::vector<double> phi2_grid;
  std::vector<double> S;  // row-major, S[i * phi2_grid.size() + j] at (phi1_grid[i], phi2_grid[j])
  std::vector<double> std_error;
  int n_samples = 0;
  bool constrained = false;

  double at(std::size_t i, std::size_t j) const { return S[i * phi2_grid.size() + j]; }
};

// Grid 0, step, ..., 1 in both directions. Throws ConfigError unless
// 1/step is an integer within 1e-9.
std::vector<double> unit_grid(double step);

PhaseDiagram sweep_phase_diagram(const SurfaceConfig& config, double grid_step);

struct GammaPoint {
  double t;
  double phi1;
  double phi2;
  double p;  // (phi1 + phi2) / 2
};

// phi1 = 1 - |cos t|, phi2 = 1 - |cos(ratio t)|.
std::vector<GammaPoint> gamma_trajectory(double ratio, std::span<const double> times);

struct TwoColourTrajectory {
  std::vector<GammaPoint> gamma;
  std::vector<double> P;
  std::vector<double> stderr_P;
  int n_samples = 0;
};

// P(t) = S(gamma(t)). Sample s keeps one colouring for the whole time grid
// and draws fresh activations per time from derive_seed(seed, {activation tag, s, ti}).
TwoColourTrajectory dynamic_two_colour(const SurfaceConfig& config, double ratio, std::span<const double> times);

}  // namespace entperc
