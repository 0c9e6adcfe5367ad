#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "entperc/frequency.hpp"
#include "entperc/lattice.hpp"

namespace entperc {

// One singlet-conversion trial: a packed bit per edge.
struct ActivationSample {
  std::vector<std::uint64_t> words;
  std::size_t edge_count = 0;
  double time = 0.0;
  std::uint64_t seed = 0;

  bool active(std::size_t e) const noexcept { return (words[e >> 6] >> (e & 63)) & 1u; }
  void set(std::size_t e) noexcept { words[e >> 6] |= std::uint64_t{1} << (e & 63); }
  std::size_t active_count() const noexcept;
};

ActivationSample empty_sample(std::size_t edge_count);

// Edge e is active with probability 1 - |cos(omega_e t)|. Edges consume one
// draw each, in index order, from Rng(seed).
ActivationSample sample_activation(const PerturbedLattice& lattice, const FrequencyAssignment& assignment, double t,
                                   std::uint64_t seed);

// Every edge active with the same probability p.
ActivationSample sample_uniform_activation(const PerturbedLattice& lattice, double p, std::uint64_t seed);

// Largest connected component over active edges, as a fraction of nodes.
double largest_component_fraction(const PerturbedLattice& lattice, const ActivationSample& sample);

// Sizes of all components (singletons included), sorted descending.
std::vector<std::size_t> component_sizes(const PerturbedLattice& lattice, const ActivationSample& sample);

// Stream seed used by run_trajectory for disorder realization d, activation
// realization a and time index ti (ti is ignored in coupled mode).
std::uint64_t activation_seed(std::uint64_t master, std::uint64_t d, std::uint64_t a, std::uint64_t ti,
                              bool coupled = false);
std::uint64_t disorder_seed(std::uint64_t master, std::uint64_t d);

struct TrajectoryConfig {
  LatticeSpec lattice;
  double sigma = 0.0;
  freq::ModelSpec model = freq::Uniform{1.0};
  std::vector<double> times;
  int n_disorder = 1;
  int n_activation = 1;
  std::uint64_t seed = 0;
  // Replace each disorder realization's frequencies by a random permutation.
  bool reshuffle = false;
  // Reuse one uniform per edge across the time grid within an activation
  // realization (variance-reduced P(p) curves). Off: fresh draws per time.
  bool coupled = false;
  unsigned threads = 0;
  // Refuse runs whose node-evaluations N * n_disorder * n_activation * |times|
  // exceed this.
  double budget = 1e12;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> p_hat;
  std::vector<double> P_hat;
  std::vector<double> stderr_p;
  std::vector<double> stderr_P;
  int n_disorder = 0;
  int n_activation = 0;

  std::size_t size() const noexcept { return times.size(); }
};

// Node-evaluation count checked against TrajectoryConfig::budget.
double trajectory_cost(const TrajectoryConfig& config);

// Averages over n_disorder lattices (perturb, assign, optional reshuffle)
// times n_activation activation samples at every time. Disorder realization
// d uses disorder_seed(seed, d) for perturbation, assignment and reshuffle.
// Results do not depend on the thread count.
TrajectoryRecord run_trajectory(const TrajectoryConfig& config);

struct ParametricPoint {
  double t;
  double p;
  double P;
};

// (p, P) pairs in time order; nothing is merged or deduplicated.
std::vector<ParametricPoint> parametric_Pp(const TrajectoryRecord& record);

struct BranchGap {
  double max_dP = 0.0;  // largest |P_i - P_j| over qualifying pairs
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t pairs = 0;  // number of pairs with |p_i - p_j| < dp_tol
};

// Multi-valuedness of a parametric curve: pairs of distinct points whose p
// differ by less than dp_tol, and the largest P gap among them.
BranchGap max_branch_gap(std::span<const ParametricPoint> points, double dp_tol);

// Number of qualifying pairs whose P gap exceeds dP_min.
std::size_t count_branch_pairs(std::span<const ParametricPoint> points, double dp_tol, double dP_min);

struct StaticPoint {
  double p;
  double P;
  double stderr_P;
  double p_hat;
};

// Uniform bond percolation reference P0(p). Sample s at probability p uses
// the stream derive_seed(seed, {activation tag, bits(p), s}).
std::vector<StaticPoint> static_percolation_curve(const LatticeSpec& spec, std::span<const double> p_grid,
                                                  int n_samples, std::uint64_t seed, unsigned threads = 0);

// Linear interpolation of P0 at p (curve sorted by p; clamps outside).
double interpolate_curve(std::span<const StaticPoint> curve, double p);

// First p where L^exponent * P0 of the larger lattice crosses that of the
// smaller one, by linear interpolation between grid points. Both curves
// must share the same p grid. exponent = 0 compares raw P0; the 2D
// order-parameter scaling exponent beta/nu = 5/48 makes the curves cross at
// the threshold up to corrections to scaling.
std::optional<double> estimate_crossing(std::span<const StaticPoint> small, double L_small,
                                        std::span<const StaticPoint> large, double L_large, double exponent);

inline constexpr double kBetaOverNu2D = 5.0 / 48.0;

}  // namespace entperc
