#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "entperc/lattice.hpp"

namespace entperc::freq {

// All edges share one frequency.
struct Uniform {
  double omega = 1.0;
};

// Independent N(mean, stddev^2) draws. Negative draws are kept: only
// |cos(omega t)| enters the dynamics.
struct GaussianIid {
  double mean = 1.0;
  double stddev = 0.0;
};

// Independent two-valued draws: omega1 with probability eta, else omega2.
struct BernoulliIid {
  double eta = 0.5;
  double omega1 = 1.0;
  double omega2 = 2.0;
};

// omega = amplitude * exp(-length / decay_length).
struct ExponentialDistance {
  double amplitude = 2.0;
  double decay_length = 2.0;
};

// omega = omega1 if length < threshold, omega2 otherwise (ties take omega2).
struct ThresholdDistance {
  double omega1 = 1.0;
  double omega2 = 2.0;
  double threshold = 1.0;
};

// omega_e = f(g_a, g_b) for a symmetric f and one weight per node.
struct CustomNodeWeight {
  std::vector<double> node_weights;
  std::function<double(double, double)> combine;
  std::string label = "custom";
};

using ModelSpec = std::variant<Uniform, GaussianIid, BernoulliIid, ExponentialDistance, ThresholdDistance, CustomNodeWeight>;

std::string kind_name(const ModelSpec& model);

// Throws ConfigError for invalid parameters.
void validate(const ModelSpec& model);

}  // namespace entperc::freq

namespace entperc {

struct FrequencyAssignment {
  std::vector<double> omegas;
  freq::ModelSpec model;
  std::uint64_t seed = 0;
  bool reshuffled = false;
};

// Pure function of (lattice, model, seed). Random kinds draw edge by edge
// from derive_seed(seed, {frequency tag}).
FrequencyAssignment assign(const PerturbedLattice& lattice, const freq::ModelSpec& model, std::uint64_t seed);

// Uniformly random permutation of the frequency multiset over the edges.
FrequencyAssignment reshuffle(const FrequencyAssignment& assignment, std::uint64_t seed);

Histogram frequency_histogram(const FrequencyAssignment& assignment, std::size_t bins);

}  // namespace entperc
