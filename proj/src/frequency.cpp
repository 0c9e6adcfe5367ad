#include "entperc/frequency.hpp"

#include <cmath>

#include "entperc/errors.hpp"
#include "entperc/rng.hpp"

namespace entperc::freq {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be a finite value > 0");
}
}  // namespace

std::string kind_name(const ModelSpec& model) {
  return std::visit(overloaded{
                        [](const Uniform&) { return std::string("uniform"); },
                        [](const GaussianIid&) { return std::string("gaussian_iid"); },
                        [](const BernoulliIid&) { return std::string("bernoulli_iid"); },
                        [](const ExponentialDistance&) { return std::string("exponential_distance"); },
                        [](const ThresholdDistance&) { return std::string("threshold_distance"); },
                        [](const CustomNodeWeight&) { return std::string("custom_node_weight"); },
                    },
                    model);
}

void validate(const ModelSpec& model) {
  std::visit(overloaded{
                 [](const Uniform& m) { require_positive(m.omega, "omega"); },
                 [](const GaussianIid& m) {
                   if (!std::isfinite(m.mean)) throw ConfigError("omega mean must be finite");
                   if (!(m.stddev >= 0.0) || !std::isfinite(m.stddev)) throw ConfigError("omega stddev must be >= 0");
                 },
                 [](const BernoulliIid& m) {
                   if (!(m.eta >= 0.0 && m.eta <= 1.0)) throw ConfigError("eta must lie in [0, 1]");
                   require_positive(m.omega1, "omega1");
                   require_positive(m.omega2, "omega2");
                 },
                 [](const ExponentialDistance& m) {
                   require_positive(m.amplitude, "omega");
                   require_positive(m.decay_length, "decay length lambda");
                 },
                 [](const ThresholdDistance& m) {
                   require_positive(m.omega1, "omega1");
                   require_positive(m.omega2, "omega2");
                   require_positive(m.threshold, "threshold lambda");
                   if (m.omega1 == m.omega2) throw ConfigError("threshold model needs omega1 != omega2");
                 },
                 [](const CustomNodeWeight& m) {
                   if (!m.combine) throw ConfigError("custom node-weight model needs a combine function");
                 },
             },
             model);
}

}  // namespace entperc::freq

namespace entperc {

FrequencyAssignment assign(const PerturbedLattice& lattice, const freq::ModelSpec& model, std::uint64_t seed) {
  freq::validate(model);
  FrequencyAssignment out;
  out.model = model;
  out.seed = seed;
  const std::size_t E = lattice.edge_count();
  const auto lengths = lattice.lengths();
  out.omegas.resize(E);
  Rng rng(derive_seed(seed, {tag(StreamTag::frequency)}));

  if (const auto* m = std::get_if<freq::Uniform>(&model)) {
    std::fill(out.omegas.begin(), out.omegas.end(), m->omega);
  } else if (const auto* g = std::get_if<freq::GaussianIid>(&model)) {
    for (auto& w : out.omegas) w = g->mean + g->stddev * rng.normal();
  } else if (const auto* b = std::get_if<freq::BernoulliIid>(&model)) {
    const std::uint64_t thr = bernoulli_threshold(b->eta);
    for (auto& w : out.omegas) w = (rng.next() >> 11) < thr ? b->omega1 : b->omega2;
  } else if (const auto* x = std::get_if<freq::ExponentialDistance>(&model)) {
    for (std::size_t e = 0; e < E; ++e) out.omegas[e] = x->amplitude * std::exp(-lengths[e] / x->decay_length);
  } else if (const auto* t = std::get_if<freq::ThresholdDistance>(&model)) {
    for (std::size_t e = 0; e < E; ++e) out.omegas[e] = lengths[e] < t->threshold ? t->omega1 : t->omega2;
  } else if (const auto* c = std::get_if<freq::CustomNodeWeight>(&model)) {
    if (c->node_weights.size() != lattice.node_count())
      throw ConfigError("custom node-weight model needs one weight per node");
    const auto edges = lattice.edges();
    for (std::size_t e = 0; e < E; ++e) {
      const double w = c->combine(c->node_weights[edges[e].a], c->node_weights[edges[e].b]);
      if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("custom node-weight function produced a non-positive frequency");
      out.omegas[e] = w;
    }
  }
  return out;
}

FrequencyAssignment reshuffle(const FrequencyAssignment& assignment, std::uint64_t seed) {
  FrequencyAssignment out = assignment;
  out.reshuffled = true;
  Rng rng(derive_seed(seed, {tag(StreamTag::reshuffle)}));
  shuffle(std::span<double>(out.omegas), rng);
  return out;
}

Histogram frequency_histogram(const FrequencyAssignment& assignment, std::size_t bins) {
  return make_histogram(assignment.omegas, bins);
}

}  // namespace entperc
