#include "entperc/percolation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "entperc/errors.hpp"
#include "entperc/parallel.hpp"
#include "entperc/rng.hpp"
#include "entperc/stats.hpp"
#include "entperc/union_find.hpp"

namespace entperc {

std::size_t ActivationSample::active_count() const noexcept {
  std::size_t n = 0;
  for (auto w : words) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

ActivationSample empty_sample(std::size_t edge_count) {
  ActivationSample s;
  s.edge_count = edge_count;
  s.words.assign((edge_count + 63) / 64, 0);
  return s;
}

ActivationSample sample_activation(const PerturbedLattice& lattice, const FrequencyAssignment& assignment, double t,
                                   std::uint64_t seed) {
  const std::size_t E = lattice.edge_count();
  if (assignment.omegas.size() != E) throw ConfigError("frequency assignment does not match the lattice");
  ActivationSample s = empty_sample(E);
  s.time = t;
  s.seed = seed;
  Rng rng(seed);
  for (std::size_t e = 0; e < E; ++e) {
    const std::uint64_t thr = bernoulli_threshold(1.0 - std::abs(std::cos(assignment.omegas[e] * t)));
    if ((rng.next() >> 11) < thr) s.set(e);
  }
  return s;
}

ActivationSample sample_uniform_activation(const PerturbedLattice& lattice, double p, std::uint64_t seed) {
  const std::size_t E = lattice.edge_count();
  ActivationSample s = empty_sample(E);
  s.seed = seed;
  Rng rng(seed);
  const std::uint64_t thr = bernoulli_threshold(p);
  for (std::size_t e = 0; e < E; ++e)
    if ((rng.next() >> 11) < thr) s.set(e);
  return s;
}

double largest_component_fraction(const PerturbedLattice& lattice, const ActivationSample& sample) {
  if (sample.edge_count != lattice.edge_count()) throw ConfigError("activation sample does not match the lattice");
  UnionFind uf(lattice.node_count());
  const auto edges = lattice.edges();
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (sample.active(e)) uf.unite(edges[e].a, edges[e].b);
  return static_cast<double>(uf.largest()) / static_cast<double>(lattice.node_count());
}

std::vector<std::size_t> component_sizes(const PerturbedLattice& lattice, const ActivationSample& sample) {
  if (sample.edge_count != lattice.edge_count()) throw ConfigError("activation sample does not match the lattice");
  const std::size_t N = lattice.node_count();
  UnionFind uf(N);
  const auto edges = lattice.edges();
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (sample.active(e)) uf.unite(edges[e].a, edges[e].b);
  std::vector<std::size_t> sizes;
  for (std::uint32_t v = 0; v < N; ++v)
    if (uf.find(v) == v) sizes.push_back(uf.component_size(v));
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  return sizes;
}

std::uint64_t activation_seed(std::uint64_t master, std::uint64_t d, std::uint64_t a, std::uint64_t ti, bool coupled) {
  if (coupled) return derive_seed(master, {tag(StreamTag::activation), d, a});
  return derive_seed(master, {tag(StreamTag::activation), d, a, ti});
}

std::uint64_t disorder_seed(std::uint64_t master, std::uint64_t d) {
  return derive_seed(master, {tag(StreamTag::lattice), d});
}

double trajectory_cost(const TrajectoryConfig& c) {
  return static_cast<double>(c.lattice.node_count()) * c.n_disorder * static_cast<double>(c.n_activation) *
         static_cast<double>(c.times.size());
}

namespace {

struct Outcome {
  std::size_t active;
  std::size_t largest;
};

// Activates edge e when draw(e) < thresholds[e] and tracks components.
template <class Draw>
Outcome percolate(std::span<const Edge> edges, std::span<const std::uint64_t> thresholds, Draw&& draw,
                  UnionFind& uf) {
  uf.reset(uf.size());
  std::size_t active = 0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (draw(e) < thresholds[e]) {
      ++active;
      uf.unite(edges[e].a, edges[e].b);
    }
  }
  return {active, uf.largest()};
}

void fill_thresholds(std::span<const double> omegas, double t, std::vector<std::uint64_t>& out) {
  out.resize(omegas.size());
  for (std::size_t e = 0; e < omegas.size(); ++e)
    out[e] = bernoulli_threshold(1.0 - std::abs(std::cos(omegas[e] * t)));
}

}  // namespace

TrajectoryRecord run_trajectory(const TrajectoryConfig& config) {
  config.lattice.validate();
  freq::validate(config.model);
  if (config.times.empty()) throw ConfigError("time grid is empty");
  if (!std::is_sorted(config.times.begin(), config.times.end())) throw ConfigError("time grid must be sorted");
  if (config.n_disorder < 1 || config.n_activation < 1) throw ConfigError("realization counts must be >= 1");
  if (trajectory_cost(config) > config.budget)
    throw BudgetError("trajectory needs " + std::to_string(std::llround(trajectory_cost(config))) +
                      " node-evaluations, budget is " + std::to_string(std::llround(config.budget)));

  const PerturbedLattice base = generate_lattice(config.lattice);
  const auto edges = base.edges();
  const std::size_t N = base.node_count();
  const std::size_t E = base.edge_count();
  const std::size_t n_t = config.times.size();
  const auto n_d = static_cast<std::size_t>(config.n_disorder);
  const auto n_a = static_cast<std::size_t>(config.n_activation);

  // per-sample outcomes, indexed [d][a][ti]
  std::vector<double> p_samples(n_d * n_a * n_t);
  std::vector<double> P_samples(n_d * n_a * n_t);
  auto slot = [&](std::size_t d, std::size_t a, std::size_t ti) { return (d * n_a + a) * n_t + ti; };

  const unsigned workers = resolve_threads(config.threads);
  std::vector<UnionFind> finders(workers, UnionFind(N));
  std::vector<std::vector<std::uint64_t>> thresholds(workers);
  std::vector<std::vector<std::uint64_t>> draws(workers);

  for (std::size_t d = 0; d < n_d; ++d) {
    const std::uint64_t dseed = disorder_seed(config.seed, d);
    FrequencyAssignment assignment = assign(perturb(base, config.sigma, dseed), config.model, dseed);
    if (config.reshuffle) assignment = reshuffle(assignment, dseed);
    const std::span<const double> omegas = assignment.omegas;

    if (!config.coupled) {
      parallel_for(n_t, config.threads, [&](std::size_t ti, unsigned w) {
        fill_thresholds(omegas, config.times[ti], thresholds[w]);
        for (std::size_t a = 0; a < n_a; ++a) {
          Rng rng(activation_seed(config.seed, d, a, ti));
          const Outcome o = percolate(edges, thresholds[w], [&](std::size_t) { return rng.next() >> 11; }, finders[w]);
          p_samples[slot(d, a, ti)] = static_cast<double>(o.active) / static_cast<double>(E);
          P_samples[slot(d, a, ti)] = static_cast<double>(o.largest) / static_cast<double>(N);
        }
      });
    } else {
      parallel_for(n_a, config.threads, [&](std::size_t a, unsigned w) {
        Rng rng(activation_seed(config.seed, d, a, 0, true));
        auto& u = draws[w];
        u.resize(E);
        for (auto& x : u) x = rng.next() >> 11;
        for (std::size_t ti = 0; ti < n_t; ++ti) {
          fill_thresholds(omegas, config.times[ti], thresholds[w]);
          const Outcome o = percolate(edges, thresholds[w], [&](std::size_t e) { return u[e]; }, finders[w]);
          p_samples[slot(d, a, ti)] = static_cast<double>(o.active) / static_cast<double>(E);
          P_samples[slot(d, a, ti)] = static_cast<double>(o.largest) / static_cast<double>(N);
        }
      });
    }
  }

  TrajectoryRecord rec;
  rec.times = config.times;
  rec.n_disorder = config.n_disorder;
  rec.n_activation = config.n_activation;
  rec.p_hat.resize(n_t);
  rec.P_hat.resize(n_t);
  rec.stderr_p.resize(n_t);
  rec.stderr_P.resize(n_t);
  for (std::size_t ti = 0; ti < n_t; ++ti) {
    Welford wp, wP;
    for (std::size_t d = 0; d < n_d; ++d)
      for (std::size_t a = 0; a < n_a; ++a) {
        wp.add(p_samples[slot(d, a, ti)]);
        wP.add(P_samples[slot(d, a, ti)]);
      }
    rec.p_hat[ti] = wp.mean;
    rec.P_hat[ti] = wP.mean;
    rec.stderr_p[ti] = wp.std_error();
    rec.stderr_P[ti] = wP.std_error();
  }
  return rec;
}

std::vector<ParametricPoint> parametric_Pp(const TrajectoryRecord& record) {
  if (record.size() == 0) throw ConfigError("trajectory record is empty");
  std::vector<ParametricPoint> out(record.size());
  for (std::size_t i = 0; i < record.size(); ++i) out[i] = {record.times[i], record.p_hat[i], record.P_hat[i]};
  return out;
}

BranchGap max_branch_gap(std::span<const ParametricPoint> points, double dp_tol) {
  BranchGap gap;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (std::abs(points[i].p - points[j].p) >= dp_tol) continue;
      ++gap.pairs;
      const double dP = std::abs(points[i].P - points[j].P);
      if (dP > gap.max_dP) {
        gap.max_dP = dP;
        gap.i = i;
        gap.j = j;
      }
    }
  }
  return gap;
}

std::size_t count_branch_pairs(std::span<const ParametricPoint> points, double dp_tol, double dP_min) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (std::abs(points[i].p - points[j].p) < dp_tol && std::abs(points[i].P - points[j].P) > dP_min) ++n;
  return n;
}

std::vector<StaticPoint> static_percolation_curve(const LatticeSpec& spec, std::span<const double> p_grid,
                                                  int n_samples, std::uint64_t seed, unsigned threads) {
  if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
  for (double p : p_grid)
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("activation probabilities must lie in [0, 1]");
  const PerturbedLattice lattice = generate_lattice(spec);
  const auto edges = lattice.edges();
  const std::size_t N = lattice.node_count();
  const std::size_t E = lattice.edge_count();
  const auto ns = static_cast<std::size_t>(n_samples);

  std::vector<double> P_samples(p_grid.size() * ns);
  std::vector<double> p_samples(p_grid.size() * ns);
  const unsigned workers = resolve_threads(threads);
  std::vector<UnionFind> finders(workers, UnionFind(N));
  std::vector<std::vector<std::uint64_t>> thresholds(workers);

  parallel_for(p_grid.size() * ns, threads, [&](std::size_t task, unsigned w) {
    const std::size_t i = task / ns;
    const std::size_t s = task % ns;
    const double p = p_grid[i];
    thresholds[w].assign(E, bernoulli_threshold(p));
    Rng rng(derive_seed(seed, {tag(StreamTag::activation), std::bit_cast<std::uint64_t>(p), s}));
    const Outcome o = percolate(edges, thresholds[w], [&](std::size_t) { return rng.next() >> 11; }, finders[w]);
    P_samples[task] = static_cast<double>(o.largest) / static_cast<double>(N);
    p_samples[task] = static_cast<double>(o.active) / static_cast<double>(E);
  });

  std::vector<StaticPoint> curve(p_grid.size());
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    Welford wP, wp;
    for (std::size_t s = 0; s < ns; ++s) {
      wP.add(P_samples[i * ns + s]);
      wp.add(p_samples[i * ns + s]);
    }
    curve[i] = {p_grid[i], wP.mean, wP.std_error(), wp.mean};
  }
  return curve;
}

double interpolate_curve(std::span<const StaticPoint> curve, double p) {
  if (curve.empty()) throw ConfigError("empty reference curve");
  if (p <= curve.front().p) return curve.front().P;
  if (p >= curve.back().p) return curve.back().P;
  const auto it = std::lower_bound(curve.begin(), curve.end(), p,
                                   [](const StaticPoint& s, double v) { return s.p < v; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (p - lo.p) / (hi.p - lo.p);
  return lo.P + w * (hi.P - lo.P);
}

std::optional<double> estimate_crossing(std::span<const StaticPoint> small, double L_small,
                                        std::span<const StaticPoint> large, double L_large, double exponent) {
  if (small.size() != large.size() || small.size() < 2) throw ConfigError("crossing needs two curves on one grid");
  const double fs = std::pow(L_small, exponent);
  const double fl = std::pow(L_large, exponent);
  auto diff = [&](std::size_t i) { return fl * large[i].P - fs * small[i].P; };
  for (std::size_t i = 0; i + 1 < small.size(); ++i) {
    if (small[i].p != large[i].p || small[i + 1].p != large[i + 1].p)
      throw ConfigError("crossing needs two curves on one grid");
    const double d0 = diff(i), d1 = diff(i + 1);
    if (d0 == 0.0) return small[i].p;
    if ((d0 < 0.0) != (d1 < 0.0)) {
      const double w = d0 / (d0 - d1);
      return small[i].p + w * (small[i + 1].p - small[i].p);
    }
  }
  return std::nullopt;
}

}  // namespace entperc
