#include "entperc/two_colour.hpp"

#include <cmath>
#include <string>

#include "entperc/errors.hpp"
#include "entperc/parallel.hpp"
#include "entperc/rng.hpp"
#include "entperc/stats.hpp"
#include "entperc/union_find.hpp"

namespace entperc {

namespace {

LatticeSpec coloured_spec(std::int64_t L) {
  if (L < 2 || L % 2 != 0) throw ConfigError("two-colour lattice needs an even L >= 2, got " + std::to_string(L));
  LatticeSpec spec{Topology::square, L, Boundary::periodic};
  spec.validate();
  return spec;
}

void check_phi(double phi1, double phi2) {
  if (!(phi1 >= 0.0 && phi1 <= 1.0 && phi2 >= 0.0 && phi2 <= 1.0))
    throw ConfigError("activation probabilities must lie in [0, 1]");
}

void fill_constrained(const PerturbedLattice& lattice, std::uint64_t seed, std::vector<std::uint8_t>& colours) {
  const auto L = static_cast<std::size_t>(lattice.spec().side);
  colours.resize(lattice.edge_count());
  Rng rng(derive_seed(seed, {tag(StreamTag::colouring)}));
  std::vector<std::uint8_t> row_phase(L), col_phase(L);
  for (auto& r : row_phase) r = static_cast<std::uint8_t>(rng.next() >> 63);
  for (auto& c : col_phase) c = static_cast<std::uint8_t>(rng.next() >> 63);
  for (std::size_t j = 0; j < L; ++j) {
    for (std::size_t i = 0; i < L; ++i) {
      const std::size_t node = j * L + i;
      colours[static_cast<std::size_t>(lattice.forward_edge(node, 0))] =
          static_cast<std::uint8_t>(1 + (i + row_phase[j]) % 2);
      colours[static_cast<std::size_t>(lattice.forward_edge(node, 1))] =
          static_cast<std::uint8_t>(1 + (j + col_phase[i]) % 2);
    }
  }
}

void shuffle_colours(std::vector<std::uint8_t>& colours, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {tag(StreamTag::reshuffle)}));
  shuffle(std::span<std::uint8_t>(colours), rng);
}

// Per-sample colouring used by the surface and dynamic routines.
void sample_colouring(const PerturbedLattice& lattice, bool constrained, std::uint64_t seed, std::size_t s,
                      std::vector<std::uint8_t>& colours) {
  const std::uint64_t cseed = derive_seed(seed, {tag(StreamTag::colouring), s});
  fill_constrained(lattice, cseed, colours);
  if (!constrained) shuffle_colours(colours, cseed);
}

std::size_t giant(std::span<const Edge> edges, std::span<const std::uint8_t> colours,
                  std::span<const std::uint64_t> draws, std::uint64_t thr1, std::uint64_t thr2, UnionFind& uf) {
  uf.reset(uf.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const std::uint64_t thr = colours[e] == 1 ? thr1 : thr2;
    if (draws[e] < thr) uf.unite(edges[e].a, edges[e].b);
  }
  return uf.largest();
}

void fill_draws(std::uint64_t seed, std::vector<std::uint64_t>& draws) {
  Rng rng(seed);
  for (auto& d : draws) d = rng.next() >> 11;
}

void check_budget(double cost, double budget) {
  if (cost > budget)
    throw BudgetError("run needs " + std::to_string(std::llround(cost)) + " node-evaluations, budget is " +
                      std::to_string(std::llround(budget)));
}

}  // namespace

ColouredLattice generate_constrained(std::int64_t L, std::uint64_t seed) {
  ColouredLattice out;
  out.spec = coloured_spec(L);
  out.constrained = true;
  out.seed = seed;
  fill_constrained(generate_lattice(out.spec), seed, out.colours);
  return out;
}

ColouredLattice generate_reshuffled(const ColouredLattice& coloured, std::uint64_t seed) {
  ColouredLattice out = coloured;
  out.constrained = false;
  out.seed = seed;
  shuffle_colours(out.colours, seed);
  return out;
}

GiantEstimate giant_fraction(const ColouredLattice& coloured, double phi1, double phi2, int n_samples,
                             std::uint64_t seed) {
  check_phi(phi1, phi2);
  if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
  const PerturbedLattice lattice = generate_lattice(coloured.spec);
  if (coloured.colours.size() != lattice.edge_count()) throw ConfigError("colouring does not match the lattice");
  UnionFind uf(lattice.node_count());
  std::vector<std::uint64_t> draws(lattice.edge_count());
  const std::uint64_t t1 = bernoulli_threshold(phi1), t2 = bernoulli_threshold(phi2);
  Welford w;
  for (int s = 0; s < n_samples; ++s) {
    fill_draws(derive_seed(seed, {tag(StreamTag::activation), static_cast<std::uint64_t>(s)}), draws);
    const std::size_t g = giant(lattice.edges(), coloured.colours, draws, t1, t2, uf);
    w.add(static_cast<double>(g) / static_cast<double>(lattice.node_count()));
  }
  return {w.mean, w.std_error()};
}

std::vector<SurfacePoint> sample_surface(const SurfaceConfig& config,
                                         std::span<const std::pair<double, double>> points) {
  const LatticeSpec spec = coloured_spec(config.L);
  if (config.n_samples < 1) throw ConfigError("n_samples must be >= 1");
  for (const auto& [a, b] : points) check_phi(a, b);
  check_budget(static_cast<double>(spec.node_count()) * static_cast<double>(points.size()) * config.n_samples,
               config.budget);

  const PerturbedLattice lattice = generate_lattice(spec);
  const std::size_t N = lattice.node_count();
  const auto ns = static_cast<std::size_t>(config.n_samples);
  const std::size_t np = points.size();
  std::vector<double> samples(np * ns);

  const unsigned workers = resolve_threads(config.threads);
  std::vector<UnionFind> finders(workers, UnionFind(N));
  std::vector<std::vector<std::uint8_t>> colours(workers);
  std::vector<std::vector<std::uint64_t>> draws(workers, std::vector<std::uint64_t>(lattice.edge_count()));

  parallel_for(ns, config.threads, [&](std::size_t s, unsigned w) {
    sample_colouring(lattice, config.constrained, config.seed, s, colours[w]);
    fill_draws(derive_seed(config.seed, {tag(StreamTag::activation), s}), draws[w]);
    for (std::size_t k = 0; k < np; ++k) {
      const auto [phi1, phi2] = points[k];
      const std::size_t g = giant(lattice.edges(), colours[w], draws[w], bernoulli_threshold(phi1),
                                  bernoulli_threshold(phi2), finders[w]);
      samples[k * ns + s] = static_cast<double>(g) / static_cast<double>(N);
    }
  });

  std::vector<SurfacePoint> out(np);
  for (std::size_t k = 0; k < np; ++k) {
    Welford w;
    for (std::size_t s = 0; s < ns; ++s) w.add(samples[k * ns + s]);
    out[k] = {points[k].first, points[k].second, w.mean, w.std_error()};
  }
  return out;
}

std::vector<double> unit_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw ConfigError("grid step must lie in (0, 1]");
  const double cells = 1.0 / step;
  const double n = std::round(cells);
  if (std::abs(cells - n) > 1e-9 * n) throw ConfigError("grid step must divide 1");
  std::vector<double> grid(static_cast<std::size_t>(n) + 1);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<double>(i) / n;
  return grid;
}

PhaseDiagram sweep_phase_diagram(const SurfaceConfig& config, double grid_step) {
  PhaseDiagram d;
  d.phi1_grid = unit_grid(grid_step);
  d.phi2_grid = d.phi1_grid;
  d.n_samples = config.n_samples;
  d.constrained = config.constrained;
  std::vector<std::pair<double, double>> points;
  points.reserve(d.phi1_grid.size() * d.phi2_grid.size());
  for (double a : d.phi1_grid)
    for (double b : d.phi2_grid) points.emplace_back(a, b);
  const auto surface = sample_surface(config, points);
  d.S.reserve(surface.size());
  d.std_error.reserve(surface.size());
  for (const auto& pt : surface) {
    d.S.push_back(pt.S);
    d.std_error.push_back(pt.std_error);
  }
  return d;
}

std::vector<GammaPoint> gamma_trajectory(double ratio, std::span<const double> times) {
  std::vector<GammaPoint> out;
  out.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && times[i] < times[i - 1]) throw ConfigError("time grid must be sorted");
    const double t = times[i];
    const double a = 1.0 - std::abs(std::cos(t));
    const double b = 1.0 - std::abs(std::cos(ratio * t));
    out.push_back({t, a, b, 0.5 * (a + b)});
  }
  return out;
}

TwoColourTrajectory dynamic_two_colour(const SurfaceConfig& config, double ratio, std::span<const double> times) {
  const LatticeSpec spec = coloured_spec(config.L);
  if (config.n_samples < 1) throw ConfigError("n_samples must be >= 1");
  if (times.empty()) throw ConfigError("time grid is empty");
  TwoColourTrajectory out;
  out.gamma = gamma_trajectory(ratio, times);
  out.n_samples = config.n_samples;
  check_budget(static_cast<double>(spec.node_count()) * static_cast<double>(times.size()) * config.n_samples,
               config.budget);

  const PerturbedLattice lattice = generate_lattice(spec);
  const std::size_t N = lattice.node_count();
  const auto ns = static_cast<std::size_t>(config.n_samples);
  const std::size_t nt = times.size();
  std::vector<double> samples(ns * nt);

  const unsigned workers = resolve_threads(config.threads);
  std::vector<UnionFind> finders(workers, UnionFind(N));
  std::vector<std::vector<std::uint8_t>> colours(workers);
  std::vector<std::vector<std::uint64_t>> draws(workers, std::vector<std::uint64_t>(lattice.edge_count()));

  parallel_for(ns, config.threads, [&](std::size_t s, unsigned w) {
    sample_colouring(lattice, config.constrained, config.seed, s, colours[w]);
    for (std::size_t ti = 0; ti < nt; ++ti) {
      fill_draws(derive_seed(config.seed, {tag(StreamTag::activation), s, ti}), draws[w]);
      const auto& g = out.gamma[ti];
      const std::size_t size = giant(lattice.edges(), colours[w], draws[w], bernoulli_threshold(g.phi1),
                                     bernoulli_threshold(g.phi2), finders[w]);
      samples[s * nt + ti] = static_cast<double>(size) / static_cast<double>(N);
    }
  });

  out.P.resize(nt);
  out.stderr_P.resize(nt);
  for (std::size_t ti = 0; ti < nt; ++ti) {
    Welford w;
    for (std::size_t s = 0; s < ns; ++s) w.add(samples[s * nt + ti]);
    out.P[ti] = w.mean;
    out.stderr_P[ti] = w.std_error();
  }
  return out;
}

}  // namespace entperc
