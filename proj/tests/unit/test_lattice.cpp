#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "entperc/errors.hpp"
#include "entperc/lattice.hpp"
#include "entperc/rng.hpp"
#include "oracles.hpp"

using namespace entperc;

namespace {

LatticeSpec square(std::int64_t L, Boundary b = Boundary::periodic) { return {Topology::square, L, b}; }

double covariance(const PerturbedLattice& lat, PairOrientation o) {
  const auto pairs = adjacent_edge_pairs(lat, o);
  const auto len = lat.lengths();
  double m1 = 0, m2 = 0, m12 = 0;
  for (const auto& [a, b] : pairs) {
    m1 += len[a];
    m2 += len[b];
    m12 += len[a] * len[b];
  }
  const double n = static_cast<double>(pairs.size());
  return m12 / n - (m1 / n) * (m2 / n);
}

}  // namespace

TEST_CASE("generate_lattice counts") {
  const auto small = generate_lattice(square(2));
  CHECK(small.node_count() == 4);
  CHECK(small.edge_count() == 8);
  for (double d : small.lengths()) CHECK(d == 1.0);

  CHECK(generate_lattice({Topology::triangular, 3, Boundary::periodic}).edge_count() == 27);

  const auto big = generate_lattice(square(1000));
  CHECK(big.node_count() == 1'000'000);
  CHECK(big.edge_count() == 2'000'000);

  CHECK(generate_lattice(square(5, Boundary::open)).edge_count() == 2 * 5 * 4);
  const auto tri = generate_lattice({Topology::triangular, 6, Boundary::periodic});
  for (double d : tri.lengths()) CHECK(d == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("generate_lattice rejects invalid specs") {
  CHECK_THROWS_AS(generate_lattice(square(1)), ConfigError);
  CHECK_THROWS_AS(parse_topology("hexagonal"), ConfigError);
  CHECK_THROWS_AS(parse_boundary("twisted"), ConfigError);
}

TEST_CASE("edges join distinct nearest neighbours with a < b") {
  for (auto topo : {Topology::square, Topology::triangular})
    for (auto bnd : {Boundary::periodic, Boundary::open}) {
      const auto lat = generate_lattice({topo, 7, bnd});
      std::vector<int> degree(lat.node_count(), 0);
      for (const auto& e : lat.edges()) {
        CHECK(e.a < e.b);
        ++degree[e.a];
        ++degree[e.b];
      }
      if (bnd == Boundary::periodic)
        for (int d : degree) CHECK(d == 2 * lat.spec().directions());
    }
}

TEST_CASE("perturb") {
  const auto base = generate_lattice(square(40));
  SUBCASE("sigma = 0 leaves the lattice unchanged") {
    const auto p = perturb(base, 0.0, 99);
    for (std::size_t e = 0; e < base.edge_count(); ++e) CHECK(p.lengths()[e] == 1.0);
  }
  SUBCASE("same seed gives bitwise-identical lengths") {
    const auto a = perturb(base, 0.1, 7), b = perturb(base, 0.1, 7);
    CHECK(std::equal(a.lengths().begin(), a.lengths().end(), b.lengths().begin()));
    const auto c = perturb(base, 0.1, 8);
    CHECK_FALSE(std::equal(a.lengths().begin(), a.lengths().end(), c.lengths().begin()));
  }
  SUBCASE("negative sigma is a configuration error") { CHECK_THROWS_AS(perturb(base, -0.1, 0), ConfigError); }
  SUBCASE("a perturbed lattice cannot be perturbed again") {
    CHECK_THROWS_AS(perturb(perturb(base, 0.1, 0), 0.1, 1), ConfigError);
  }
}

TEST_CASE("perturbation preserves adjacency and wrap-around lengths") {
  Rng gen(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const auto L = static_cast<std::int64_t>(2 + gen.below(12));
    const auto topo = gen.below(2) ? Topology::square : Topology::triangular;
    const auto bnd = gen.below(2) ? Boundary::periodic : Boundary::open;
    const double sigma = 0.5 * gen.uniform();
    const auto base = generate_lattice({topo, L, bnd});
    const auto p = perturb(base, sigma, gen.next());
    REQUIRE(p.edge_count() == base.edge_count());
    for (std::size_t e = 0; e < base.edge_count(); ++e) {
      CHECK(p.edges()[e].a == base.edges()[e].a);
      CHECK(p.edges()[e].b == base.edges()[e].b);
      const auto a = p.edges()[e].a, b = p.edges()[e].b;
      const double dxa = p.positions()[a].x - base.positions()[a].x;
      const double dya = p.positions()[a].y - base.positions()[a].y;
      const double dxb = p.positions()[b].x - base.positions()[b].x;
      const double dyb = p.positions()[b].y - base.positions()[b].y;
      const double ox = base.offsets()[e].x + dxb - dxa, oy = base.offsets()[e].y + dyb - dya;
      CHECK(p.lengths()[e] == doctest::Approx(std::hypot(ox, oy)).epsilon(1e-12));
      CHECK(std::hypot(base.offsets()[e].x, base.offsets()[e].y) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("mean edge length matches the Rice mean") {
  const double sigma = 0.2;
  const auto lat = perturb(generate_lattice(square(500)), sigma, 11);
  double sum = 0, sum2 = 0;
  for (double d : lat.lengths()) {
    sum += d;
    sum2 += d * d;
  }
  const double n = static_cast<double>(lat.edge_count());
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::abs(mean - oracle::rice_mean(1.0, sigma)) < 3.0 * se);
}

TEST_CASE("edge_length_histogram") {
  SUBCASE("unperturbed lattice occupies one bin around d = 1") {
    const auto h = edge_length_histogram(generate_lattice(square(10)), 17);
    CHECK(h.total() == 200);
    CHECK(std::count_if(h.counts.begin(), h.counts.end(), [](auto c) { return c > 0; }) == 1);
    const auto bin = std::find_if(h.counts.begin(), h.counts.end(), [](auto c) { return c > 0; }) - h.counts.begin();
    const double half = 0.5 * h.bin_width();
    CHECK(std::abs(h.bin_center(static_cast<std::size_t>(bin)) - 1.0) <= half);
  }
  SUBCASE("sigma = 0.1 follows the Rice distribution (KS over bin edges)") {
    const double sigma = 0.1;
    const auto lat = perturb(generate_lattice(square(1000)), sigma, 3);
    const auto h = edge_length_histogram(lat, 100);
    REQUIRE(h.total() == 2'000'000);
    double cum = 0, ks = 0;
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
      cum += static_cast<double>(h.counts[i]);
      const double edge = h.lo + static_cast<double>(i + 1) * h.bin_width();
      ks = std::max(ks, std::abs(cum / 2e6 - oracle::rice_cdf(edge, 1.0, sigma)));
    }
    CHECK(ks < 0.01);
  }
  SUBCASE("sigma = 0.5 puts mass below d = 0.5") {
    const auto lat = perturb(generate_lattice(square(200)), 0.5, 5);
    const auto h = edge_length_histogram(lat, 50);
    std::uint64_t below = 0;
    for (std::size_t i = 0; i < h.counts.size(); ++i)
      if (h.lo + static_cast<double>(i + 1) * h.bin_width() <= 0.5) below += h.counts[i];
    CHECK(oracle::rice_cdf(0.5, 1.0, 0.5) > 0.0);
    CHECK(below > 0);
  }
  SUBCASE("zero bins is an error") { CHECK_THROWS_AS(edge_length_histogram(generate_lattice(square(4)), 0), ConfigError); }
}

TEST_CASE("adjacent edge length covariances") {
  for (double sigma : {0.05, 0.1, 0.2}) {
    CAPTURE(sigma);
    const auto lat = perturb(generate_lattice(square(300)), sigma, 17);
    REQUIRE(adjacent_edge_pairs(lat, PairOrientation::collinear).size() >= 100'000);
    const double s2 = sigma * sigma;
    CHECK(std::abs(covariance(lat, PairOrientation::collinear) + s2) < 0.2 * s2);
    CHECK(std::abs(covariance(lat, PairOrientation::perpendicular)) < 0.2 * s2);
  }
}

TEST_CASE("adjacent edge pairs share a node and have the requested geometry") {
  const auto lat = generate_lattice(square(6));
  const auto dirs = lat.edge_directions();
  for (auto o : {PairOrientation::collinear, PairOrientation::perpendicular}) {
    for (const auto& [e1, e2] : adjacent_edge_pairs(lat, o)) {
      const auto a = lat.edges()[e1], b = lat.edges()[e2];
      CHECK((a.a == b.a || a.a == b.b || a.b == b.a || a.b == b.b));
      CHECK((dirs[e1] == dirs[e2]) == (o == PairOrientation::collinear));
    }
  }
  CHECK_THROWS_AS(adjacent_edge_pairs(generate_lattice({Topology::triangular, 4, Boundary::periodic}),
                                      PairOrientation::collinear),
                  ConfigError);
}
