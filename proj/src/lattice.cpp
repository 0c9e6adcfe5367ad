#include "entperc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "entperc/errors.hpp"
#include "entperc/rng.hpp"

namespace entperc {

Topology parse_topology(std::string_view name) {
  if (name == "square") return Topology::square;
  if (name == "triangular") return Topology::triangular;
  throw ConfigError("unknown topology '" + std::string(name) + "'");
}

Boundary parse_boundary(std::string_view name) {
  if (name == "periodic") return Boundary::periodic;
  if (name == "open") return Boundary::open;
  throw ConfigError("unknown boundary '" + std::string(name) + "'");
}

std::string_view to_string(Topology t) noexcept { return t == Topology::square ? "square" : "triangular"; }
std::string_view to_string(Boundary b) noexcept { return b == Boundary::periodic ? "periodic" : "open"; }
std::string_view to_string(PairOrientation o) noexcept {
  return o == PairOrientation::collinear ? "collinear" : "perpendicular";
}

void LatticeSpec::validate() const {
  if (side < 2) throw ConfigError("lattice side must be >= 2, got " + std::to_string(side));
  if (side > 46340) throw ConfigError("lattice side too large for 32-bit node indices");
  if (topology != Topology::square && topology != Topology::triangular) throw ConfigError("invalid topology");
}

namespace {

constexpr double kSqrt3Half = 0.86602540378443864676;

struct Direction {
  int di;
  int dj;
  Point offset;
};

std::span<const Direction> directions_for(Topology t) {
  static const Direction square[] = {{1, 0, {1.0, 0.0}}, {0, 1, {0.0, 1.0}}};
  static const Direction triangular[] = {
      {1, 0, {1.0, 0.0}}, {0, 1, {0.5, kSqrt3Half}}, {-1, 1, {-0.5, kSqrt3Half}}};
  if (t == Topology::square) return square;
  return triangular;
}

double edge_length(const Point& offset, const Point& pa, const Point& pa0, const Point& pb, const Point& pb0) {
  // displacement difference added to the unperturbed offset
  const double dx = offset.x + (pb.x - pb0.x) - (pa.x - pa0.x);
  const double dy = offset.y + (pb.y - pb0.y) - (pa.y - pa0.y);
  return std::hypot(dx, dy);
}

Point grid_position(Topology t, std::int64_t i, std::int64_t j) {
  if (t == Topology::square) return {static_cast<double>(i), static_cast<double>(j)};
  return {static_cast<double>(i) + 0.5 * static_cast<double>(j), kSqrt3Half * static_cast<double>(j)};
}

}  // namespace

PerturbedLattice generate_lattice(const LatticeSpec& spec) {
  spec.validate();
  PerturbedLattice lat;
  lat.spec_ = spec;
  const std::int64_t L = spec.side;
  const std::size_t n = spec.node_count();
  const auto dirs = directions_for(spec.topology);
  const int k = spec.directions();

  lat.positions_.resize(n);
  for (std::int64_t j = 0; j < L; ++j)
    for (std::int64_t i = 0; i < L; ++i) lat.positions_[static_cast<std::size_t>(j * L + i)] = grid_position(spec.topology, i, j);

  lat.forward_.assign(n * static_cast<std::size_t>(k), -1);
  lat.edges_.reserve(n * static_cast<std::size_t>(k));
  lat.offsets_.reserve(n * static_cast<std::size_t>(k));
  const bool periodic = spec.boundary == Boundary::periodic;
  for (std::int64_t j = 0; j < L; ++j) {
    for (std::int64_t i = 0; i < L; ++i) {
      const auto node = static_cast<std::uint32_t>(j * L + i);
      for (int d = 0; d < k; ++d) {
        std::int64_t ni = i + dirs[d].di;
        std::int64_t nj = j + dirs[d].dj;
        if (periodic) {
          ni = (ni + L) % L;
          nj = (nj + L) % L;
        } else if (ni < 0 || ni >= L || nj < 0 || nj >= L) {
          continue;
        }
        const auto other = static_cast<std::uint32_t>(nj * L + ni);
        Edge e{node, other};
        Point off = dirs[d].offset;
        if (e.a > e.b) {
          std::swap(e.a, e.b);
          off = {-off.x, -off.y};
        }
        lat.forward_[node * static_cast<std::size_t>(k) + static_cast<std::size_t>(d)] =
            static_cast<std::int64_t>(lat.edges_.size());
        lat.edges_.push_back(e);
        lat.offsets_.push_back(off);
        lat.direction_.push_back(static_cast<std::uint8_t>(d));
      }
    }
  }
  lat.lengths_.assign(lat.edges_.size(), 1.0);
  return lat;
}

PerturbedLattice perturb(const PerturbedLattice& lattice, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("perturbation sigma must be a finite value >= 0");
  if (lattice.sigma_ != 0.0) throw ConfigError("perturb requires an unperturbed lattice");
  PerturbedLattice out = lattice;
  out.sigma_ = sigma;
  out.seed_ = seed;
  if (sigma == 0.0) return out;

  Rng rng(derive_seed(seed, {tag(StreamTag::lattice)}));
  for (auto& p : out.positions_) {
    p.x += sigma * rng.normal();
    p.y += sigma * rng.normal();
  }
  const auto& base = lattice.positions_;
  for (std::size_t e = 0; e < out.edges_.size(); ++e) {
    const auto [a, b] = out.edges_[e];
    out.lengths_[e] = edge_length(out.offsets_[e], out.positions_[a], base[a], out.positions_[b], base[b]);
  }
  return out;
}

std::uint64_t Histogram::total() const noexcept {
  std::uint64_t s = 0;
  for (auto c : counts) s += c;
  return s;
}

Histogram make_histogram(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw ConfigError("histogram needs at least one bin");
  Histogram h;
  h.counts.assign(bins, 0);
  if (values.empty()) return h;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  h.lo = *mn;
  h.hi = *mx;
  if (!(h.hi > h.lo)) {
    h.lo -= 0.5;
    h.hi += 0.5;
  }
  const double scale = static_cast<double>(bins) / (h.hi - h.lo);
  for (double v : values) {
    auto idx = static_cast<std::size_t>((v - h.lo) * scale);
    if (idx >= bins) idx = bins - 1;
    ++h.counts[idx];
  }
  return h;
}

Histogram edge_length_histogram(const PerturbedLattice& lattice, std::size_t bins) {
  return make_histogram(lattice.lengths(), bins);
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> adjacent_edge_pairs(const PerturbedLattice& lattice,
                                                                         PairOrientation orientation) {
  const auto& spec = lattice.spec();
  if (spec.topology != Topology::square) throw ConfigError("edge-pair statistics need a square lattice");
  const std::int64_t L = spec.side;
  const bool periodic = spec.boundary == Boundary::periodic;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(lattice.node_count() * (orientation == PairOrientation::collinear ? 2 : 4));

  // incoming edge along direction d at node (i, j): forward edge of the predecessor
  auto incoming = [&](std::int64_t i, std::int64_t j, int d) -> std::int64_t {
    std::int64_t pi = i - (d == 0 ? 1 : 0);
    std::int64_t pj = j - (d == 1 ? 1 : 0);
    if (periodic) {
      pi = (pi + L) % L;
      pj = (pj + L) % L;
    } else if (pi < 0 || pj < 0) {
      return -1;
    }
    return lattice.forward_edge(static_cast<std::size_t>(pj * L + pi), d);
  };

  for (std::int64_t j = 0; j < L; ++j) {
    for (std::int64_t i = 0; i < L; ++i) {
      const auto node = static_cast<std::size_t>(j * L + i);
      std::int64_t in[2] = {incoming(i, j, 0), incoming(i, j, 1)};
      std::int64_t out[2] = {lattice.forward_edge(node, 0), lattice.forward_edge(node, 1)};
      if (orientation == PairOrientation::collinear) {
        for (int d = 0; d < 2; ++d)
          if (in[d] >= 0 && out[d] >= 0)
            pairs.emplace_back(static_cast<std::uint32_t>(in[d]), static_cast<std::uint32_t>(out[d]));
      } else {
        const std::int64_t xs[2] = {in[0], out[0]};
        const std::int64_t ys[2] = {in[1], out[1]};
        for (auto ex : xs)
          for (auto ey : ys)
            if (ex >= 0 && ey >= 0) pairs.emplace_back(static_cast<std::uint32_t>(ex), static_cast<std::uint32_t>(ey));
      }
    }
  }
  return pairs;
}

}  // namespace entperc
