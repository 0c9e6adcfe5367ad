#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace entperc {

enum class Topology { square, triangular };
enum class Boundary { periodic, open };

Topology parse_topology(std::string_view name);
Boundary parse_boundary(std::string_view name);
std::string_view to_string(Topology t) noexcept;
std::string_view to_string(Boundary b) noexcept;

struct LatticeSpec {
  Topology topology = Topology::square;
  std::int64_t side = 2;  // nodes per side, L
  Boundary boundary = Boundary::periodic;

  // Throws ConfigError unless side >= 2 and N fits a 32-bit index.
  void validate() const;
  std::size_t node_count() const noexcept { return static_cast<std::size_t>(side * side); }
  // Number of lattice directions carrying forward edges (2 square, 3 triangular).
  int directions() const noexcept { return topology == Topology::square ? 2 : 3; }
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Edge {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
};

// Edge-pair geometry for the correlation estimators.
enum class PairOrientation { collinear, perpendicular };

std::string_view to_string(PairOrientation o) noexcept;

// A square or triangular lattice whose node positions may carry Gaussian
// displacements. Adjacency is always the unperturbed nearest-neighbour
// graph; only positions and edge lengths change under perturbation.
//
// Edge e joins nodes edges()[e].a < edges()[e].b. Its unperturbed offset
// (vector from a to b before displacement) is stored so that wrap-around
// edges on a periodic lattice keep unit length:
//   length = |offset + displacement(b) - displacement(a)|.
//
// Square node (i, j) has index j*L + i; its forward edges point to (i+1, j)
// and (i, j+1). Triangular nodes add the (i-1, j+1) direction and are
// embedded at (i + j/2, j*sqrt(3)/2).
class PerturbedLattice {
 public:
  const LatticeSpec& spec() const noexcept { return spec_; }
  std::span<const Point> positions() const noexcept { return positions_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const Point> offsets() const noexcept { return offsets_; }
  std::span<const double> lengths() const noexcept { return lengths_; }
  double sigma() const noexcept { return sigma_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::size_t node_count() const noexcept { return positions_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  // Index of the edge leaving `node` in lattice direction `dir`, or -1 when
  // the neighbour is outside an open lattice.
  std::int64_t forward_edge(std::size_t node, int dir) const noexcept {
    return forward_[node * static_cast<std::size_t>(spec_.directions()) + static_cast<std::size_t>(dir)];
  }

  // Direction (0 = x, 1 = y, 2 = triangular diagonal) of each edge.
  std::span<const std::uint8_t> edge_directions() const noexcept { return direction_; }

 private:
  friend PerturbedLattice generate_lattice(const LatticeSpec& spec);
  friend PerturbedLattice perturb(const PerturbedLattice& lattice, double sigma, std::uint64_t seed);

  LatticeSpec spec_;
  std::vector<Point> positions_;
  std::vector<Edge> edges_;
  std::vector<Point> offsets_;
  std::vector<double> lengths_;
  std::vector<std::int64_t> forward_;
  std::vector<std::uint8_t> direction_;
  double sigma_ = 0.0;
  std::uint64_t seed_ = 0;
};

// Unperturbed lattice: integer grid (sheared for triangular), unit lengths.
PerturbedLattice generate_lattice(const LatticeSpec& spec);

// Displace every node by i.i.d. N(0, sigma^2) in x and y, drawn node by node
// (x then y) from the stream derive_seed(seed, {lattice tag}).
// Requires an unperturbed input; throws ConfigError for sigma < 0.
PerturbedLattice perturb(const PerturbedLattice& lattice, double sigma, std::uint64_t seed);

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::uint64_t> counts;

  double bin_width() const noexcept { return (hi - lo) / static_cast<double>(counts.size()); }
  double bin_center(std::size_t i) const noexcept { return lo + (static_cast<double>(i) + 0.5) * bin_width(); }
  std::uint64_t total() const noexcept;
};

// Equal-width histogram over [min, max] of the values (a unit-wide window
// centred on the value when all values coincide).
Histogram make_histogram(std::span<const double> values, std::size_t bins);

Histogram edge_length_histogram(const PerturbedLattice& lattice, std::size_t bins);

// Adjacent edge pairs sharing a node. Collinear pairs are (incoming, outgoing)
// edges along the same axis; perpendicular pairs are every x/y combination of
// the edges at a node. Square lattices only (ConfigError otherwise).
std::vector<std::pair<std::uint32_t, std::uint32_t>> adjacent_edge_pairs(const PerturbedLattice& lattice,
                                                                         PairOrientation orientation);

}  // namespace entperc
