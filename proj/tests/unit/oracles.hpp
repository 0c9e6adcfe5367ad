#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <queue>
#include <span>
#include <vector>

#include "entperc/lattice.hpp"

namespace oracle {

// Component label per node by breadth-first search over the active edges.
inline std::vector<std::size_t> bfs_component_sizes(std::size_t n_nodes, std::span<const entperc::Edge> edges,
                                                    const std::vector<bool>& active) {
  std::vector<std::vector<std::uint32_t>> adj(n_nodes);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!active[e]) continue;
    adj[edges[e].a].push_back(edges[e].b);
    adj[edges[e].b].push_back(edges[e].a);
  }
  std::vector<bool> seen(n_nodes, false);
  std::vector<std::size_t> sizes;
  for (std::size_t s = 0; s < n_nodes; ++s) {
    if (seen[s]) continue;
    std::size_t size = 0;
    std::queue<std::size_t> q;
    q.push(s);
    seen[s] = true;
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop();
      ++size;
      for (auto w : adj[v])
        if (!seen[w]) {
          seen[w] = true;
          q.push(w);
        }
    }
    sizes.push_back(size);
  }
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  return sizes;
}

// Rice density with the standard library Bessel function.
inline double rice_pdf(double x, double nu, double sigma) {
  const double s2 = 2.0 * sigma * sigma;
  const double z = x * nu / s2;
  return x / s2 * std::exp(-(x * x + nu * nu) / (2.0 * s2) + z) * std::cyl_bessel_i(0.0, z) * std::exp(-z);
}

// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double rice_cdf(double x, double nu, double sigma) {
  if (x <= 0.0) return 0.0;
  return simpson([&](double u) { return rice_pdf(u, nu, sigma); }, 0.0, x);
}

inline double rice_mean(double nu, double sigma) {
  const double hi = nu + 40.0 * sigma;
  return simpson([&](double u) { return u * rice_pdf(u, nu, sigma); }, 0.0, hi, 200000);
}

// Root of f on [lo, hi] by bisection; f(lo) and f(hi) must differ in sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  double flo = f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
