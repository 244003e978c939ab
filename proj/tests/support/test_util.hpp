#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "spdefem/linalg.hpp"
#include "spdefem/mesh.hpp"

namespace testutil {

inline oracle::Dense to_dense(const spdefem::SparseSymMatrix& a) {
  oracle::Dense d = oracle::zeros(a.dim());
  for (const auto& e : a.entries()) {
    d[e.row][e.col] = e.value;
    d[e.col][e.row] = e.value;
  }
  return d;
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline std::array<oracle::P2, 3> corners(const spdefem::Mesh& mesh, std::size_t t) {
  const auto& tri = mesh.triangle(t);
  std::array<oracle::P2, 3> p{};
  for (int k = 0; k < 3; ++k) p[k] = {mesh.nodes()[tri[k]].x, mesh.nodes()[tri[k]].y};
  return p;
}

/// Small irregular mesh: a unit square with a displaced interior node.
inline spdefem::Mesh irregular_mesh() {
  return spdefem::Mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.37, 0.58}, {0.5, 0}, {1, 0.45}},
                       {{0, 5, 4}, {5, 1, 4}, {1, 6, 4}, {6, 2, 4}, {2, 3, 4}, {3, 0, 4}});
}

}  // namespace testutil
