/* Copyright 2026 The spdefem Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "spdefem/assembly.hpp"

#include <cmath>

namespace spdefem {

LocalMatrix local_mass(const AffineMap& map) {
  const double s = std::abs(map.det_t);
  LocalMatrix m{};
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) m[a][b] = s * (a == b ? 1.0 / 12.0 : 1.0 / 24.0);
  }
  return m;
}

LocalMatrix local_stiffness(const AffineMap& map) {
  const double half_det = std::abs(map.det_t) / 2.0;
  const Mat2& g = map.gram_inv;
  LocalMatrix m{};
  for (int a = 0; a < 3; ++a) {
    const Point ga = kRefGradients[a];
    // Row vector g_a times (T^T T)^-1.
    const Point ga_g = {ga.x * g.a00 + ga.y * g.a10, ga.x * g.a01 + ga.y * g.a11};
    for (int b = a; b < 3; ++b) {
      const Point gb = kRefGradients[b];
      m[a][b] = half_det * (ga_g.x * gb.x + ga_g.y * gb.y);
      m[b][a] = m[a][b];
    }
  }
  return m;
}

std::array<double, 3> local_white_noise(const AffineMap& map) {
  const double v = std::abs(map.det_t) * kRefHatIntegral;
  return {v, v, v};
}

namespace {

void scatter(TripletAccumulator& acc, const Triangle& tri, const LocalMatrix& local) {
  for (int a = 0; a < 3; ++a) {
    for (int b = a; b < 3; ++b) acc.add(tri[a], tri[b], local[a][b]);
  }
}

}  // namespace

SparseSymMatrix assemble_mass(const Mesh& mesh) { return build_fem(mesh).mass; }

SparseSymMatrix assemble_stiffness(const Mesh& mesh) { return build_fem(mesh).stiffness; }

std::vector<double> assemble_white_noise_cov(const Mesh& mesh) {
  std::vector<double> a(mesh.node_count(), 0.0);
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto local = local_white_noise(triangle_map(mesh, t));
    const Triangle& tri = mesh.triangle(t);
    for (int k = 0; k < 3; ++k) a[tri[k]] += local[k];
  }
  return a;
}

FemMatrices build_fem(const Mesh& mesh) {
  const std::size_t n = mesh.node_count();
  TripletAccumulator mass(n);
  TripletAccumulator stiff(n);
  mass.reserve(6 * mesh.triangle_count());
  stiff.reserve(6 * mesh.triangle_count());
  std::vector<double> noise(n, 0.0);
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const AffineMap map = triangle_map(mesh, t);
    const Triangle& tri = mesh.triangle(t);
    scatter(mass, tri, local_mass(map));
    scatter(stiff, tri, local_stiffness(map));
    const auto local = local_white_noise(map);
    for (int k = 0; k < 3; ++k) noise[tri[k]] += local[k];
  }
  return {mass.finalize(), stiff.finalize(), std::move(noise)};
}

}  // namespace spdefem
