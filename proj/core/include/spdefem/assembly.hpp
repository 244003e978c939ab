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

#pragma once

#include <array>
#include <vector>

#include "spdefem/linalg.hpp"
#include "spdefem/mesh.hpp"

namespace spdefem {

/// Per-triangle 3x3 contribution, indexed by local corner (p1, p2, p3).
using LocalMatrix = std::array<std::array<double, 3>, 3>;

/// Gradients of the reference hat functions 1 - x - y, x and y. They are
/// constant on the reference triangle and sum to zero.
inline constexpr std::array<Point, 3> kRefGradients = {{{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}}};

/// Integral of any one reference hat function over the reference triangle.
inline constexpr double kRefHatIntegral = 1.0 / 6.0;

/// |det T| * M0 with M0 = 1/12 on the diagonal and 1/24 off it.
LocalMatrix local_mass(const AffineMap& map);

/// |det T| / 2 * g_a (T^T T)^-1 g_b^T over the reference gradients g.
/// Rows sum to zero.
LocalMatrix local_stiffness(const AffineMap& map);

/// Integral of each local hat function over the triangle, |det T| / 6 each.
std::array<double, 3> local_white_noise(const AffineMap& map);

/// Global mass matrix J_ij = integral of phi_i phi_j.
SparseSymMatrix assemble_mass(const Mesh& mesh);

/// Global stiffness matrix D_ij = integral of grad phi_i . grad phi_j.
/// No boundary term is added anywhere: leaving out the boundary integral is
/// exactly the zero-flux (Neumann) condition.
SparseSymMatrix assemble_stiffness(const Mesh& mesh);

/// White-noise variances a_i = integral of phi_i over the mesh.
std::vector<double> assemble_white_noise_cov(const Mesh& mesh);

struct FemMatrices {
  SparseSymMatrix mass;       // J
  SparseSymMatrix stiffness;  // D
  std::vector<double> white_noise;
};

/// J, D and the white-noise diagonal in a single pass over the triangles.
FemMatrices build_fem(const Mesh& mesh);

}  // namespace spdefem
