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
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spdefem/assembly.hpp"
#include "spdefem/mesh.hpp"

namespace spdefem {

/// Hat-function weights, one per mesh node. The represented function is
/// sum_i weights[i] * phi_i.
struct Field {
  std::vector<double> weights;

  std::size_t size() const noexcept { return weights.size(); }
  friend bool operator==(const Field&, const Field&) = default;
};

using ScalarFunction = std::function<double(double x, double y)>;

/// Reference-triangle points of the edge-midpoint rule, each weighted
/// |det T| / 6. Exact for polynomials of degree 2.
inline constexpr std::array<Point, 3> kEdgeMidpoints = {{{0.5, 0.0}, {0.0, 0.5}, {0.5, 0.5}}};

/// b_j = integral of f * phi_j, per triangle with the edge-midpoint rule.
/// Throws DomainError naming the physical point if f is not finite there.
std::vector<double> load_vector(const Mesh& mesh, const ScalarFunction& f);

/// L2 projection onto the hat-function space: solves J m = load_vector(f).
Field project(const Mesh& mesh, const FemMatrices& fem, const ScalarFunction& f);

/// Solves (kJ + D) u = load_vector(f). Requires k > 0.
Field solve_pde(const Mesh& mesh, const FemMatrices& fem, double k, const ScalarFunction& f);

/// Same solve with a precomputed right-hand side.
Field solve_pde_rhs(const FemMatrices& fem, double k, std::span<const double> rhs);

/// Barycentric coordinates of `p` with respect to triangle t.
std::array<double, 3> barycentric(const Mesh& mesh, std::size_t t, Point p);

/// First triangle (in index order) whose barycentric coordinates at `p` are
/// all >= -1e-12, if any.
std::optional<std::size_t> locate(const Mesh& mesh, Point p);

/// Value of the piecewise-linear field at `p`. Throws DomainError when `p`
/// lies outside the mesh.
double evaluate_field(const Mesh& mesh, const Field& field, Point p);

/// L2 norm of (field - exact) computed with the edge-midpoint rule.
double l2_error(const Mesh& mesh, const Field& field, const ScalarFunction& exact);

/// CSV with header `node,x,y,value`, one row per node, 17 significant digits.
std::string write_field_csv(const Mesh& mesh, const Field& field);
std::string write_values_csv(const Mesh& mesh, std::span<const double> values);

/// Parses the CSV written by write_field_csv. Rows must list nodes 0..N-1 in
/// order; when `mesh` is given, N and the coordinates must match it.
Field read_field_csv(std::string_view text, const Mesh* mesh = nullptr);

}  // namespace spdefem
