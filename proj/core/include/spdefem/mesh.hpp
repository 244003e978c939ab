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
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spdefem {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Zero-based node indices of one triangle, counter-clockwise once stored in
/// a Mesh.
using Triangle = std::array<std::size_t, 3>;

/// Row-major 2x2 matrix.
struct Mat2 {
  double a00 = 0.0, a01 = 0.0;
  double a10 = 0.0, a11 = 0.0;

  double det() const { return a00 * a11 - a01 * a10; }
  Mat2 transpose() const { return {a00, a10, a01, a11}; }
  Mat2 inverse() const;
  Point operator*(Point v) const { return {a00 * v.x + a01 * v.y, a10 * v.x + a11 * v.y}; }
  Mat2 operator*(const Mat2& o) const;
};

/// Immutable 2D triangulation.
///
/// Construction validates the input and normalizes orientation:
///  - every index lies in [0, node_count());
///  - |det T| > 1e-14 * (longest edge)^2 for every triangle;
///  - triangles with det T < 0 are stored with corners 2 and 3 swapped;
///  - no two nodes coincide within 1e-12 * bounding-box diagonal;
///  - every node belongs to at least one triangle;
///  - no edge is shared by more than two triangles.
/// Violations throw ValidationError.
class Mesh {
 public:
  Mesh(std::vector<Point> nodes, std::vector<Triangle> triangles);

  const std::vector<Point>& nodes() const noexcept { return nodes_; }
  const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t triangle_count() const noexcept { return triangles_.size(); }
  const Point& node(std::size_t i) const { return nodes_.at(i); }
  const Triangle& triangle(std::size_t t) const { return triangles_.at(t); }

  friend bool operator==(const Mesh&, const Mesh&) = default;

 private:
  std::vector<Point> nodes_;
  std::vector<Triangle> triangles_;
};

/// Affine map z = T * eta + p1 from the reference triangle (0,0),(1,0),(0,1)
/// onto a mesh triangle. T has columns p2 - p1 and p3 - p1.
struct AffineMap {
  Mat2 T;
  Point p1;
  double det_t = 0.0;
  Mat2 gram_inv;  // (T^T T)^-1
};

AffineMap triangle_map(const Mesh& mesh, std::size_t t);
AffineMap make_affine_map(Point p1, Point p2, Point p3);
Point map_to_physical(const AffineMap& map, Point eta);
double triangle_area(const AffineMap& map);
double total_area(const Mesh& mesh);

Mesh generate_structured_mesh(std::size_t nx, std::size_t ny,
                              std::pair<double, double> x_range = {0.0, 1.0},
                              std::pair<double, double> y_range = {0.0, 1.0});

/// Parses the plain-text mesh format:
///
///   # comment
///   nodes <N>
///   <x> <y>          (N lines)
///   triangles <M>
///   <i1> <i2> <i3>   (M lines, zero-based)
///
/// Throws ParseError (with line number) or ValidationError.
Mesh load_mesh(std::string_view text);
Mesh load_mesh_file(const std::string& path);

/// Writes `mesh` in the format read by load_mesh. Coordinates carry 17
/// significant digits so the round trip is exact.
std::string emit_mesh(const Mesh& mesh);

/// 64-bit FNV-1a of emit_mesh(mesh), as 16 lowercase hex digits.
std::string mesh_hash(const Mesh& mesh);

/// Undirected edge (a < b) together with the number of triangles using it.
struct EdgeUse {
  std::size_t a = 0;
  std::size_t b = 0;
  int count = 0;
};

/// All edges of the mesh, sorted by (a, b).
std::vector<EdgeUse> mesh_edges(const Mesh& mesh);
/// Edges that belong to exactly one triangle.
std::vector<std::pair<std::size_t, std::size_t>> boundary_edges(const Mesh& mesh);

double max_edge_length(const Mesh& mesh);
/// Euclidean distance from `p` to the closest boundary edge.
double distance_to_boundary(const Mesh& mesh, Point p);
/// Same, against a precomputed boundary_edges(mesh) list.
double distance_to_boundary(const Mesh& mesh,
                            const std::vector<std::pair<std::size_t, std::size_t>>& boundary, Point p);

/// Checks a mesh against the Matérn rules of thumb for a given empirical range:
/// the longest edge should be at most range/5 (range/10 preferred), and
/// prediction points should sit at least range/2 (a full range preferred)
/// away from the boundary.
struct QualityReport {
  double max_edge = 0.0;
  double min_boundary_distance = 0.0;
  bool passes_edge_rule = false;
  bool passes_boundary_rule = false;
  double range = 0.0;
  std::vector<std::string> warnings;
};

QualityReport quality_report(const Mesh& mesh, double range, std::span<const Point> probes);
QualityReport quality_report(const Mesh& mesh, double range, std::span<const Point> probes,
                             const std::vector<std::pair<std::size_t, std::size_t>>& boundary);

/// Node with smallest Euclidean distance to `p` (lowest index on ties).
std::size_t nearest_node(const Mesh& mesh, Point p);

}  // namespace spdefem
