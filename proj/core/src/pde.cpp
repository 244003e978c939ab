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

#include "spdefem/pde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spdefem/error.hpp"
#include "spdefem/io.hpp"
#include "spdefem/linalg.hpp"

namespace spdefem {

std::vector<double> load_vector(const Mesh& mesh, const ScalarFunction& f) {
  std::vector<double> b(mesh.node_count(), 0.0);
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const AffineMap map = triangle_map(mesh, t);
    const Triangle& tri = mesh.triangle(t);
    const double w = std::abs(map.det_t) / 6.0;
    for (const Point& eta : kEdgeMidpoints) {
      const Point z = map_to_physical(map, eta);
      const double fz = f(z.x, z.y);
      if (!std::isfinite(fz)) {
        throw DomainError("right-hand side is not finite at (" + format_double(z.x) + ", " +
                          format_double(z.y) + ")");
      }
      const std::array<double, 3> phi = {1.0 - eta.x - eta.y, eta.x, eta.y};
      for (int k = 0; k < 3; ++k) b[tri[k]] += w * fz * phi[k];
    }
  }
  return b;
}

Field project(const Mesh& mesh, const FemMatrices& fem, const ScalarFunction& f) {
  const auto rhs = load_vector(mesh, f);
  return {factorize(fem.mass).solve(rhs)};
}

Field solve_pde_rhs(const FemMatrices& fem, double k, std::span<const double> rhs) {
  if (!(k > 0.0)) {
    throw PreconditionError("k must be positive (k = " + format_double(k) +
                            "); kJ + D is singular for k = 0");
  }
  const SparseSymMatrix op = linear_combination(k, fem.mass, 1.0, fem.stiffness);
  return {factorize(op).solve(rhs)};
}

Field solve_pde(const Mesh& mesh, const FemMatrices& fem, double k, const ScalarFunction& f) {
  if (!(k > 0.0)) {
    throw PreconditionError("k must be positive (k = " + format_double(k) +
                            "); kJ + D is singular for k = 0");
  }
  return solve_pde_rhs(fem, k, load_vector(mesh, f));
}

std::array<double, 3> barycentric(const Mesh& mesh, std::size_t t, Point p) {
  const Triangle& tri = mesh.triangle(t);
  const Point& a = mesh.nodes()[tri[0]];
  const Point& b = mesh.nodes()[tri[1]];
  const Point& c = mesh.nodes()[tri[2]];
  const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
  const double l2 = ((p.x - a.x) * (c.y - a.y) - (c.x - a.x) * (p.y - a.y)) / det;
  const double l3 = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) / det;
  return {1.0 - l2 - l3, l2, l3};
}

std::optional<std::size_t> locate(const Mesh& mesh, Point p) {
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto l = barycentric(mesh, t, p);
    if (l[0] >= -1e-12 && l[1] >= -1e-12 && l[2] >= -1e-12) return t;
  }
  return std::nullopt;
}

double evaluate_field(const Mesh& mesh, const Field& field, Point p) {
  if (field.size() != mesh.node_count()) {
    throw DimensionError("field has " + std::to_string(field.size()) + " weights, mesh has " +
                         std::to_string(mesh.node_count()) + " nodes");
  }
  const auto t = locate(mesh, p);
  if (!t) {
    throw DomainError("point (" + format_double(p.x) + ", " + format_double(p.y) +
                      ") is outside the mesh");
  }
  const Triangle& tri = mesh.triangle(*t);
  // Hat functions are exactly 1 at their own node.
  for (int k = 0; k < 3; ++k) {
    if (mesh.nodes()[tri[k]] == p) return field.weights[tri[k]];
  }
  const auto l = barycentric(mesh, *t, p);
  return l[0] * field.weights[tri[0]] + l[1] * field.weights[tri[1]] + l[2] * field.weights[tri[2]];
}

double l2_error(const Mesh& mesh, const Field& field, const ScalarFunction& exact) {
  if (field.size() != mesh.node_count()) throw DimensionError("field does not match mesh");
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const AffineMap map = triangle_map(mesh, t);
    const Triangle& tri = mesh.triangle(t);
    const double w = std::abs(map.det_t) / 6.0;
    for (const Point& eta : kEdgeMidpoints) {
      const Point z = map_to_physical(map, eta);
      const double uh = (1.0 - eta.x - eta.y) * field.weights[tri[0]] + eta.x * field.weights[tri[1]] +
                        eta.y * field.weights[tri[2]];
      const double e = uh - exact(z.x, z.y);
      sum += w * e * e;
    }
  }
  return std::sqrt(sum);
}

std::string write_values_csv(const Mesh& mesh, std::span<const double> values) {
  if (values.size() != mesh.node_count()) throw DimensionError("values do not match mesh");
  std::string out = "node,x,y,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Point& p = mesh.nodes()[i];
    out += std::to_string(i) + "," + format_double(p.x) + "," + format_double(p.y) + "," +
           format_double(values[i]) + "\n";
  }
  return out;
}

std::string write_field_csv(const Mesh& mesh, const Field& field) {
  return write_values_csv(mesh, field.weights);
}

Field read_field_csv(std::string_view text, const Mesh* mesh) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty CSV");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "node,x,y,value") throw ParseError(1, "expected header 'node,x,y,value'");

  Field field;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    for (std::size_t comma; (comma = rest.find(',')) != std::string_view::npos;) {
      cells.push_back(rest.substr(0, comma));
      rest.remove_prefix(comma + 1);
    }
    cells.push_back(rest);
    if (cells.size() != 4) throw ParseError(line_no, "expected 4 columns");
    const std::size_t node = parse_index(cells[0], line_no);
    if (node != field.weights.size()) {
      throw ParseError(line_no, "expected node " + std::to_string(field.weights.size()) + ", got " +
                                    std::to_string(node));
    }
    const Point p{parse_double(cells[1], line_no), parse_double(cells[2], line_no)};
    if (mesh != nullptr) {
      if (node >= mesh->node_count()) throw ParseError(line_no, "more rows than mesh nodes");
      const Point& q = mesh->nodes()[node];
      const double tol = 1e-12 * std::max({1.0, std::abs(q.x), std::abs(q.y)});
      if (std::abs(p.x - q.x) > tol || std::abs(p.y - q.y) > tol) {
        throw ValidationError("CSV row for node " + std::to_string(node) +
                              " does not match the mesh coordinates");
      }
    }
    field.weights.push_back(parse_double(cells[3], line_no));
  }
  if (mesh != nullptr && field.size() != mesh->node_count()) {
    throw ValidationError("CSV has " + std::to_string(field.size()) + " rows, mesh has " +
                          std::to_string(mesh->node_count()) + " nodes");
  }
  return field;
}

}  // namespace spdefem
