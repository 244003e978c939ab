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

#include "spdefem/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "spdefem/error.hpp"
#include "spdefem/io.hpp"

namespace spdefem {

namespace {

double squared_distance(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

double segment_distance(Point p, Point a, Point b) {
  const double ex = b.x - a.x;
  const double ey = b.y - a.y;
  const double len2 = ex * ex + ey * ey;
  double s = len2 > 0.0 ? ((p.x - a.x) * ex + (p.y - a.y) * ey) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return std::sqrt(squared_distance(p, {a.x + s * ex, a.y + s * ey}));
}

std::string point_str(Point p) {
  return "(" + format_double(p.x) + ", " + format_double(p.y) + ")";
}

void check_distinct_nodes(const std::vector<Point>& nodes) {
  if (nodes.size() < 2) return;
  Point lo = nodes[0];
  Point hi = nodes[0];
  for (const Point& p : nodes) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  const double tol = 1e-12 * std::sqrt(squared_distance(lo, hi));

  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return nodes[a].x < nodes[b].x || (nodes[a].x == nodes[b].x && a < b);
  });
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Point& p = nodes[order[i]];
    for (std::size_t j = i + 1; j < order.size() && nodes[order[j]].x - p.x <= tol; ++j) {
      if (std::sqrt(squared_distance(p, nodes[order[j]])) <= tol) {
        const auto [a, b] = std::minmax(order[i], order[j]);
        throw ValidationError("nodes " + std::to_string(a) + " and " + std::to_string(b) +
                              " coincide at " + point_str(p));
      }
    }
  }
}

}  // namespace

Mat2 Mat2::inverse() const {
  const double d = det();
  return {a11 / d, -a01 / d, -a10 / d, a00 / d};
}

Mat2 Mat2::operator*(const Mat2& o) const {
  return {a00 * o.a00 + a01 * o.a10, a00 * o.a01 + a01 * o.a11,
          a10 * o.a00 + a11 * o.a10, a10 * o.a01 + a11 * o.a11};
}

Mesh::Mesh(std::vector<Point> nodes, std::vector<Triangle> triangles)
    : nodes_(std::move(nodes)), triangles_(std::move(triangles)) {
  if (triangles_.empty()) throw ValidationError("mesh has no triangles");

  std::vector<char> used(nodes_.size(), 0);
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    Triangle& tri = triangles_[t];
    for (std::size_t idx : tri) {
      if (idx >= nodes_.size()) {
        throw ValidationError("triangle " + std::to_string(t) + " references node " +
                              std::to_string(idx) + ", but the mesh has only " +
                              std::to_string(nodes_.size()) + " nodes");
      }
      used[idx] = 1;
    }
    const Point& p1 = nodes_[tri[0]];
    const Point& p2 = nodes_[tri[1]];
    const Point& p3 = nodes_[tri[2]];
    const double det = (p2.x - p1.x) * (p3.y - p1.y) - (p3.x - p1.x) * (p2.y - p1.y);
    const double longest2 = std::max({squared_distance(p1, p2), squared_distance(p2, p3),
                                      squared_distance(p3, p1)});
    if (!(std::abs(det) > 1e-14 * longest2)) {
      throw ValidationError("triangle " + std::to_string(t) + " is degenerate (det T = " +
                            format_double(det) + ")");
    }
    if (det < 0.0) std::swap(tri[1], tri[2]);
  }
  for (std::size_t i = 0; i < used.size(); ++i) {
    if (!used[i]) {
      throw ValidationError("node " + std::to_string(i) + " does not belong to any triangle");
    }
  }
  check_distinct_nodes(nodes_);
  for (const EdgeUse& e : mesh_edges(*this)) {
    if (e.count > 2) {
      throw ValidationError("edge (" + std::to_string(e.a) + ", " + std::to_string(e.b) +
                            ") is shared by " + std::to_string(e.count) + " triangles");
    }
  }
}

AffineMap make_affine_map(Point p1, Point p2, Point p3) {
  AffineMap m;
  m.T = {p2.x - p1.x, p3.x - p1.x, p2.y - p1.y, p3.y - p1.y};
  m.p1 = p1;
  m.det_t = m.T.det();
  m.gram_inv = (m.T.transpose() * m.T).inverse();
  return m;
}

AffineMap triangle_map(const Mesh& mesh, std::size_t t) {
  const Triangle& tri = mesh.triangle(t);
  return make_affine_map(mesh.nodes()[tri[0]], mesh.nodes()[tri[1]], mesh.nodes()[tri[2]]);
}

Point map_to_physical(const AffineMap& map, Point eta) {
  const Point v = map.T * eta;
  return {v.x + map.p1.x, v.y + map.p1.y};
}

double triangle_area(const AffineMap& map) { return std::abs(map.det_t) / 2.0; }

double total_area(const Mesh& mesh) {
  double area = 0.0;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) area += triangle_area(triangle_map(mesh, t));
  return area;
}

Mesh generate_structured_mesh(std::size_t nx, std::size_t ny, std::pair<double, double> x_range,
                              std::pair<double, double> y_range) {
  if (nx == 0 || ny == 0) throw PreconditionError("structured mesh needs nx, ny >= 1");
  if (!(x_range.first < x_range.second) || !(y_range.first < y_range.second)) {
    throw PreconditionError("structured mesh needs non-empty coordinate ranges");
  }
  const auto coord = [](std::pair<double, double> r, std::size_t i, std::size_t n) {
    // Endpoints are hit exactly.
    if (i == n) return r.second;
    return r.first + (r.second - r.first) * static_cast<double>(i) / static_cast<double>(n);
  };
  std::vector<Point> nodes;
  nodes.reserve((nx + 1) * (ny + 1));
  for (std::size_t j = 0; j <= ny; ++j) {
    for (std::size_t i = 0; i <= nx; ++i) {
      nodes.push_back({coord(x_range, i, nx), coord(y_range, j, ny)});
    }
  }
  std::vector<Triangle> tris;
  tris.reserve(2 * nx * ny);
  const auto id = [nx](std::size_t i, std::size_t j) { return j * (nx + 1) + i; };
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t sw = id(i, j), se = id(i + 1, j), ne = id(i + 1, j + 1), nw = id(i, j + 1);
      tris.push_back({sw, se, ne});
      tris.push_back({sw, ne, nw});
    }
  }
  return Mesh(std::move(nodes), std::move(tris));
}

Mesh load_mesh(std::string_view text) {
  enum class State { kNodesHeader, kNodes, kTrianglesHeader, kTriangles, kDone };
  State state = State::kNodesHeader;
  std::size_t expected = 0;
  std::vector<Point> nodes;
  std::vector<Triangle> tris;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<std::string_view> tok;
    for (std::size_t i = 0; i < line.size();) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) tok.push_back(line.substr(i, j - i));
      i = j;
    }
    if (tok.empty()) continue;

    switch (state) {
      case State::kNodesHeader:
        if (tok.size() != 2 || tok[0] != "nodes") throw ParseError(line_no, "expected 'nodes <N>'");
        expected = parse_index(tok[1], line_no);
        nodes.reserve(expected);
        state = expected == 0 ? State::kTrianglesHeader : State::kNodes;
        break;
      case State::kNodes:
        if (tok.size() != 2) throw ParseError(line_no, "expected '<x> <y>'");
        nodes.push_back({parse_double(tok[0], line_no), parse_double(tok[1], line_no)});
        if (nodes.size() == expected) state = State::kTrianglesHeader;
        break;
      case State::kTrianglesHeader:
        if (tok.size() != 2 || tok[0] != "triangles") {
          throw ParseError(line_no, "expected 'triangles <M>'");
        }
        expected = parse_index(tok[1], line_no);
        tris.reserve(expected);
        state = expected == 0 ? State::kDone : State::kTriangles;
        break;
      case State::kTriangles:
        if (tok.size() != 3) throw ParseError(line_no, "expected '<i1> <i2> <i3>'");
        tris.push_back({parse_index(tok[0], line_no), parse_index(tok[1], line_no),
                        parse_index(tok[2], line_no)});
        if (tris.size() == expected) state = State::kDone;
        break;
      case State::kDone:
        throw ParseError(line_no, "unexpected content after the triangle list");
    }
  }
  switch (state) {
    case State::kNodesHeader:
      throw ParseError(line_no, "missing 'nodes' section");
    case State::kNodes:
      throw ParseError(line_no, "expected " + std::to_string(expected) + " nodes, found " +
                                    std::to_string(nodes.size()));
    case State::kTrianglesHeader:
      throw ParseError(line_no, "missing 'triangles' section");
    case State::kTriangles:
      throw ParseError(line_no, "expected " + std::to_string(expected) + " triangles, found " +
                                    std::to_string(tris.size()));
    case State::kDone:
      break;
  }
  return Mesh(std::move(nodes), std::move(tris));
}

Mesh load_mesh_file(const std::string& path) { return load_mesh(read_text_file(path)); }

std::string emit_mesh(const Mesh& mesh) {
  std::string out;
  out += "nodes " + std::to_string(mesh.node_count()) + "\n";
  for (const Point& p : mesh.nodes()) {
    out += format_double(p.x);
    out += ' ';
    out += format_double(p.y);
    out += '\n';
  }
  out += "triangles " + std::to_string(mesh.triangle_count()) + "\n";
  for (const Triangle& t : mesh.triangles()) {
    out += std::to_string(t[0]) + ' ' + std::to_string(t[1]) + ' ' + std::to_string(t[2]) + '\n';
  }
  return out;
}

std::string mesh_hash(const Mesh& mesh) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : emit_mesh(mesh)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<EdgeUse> mesh_edges(const Mesh& mesh) {
  std::vector<std::pair<std::size_t, std::size_t>> all;
  all.reserve(3 * mesh.triangle_count());
  for (const Triangle& t : mesh.triangles()) {
    for (int k = 0; k < 3; ++k) all.push_back(std::minmax(t[k], t[(k + 1) % 3]));
  }
  std::sort(all.begin(), all.end());
  std::vector<EdgeUse> edges;
  for (const auto& e : all) {
    if (!edges.empty() && edges.back().a == e.first && edges.back().b == e.second) {
      ++edges.back().count;
    } else {
      edges.push_back({e.first, e.second, 1});
    }
  }
  return edges;
}

std::vector<std::pair<std::size_t, std::size_t>> boundary_edges(const Mesh& mesh) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const EdgeUse& e : mesh_edges(mesh)) {
    if (e.count == 1) out.emplace_back(e.a, e.b);
  }
  return out;
}

double max_edge_length(const Mesh& mesh) {
  double longest2 = 0.0;
  for (const Triangle& t : mesh.triangles()) {
    for (int k = 0; k < 3; ++k) {
      longest2 = std::max(longest2, squared_distance(mesh.nodes()[t[k]], mesh.nodes()[t[(k + 1) % 3]]));
    }
  }
  return std::sqrt(longest2);
}

double distance_to_boundary(const Mesh& mesh,
                            const std::vector<std::pair<std::size_t, std::size_t>>& boundary, Point p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : boundary) {
    best = std::min(best, segment_distance(p, mesh.nodes()[a], mesh.nodes()[b]));
  }
  return best;
}

double distance_to_boundary(const Mesh& mesh, Point p) {
  return distance_to_boundary(mesh, boundary_edges(mesh), p);
}

QualityReport quality_report(const Mesh& mesh, double range, std::span<const Point> probes) {
  return quality_report(mesh, range, probes, boundary_edges(mesh));
}

QualityReport quality_report(const Mesh& mesh, double range, std::span<const Point> probes,
                             const std::vector<std::pair<std::size_t, std::size_t>>& boundary) {
  if (!(range > 0.0)) throw PreconditionError("quality_report: range must be positive");
  QualityReport r;
  r.range = range;
  r.max_edge = max_edge_length(mesh);
  r.min_boundary_distance = std::numeric_limits<double>::infinity();
  for (const Point& p : probes) {
    r.min_boundary_distance = std::min(r.min_boundary_distance, distance_to_boundary(mesh, boundary, p));
  }
  r.passes_edge_rule = r.max_edge <= range / 5.0;
  r.passes_boundary_rule = r.min_boundary_distance >= range / 2.0;

  if (!r.passes_edge_rule) {
    r.warnings.push_back("max edge " + format_double(r.max_edge) + " exceeds range/5 = " +
                         format_double(range / 5.0));
  } else if (r.max_edge > range / 10.0) {
    r.warnings.push_back("max edge " + format_double(r.max_edge) +
                         " passes range/5 but exceeds the stricter range/10 = " +
                         format_double(range / 10.0));
  }
  if (!r.passes_boundary_rule) {
    r.warnings.push_back("probe distance to boundary " + format_double(r.min_boundary_distance) +
                         " is below range/2 = " + format_double(range / 2.0));
  } else if (r.min_boundary_distance < range) {
    r.warnings.push_back("probe distance to boundary " + format_double(r.min_boundary_distance) +
                         " passes range/2 but is below the stricter full range " +
                         format_double(range));
  }
  return r;
}

std::size_t nearest_node(const Mesh& mesh, Point p) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    const double d = squared_distance(mesh.nodes()[i], p);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace spdefem
