#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "spdefem/error.hpp"
#include "spdefem/mesh.hpp"
#include "support/test_util.hpp"

namespace spdefem {
namespace {

constexpr const char* kReferenceMesh =
    "# reference triangle\n"
    "nodes 3\n"
    "0 0\n"
    "1 0\n"
    "0 1\n"
    "triangles 1\n"
    "0 1 2\n";

TEST(LoadMesh, ReferenceTriangle) {
  const Mesh m = load_mesh(kReferenceMesh);
  ASSERT_EQ(m.node_count(), 3u);
  ASSERT_EQ(m.triangle_count(), 1u);
  EXPECT_EQ(triangle_map(m, 0).det_t, 1.0);
}

TEST(LoadMesh, ClockwiseTriangleIsReoriented) {
  const Mesh m = load_mesh("nodes 3\n0 0\n1 0\n0 1\ntriangles 1\n0 2 1\n");
  EXPECT_EQ(m.triangle(0), (Triangle{0, 1, 2}));
  EXPECT_GT(triangle_map(m, 0).det_t, 0.0);
}

TEST(LoadMesh, IndexOutOfRangeNamesIndex) {
  try {
    load_mesh("nodes 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 7\n");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("7"), std::string::npos) << e.what();
  }
}

TEST(LoadMesh, ParseErrorsCarryLineNumbers) {
  try {
    load_mesh("nodes 3\n0 0\n1 zero\n0 1\ntriangles 1\n0 1 2\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    load_mesh("nodes 3\n0 0\n1 0\n0 1\ntriangles 2\n0 1 2\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("expected 2 triangles"), std::string::npos);
  }
  EXPECT_THROW(load_mesh("vertices 3\n"), ParseError);
  EXPECT_THROW(load_mesh("nodes 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 2\nextra\n"), ParseError);
  EXPECT_THROW(load_mesh("nodes 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1\n"), ParseError);
  EXPECT_THROW(load_mesh("nodes 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 -2\n"), ParseError);
}

TEST(LoadMesh, RejectsDegenerateTriangle) {
  EXPECT_THROW(load_mesh("nodes 3\n0 0\n1 0\n2 0\ntriangles 1\n0 1 2\n"), ValidationError);
  // Sliver well below the 1e-14 relative threshold.
  EXPECT_THROW(load_mesh("nodes 3\n0 0\n1 0\n0.5 1e-16\ntriangles 1\n0 1 2\n"), ValidationError);
  // Thin but legitimate.
  EXPECT_NO_THROW(load_mesh("nodes 3\n0 0\n1 0\n0.5 1e-9\ntriangles 1\n0 1 2\n"));
}

TEST(LoadMesh, RejectsDuplicateNodes) {
  EXPECT_THROW(load_mesh("nodes 4\n0 0\n1 0\n0 1\n1e-14 0\ntriangles 2\n0 1 2\n3 1 2\n"), ValidationError);
}

TEST(LoadMesh, RejectsOrphanNodesAndOverusedEdges) {
  EXPECT_THROW(load_mesh("nodes 4\n0 0\n1 0\n0 1\n5 5\ntriangles 1\n0 1 2\n"), ValidationError);
  EXPECT_THROW(Mesh({{0, 0}, {1, 0}, {0, 1}, {0, -1}, {1, 1}}, {{0, 1, 2}, {0, 1, 3}, {0, 1, 4}}),
               ValidationError);
  EXPECT_THROW(Mesh({{0, 0}}, {}), ValidationError);
}

TEST(LoadMesh, CommentsAndBlankLinesAreIgnored) {
  const Mesh m = load_mesh("\n# a\nnodes 3 # count\n\n0 0\n1 0 # second\n0 1\n# tris\ntriangles 1\n0 1 2\n\n");
  EXPECT_EQ(m.node_count(), 3u);
}

TEST(EmitMesh, RoundTripIsExact) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  for (int trial = 0; trial < 5; ++trial) {
    const Mesh grid = generate_structured_mesh(6, 4, {0.0, 1.7}, {-0.2, 0.9});
    std::vector<Point> nodes = grid.nodes();
    const double hx = 1.7 / 6, hy = 1.1 / 4;
    for (std::size_t j = 1; j < 4; ++j)
      for (std::size_t i = 1; i < 6; ++i) {
        Point& p = nodes[j * 7 + i];
        p.x += jitter(rng) * hx;
        p.y += jitter(rng) * hy;
      }
    const Mesh m(nodes, grid.triangles());
    EXPECT_EQ(load_mesh(emit_mesh(m)), m);
  }
}

TEST(StructuredMesh, Counts) {
  const Mesh one = generate_structured_mesh(1, 1);
  EXPECT_EQ(one.node_count(), 4u);
  EXPECT_EQ(one.triangle_count(), 2u);
  const Mesh two = generate_structured_mesh(2, 2);
  EXPECT_EQ(two.node_count(), 9u);
  EXPECT_EQ(two.triangle_count(), 8u);
  EXPECT_NEAR(total_area(two), 1.0, 1e-12);
  EXPECT_THROW(generate_structured_mesh(0, 3), PreconditionError);
  EXPECT_THROW(generate_structured_mesh(2, 2, {1.0, 1.0}), PreconditionError);
}

TEST(StructuredMesh, AllTrianglesCounterClockwise) {
  const Mesh m = generate_structured_mesh(5, 3, {-1.0, 2.0}, {0.0, 0.5});
  for (std::size_t t = 0; t < m.triangle_count(); ++t) EXPECT_GT(triangle_map(m, t).det_t, 0.0);
}

TEST(StructuredMesh, MaxEdgeIsCellDiagonal) {
  EXPECT_NEAR(max_edge_length(generate_structured_mesh(10, 10)), std::sqrt(2.0) / 10.0, 1e-15);
}

TEST(StructuredMesh, AreaPartitionsRectangle) {
  for (std::size_t n : {1u, 3u, 8u, 17u}) {
    const Mesh m = generate_structured_mesh(n, n + 2, {-0.5, 2.25}, {1.0, 1.3});
    EXPECT_NEAR(total_area(m) / (2.75 * 0.3), 1.0, 1e-12);
  }
}

TEST(TriangleMap, Examples) {
  const AffineMap ref = make_affine_map({0, 0}, {1, 0}, {0, 1});
  EXPECT_EQ(ref.T.a00, 1.0);
  EXPECT_EQ(ref.T.a01, 0.0);
  EXPECT_EQ(ref.T.a10, 0.0);
  EXPECT_EQ(ref.T.a11, 1.0);
  EXPECT_EQ(ref.det_t, 1.0);
  EXPECT_EQ(ref.gram_inv.a00, 1.0);
  EXPECT_EQ(ref.gram_inv.a01, 0.0);
  EXPECT_EQ(ref.gram_inv.a11, 1.0);

  const AffineMap scaled = make_affine_map({0, 0}, {2, 0}, {0, 2});
  EXPECT_EQ(scaled.det_t, 4.0);
  EXPECT_EQ(scaled.T.a00, 2.0);
  EXPECT_EQ(scaled.T.a11, 2.0);

  const AffineMap shifted = make_affine_map({1, 1}, {3, 1}, {1, 2});
  EXPECT_EQ(shifted.T.a00, 2.0);
  EXPECT_EQ(shifted.T.a01, 0.0);
  EXPECT_EQ(shifted.T.a10, 0.0);
  EXPECT_EQ(shifted.T.a11, 1.0);
  EXPECT_EQ(shifted.p1, (Point{1, 1}));
  EXPECT_EQ(shifted.det_t, 2.0);
}

TEST(TriangleMap, GramInverseIsInverse) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto p = oracle::random_triangle(rng);
    const AffineMap m = make_affine_map({p[0].x, p[0].y}, {p[1].x, p[1].y}, {p[2].x, p[2].y});
    const Mat2 prod = m.gram_inv * (m.T.transpose() * m.T);
    EXPECT_NEAR(prod.a00, 1.0, 1e-12);
    EXPECT_NEAR(prod.a11, 1.0, 1e-12);
    EXPECT_NEAR(prod.a01, 0.0, 1e-12);
    EXPECT_NEAR(prod.a10, 0.0, 1e-12);
  }
}

TEST(TriangleMap, ReferenceCornersMapToStoredCorners) {
  const Mesh m = testutil::irregular_mesh();
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    const AffineMap map = triangle_map(m, t);
    const auto& tri = m.triangle(t);
    const Point z1 = map_to_physical(map, {0, 0});
    EXPECT_EQ(z1, m.node(tri[0]));  // bitwise
    const Point z2 = map_to_physical(map, {1, 0});
    const Point z3 = map_to_physical(map, {0, 1});
    for (auto [z, p] : {std::pair{z2, m.node(tri[1])}, std::pair{z3, m.node(tri[2])}}) {
      EXPECT_NEAR(z.x, p.x, 1e-15 * std::max(1.0, std::abs(p.x)));
      EXPECT_NEAR(z.y, p.y, 1e-15 * std::max(1.0, std::abs(p.y)));
    }
  }
}

TEST(TriangleArea, Examples) {
  EXPECT_EQ(triangle_area(make_affine_map({0, 0}, {1, 0}, {0, 1})), 0.5);
  EXPECT_EQ(triangle_area(make_affine_map({0, 0}, {2, 0}, {0, 2})), 2.0);
  EXPECT_NEAR(total_area(generate_structured_mesh(7, 7)), 1.0, 1e-12);
}

TEST(MeshEdges, InteriorEdgesSharedTwiceBoundaryOnce) {
  const Mesh m = generate_structured_mesh(4, 3);
  std::size_t boundary = 0, interior = 0;
  for (const EdgeUse& e : mesh_edges(m)) {
    ASSERT_TRUE(e.count == 1 || e.count == 2);
    const Point a = m.node(e.a), b = m.node(e.b);
    const bool on_side = (a.x == 0 && b.x == 0) || (a.x == 1 && b.x == 1) || (a.y == 0 && b.y == 0) ||
                         (a.y == 1 && b.y == 1);
    EXPECT_EQ(e.count == 1, on_side);
    (e.count == 1 ? boundary : interior)++;
  }
  EXPECT_EQ(boundary, 2u * (4 + 3));
  // Euler: E = V + F - 1 for a disc.
  EXPECT_EQ(boundary + interior, m.node_count() + m.triangle_count() - 1);
}

TEST(QualityReport, Examples) {
  const Mesh m = generate_structured_mesh(10, 10);
  const std::vector<Point> centre = {{0.5, 0.5}};
  const QualityReport r1 = quality_report(m, 1.0, centre);
  EXPECT_NEAR(r1.max_edge, 0.1414213562373095, 1e-15);
  EXPECT_TRUE(r1.passes_edge_rule);

  const QualityReport r2 = quality_report(m, 0.5, centre);
  EXPECT_NEAR(r2.min_boundary_distance, 0.5, 1e-15);
  EXPECT_TRUE(r2.passes_boundary_rule);

  const std::vector<Point> near_edge = {{0.1, 0.5}};
  const QualityReport r3 = quality_report(m, 0.5, near_edge);
  EXPECT_NEAR(r3.min_boundary_distance, 0.1, 1e-15);
  EXPECT_FALSE(r3.passes_boundary_rule);
  EXPECT_FALSE(r3.warnings.empty());
}

TEST(QualityReport, EmptyProbeListAndStricterWarnings) {
  const Mesh m = generate_structured_mesh(10, 10);
  const QualityReport r = quality_report(m, 1.0, {});
  EXPECT_EQ(r.min_boundary_distance, std::numeric_limits<double>::infinity());
  EXPECT_TRUE(r.passes_boundary_rule);
  // max_edge 0.141 passes range/5 = 0.2 but not range/10 = 0.1.
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("range/10"), std::string::npos);
  EXPECT_THROW(quality_report(m, 0.0, {}), PreconditionError);
}

TEST(QualityReport, ThresholdsAreInclusive) {
  const Mesh m = generate_structured_mesh(2, 2);
  const double edge = max_edge_length(m);
  EXPECT_TRUE(quality_report(m, 5.0 * edge, {}).passes_edge_rule);
  EXPECT_FALSE(quality_report(m, 4.99 * edge, {}).passes_edge_rule);
}

TEST(NearestNode, PicksClosest) {
  const Mesh m = generate_structured_mesh(4, 4);
  EXPECT_EQ(nearest_node(m, {0.26, 0.49}), 2u * 5 + 1);
}

TEST(MeshHash, StableAndSensitive) {
  const Mesh a = generate_structured_mesh(3, 3);
  EXPECT_EQ(mesh_hash(a), mesh_hash(generate_structured_mesh(3, 3)));
  EXPECT_NE(mesh_hash(a), mesh_hash(generate_structured_mesh(3, 4)));
  EXPECT_EQ(mesh_hash(a).size(), 16u);
}

}  // namespace
}  // namespace spdefem
