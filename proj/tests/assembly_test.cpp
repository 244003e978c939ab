#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "spdefem/assembly.hpp"
#include "spdefem/mesh.hpp"
#include "support/test_util.hpp"

namespace spdefem {
namespace {

AffineMap map_of(const std::array<oracle::P2, 3>& p) {
  return make_affine_map({p[0].x, p[0].y}, {p[1].x, p[1].y}, {p[2].x, p[2].y});
}

// Element matrices from the degree-5 rule and the area-coordinate hats.
LocalMatrix quadrature_mass(const std::array<oracle::P2, 3>& p) {
  const auto h = oracle::hats(p);
  LocalMatrix m{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) m[a][b] = oracle::integrate(p, [&](double x, double y) { return h[a](x, y) * h[b](x, y); });
  return m;
}

LocalMatrix quadrature_stiffness(const std::array<oracle::P2, 3>& p) {
  const auto h = oracle::hats(p);
  LocalMatrix m{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const auto ga = h[a].grad(), gb = h[b].grad();
      m[a][b] = oracle::integrate(p, [&](double, double) { return ga.x * gb.x + ga.y * gb.y; });
    }
  return m;
}

constexpr std::array<oracle::P2, 3> kRef = {{{0, 0}, {1, 0}, {0, 1}}};

TEST(RefGradients, SumToZero) {
  EXPECT_EQ(kRefGradients[0].x + kRefGradients[1].x + kRefGradients[2].x, 0.0);
  EXPECT_EQ(kRefGradients[0].y + kRefGradients[1].y + kRefGradients[2].y, 0.0);
}

TEST(LocalMass, ReferenceTriangleExact) {
  const LocalMatrix m = local_mass(map_of(kRef));
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_EQ(m[a][b], a == b ? 1.0 / 12.0 : 1.0 / 24.0);
}

TEST(LocalMass, LinearInDeterminant) {
  const LocalMatrix ref = local_mass(map_of(kRef));
  const LocalMatrix big = local_mass(map_of({{{0, 0}, {2, 0}, {0, 2}}}));
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_EQ(big[a][b], 4.0 * ref[a][b]);
}

TEST(LocalMass, EntriesSumToArea) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10; ++i) {
    const auto p = oracle::random_triangle(rng);
    const AffineMap map = map_of(p);
    const LocalMatrix m = local_mass(map);
    double s = 0.0;
    for (const auto& row : m)
      for (double v : row) s += v;
    EXPECT_NEAR(s, triangle_area(map), 1e-14);
    EXPECT_NEAR(oracle::integrate(p, [](double, double) { return 1.0; }), triangle_area(map), 1e-14);
  }
}

TEST(LocalStiffness, ReferenceTriangle) {
  const LocalMatrix s = local_stiffness(map_of(kRef));
  const LocalMatrix expected = {{{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}}};
  const LocalMatrix oracle_s = quadrature_stiffness(kRef);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      EXPECT_EQ(s[a][b], expected[a][b]);
      EXPECT_NEAR(oracle_s[a][b], expected[a][b], 1e-14);
    }
}

TEST(LocalStiffness, UniformScalingInvariance) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 5; ++i) {
    auto p = oracle::random_triangle(rng);
    const LocalMatrix s0 = local_stiffness(map_of(p));
    for (double scale : {0.01, 2.0, 37.5}) {
      auto q = p;
      for (auto& v : q) v = {v.x * scale, v.y * scale};
      const LocalMatrix s1 = local_stiffness(map_of(q));
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) EXPECT_NEAR(s1[a][b], s0[a][b], 1e-12 * std::max(1.0, std::abs(s0[a][b])));
    }
  }
  const LocalMatrix two = local_stiffness(map_of({{{0, 0}, {2, 0}, {0, 2}}}));
  const LocalMatrix one = local_stiffness(map_of(kRef));
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_EQ(two[a][b], one[a][b]);
}

TEST(LocalStiffness, RowsSumToZeroAndSymmetric) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const LocalMatrix s = local_stiffness(map_of(oracle::random_triangle(rng)));
    double scale = 0.0;
    for (const auto& row : s)
      for (double v : row) scale = std::max(scale, std::abs(v));
    for (int a = 0; a < 3; ++a) {
      EXPECT_NEAR(s[a][0] + s[a][1] + s[a][2], 0.0, 1e-14 * scale);
      for (int b = 0; b < 3; ++b) EXPECT_NEAR(s[a][b], s[b][a], 1e-15 * scale);
    }
  }
}

TEST(LocalMatrices, MatchDegreeFiveQuadratureOracle) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 5; ++i) {
    const auto p = oracle::random_triangle(rng);
    const AffineMap map = map_of(p);
    const LocalMatrix m = local_mass(map), qm = quadrature_mass(p);
    const LocalMatrix s = local_stiffness(map), qs = quadrature_stiffness(p);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        EXPECT_NEAR(m[a][b], qm[a][b], 1e-12 * std::abs(qm[a][b]));
        EXPECT_NEAR(s[a][b], qs[a][b], 1e-12 * std::max(std::abs(qs[a][b]), 1e-3));
      }
  }
}

TEST(LocalWhiteNoise, Examples) {
  // c = integral of 1 - x - y over the reference triangle.
  const double c = oracle::integrate(kRef, [](double x, double y) { return 1.0 - x - y; });
  EXPECT_NEAR(c, 1.0 / 6.0, 1e-15);
  const auto ref = local_white_noise(map_of(kRef));
  for (double v : ref) EXPECT_EQ(v, 1.0 / 6.0);
  const auto big = local_white_noise(map_of({{{0, 0}, {2, 0}, {0, 2}}}));
  for (double v : big) EXPECT_NEAR(v, 2.0 / 3.0, 1e-15);
  std::mt19937_64 rng(9);
  const auto p = oracle::random_triangle(rng);
  const auto h = oracle::hats(p);
  const auto w = local_white_noise(map_of(p));
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(w[a], oracle::integrate(p, h[a]), 1e-14);
  EXPECT_NEAR(w[0] + w[1] + w[2], triangle_area(map_of(p)), 1e-14);
}

TEST(Assemble, MassOnUnitSquare) {
  const Mesh m = generate_structured_mesh(1, 1);
  const SparseSymMatrix j = assemble_mass(m);
  ASSERT_EQ(j.dim(), 4u);
  // Nodes 1 (SE) and 2 (NW) touch one triangle; 0 and 3 touch both.
  EXPECT_EQ(j.at(1, 1), 1.0 / 12.0);
  EXPECT_EQ(j.at(2, 2), 1.0 / 12.0);
  EXPECT_EQ(j.at(0, 0), 2.0 / 12.0);
  EXPECT_EQ(j.at(1, 2), 0.0);
  double total = 0.0;
  for (const auto& e : j.entries()) total += (e.row == e.col ? 1.0 : 2.0) * e.value;
  EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(Assemble, WhiteNoiseOnUnitSquare) {
  const Mesh m = generate_structured_mesh(1, 1);
  const auto a = assemble_white_noise_cov(m);
  EXPECT_NEAR(a[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(a[1], 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(a[2], 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(a[3], 1.0 / 3.0, 1e-15);
  // Independent check: integrate each global hat triangle by triangle.
  for (std::size_t i = 0; i < 4; ++i) {
    double integral = 0.0;
    for (std::size_t t = 0; t < m.triangle_count(); ++t) {
      const auto p = testutil::corners(m, t);
      const auto h = oracle::hats(p);
      for (int k = 0; k < 3; ++k)
        if (m.triangle(t)[k] == i) integral += oracle::integrate(p, h[k]);
    }
    EXPECT_NEAR(a[i], integral, 1e-15);
  }
}

TEST(Assemble, StiffnessAnnihilatesConstants) {
  for (const Mesh& m : {generate_structured_mesh(1, 1), generate_structured_mesh(7, 3), testutil::irregular_mesh()}) {
    const SparseSymMatrix d = assemble_stiffness(m);
    EXPECT_LE(testutil::max_abs(matvec(d, std::vector<double>(m.node_count(), 1.0))), 1e-12 * d.max_abs());
  }
}

TEST(Assemble, MassAndStiffnessDefiniteness) {
  std::mt19937_64 rng(17);
  const Mesh m = testutil::irregular_mesh();
  const FemMatrices fem = build_fem(m);
  for (int i = 0; i < 20; ++i) {
    const auto x = testutil::random_vector(m.node_count(), rng);
    double norm2 = 0.0, xdx = 0.0, xjx = 0.0;
    const auto dx = matvec(fem.stiffness, x);
    const auto jx = matvec(fem.mass, x);
    for (std::size_t k = 0; k < x.size(); ++k) {
      norm2 += x[k] * x[k];
      xdx += x[k] * dx[k];
      xjx += x[k] * jx[k];
    }
    EXPECT_GE(xdx, -1e-12 * norm2);
    EXPECT_GT(xjx, 0.0);
  }
  const auto ev = oracle::symmetric_eigenvalues(testutil::to_dense(fem.mass));
  for (double e : ev) EXPECT_GT(e, 0.0);
}

TEST(Assemble, PatternFollowsTriangleAdjacency) {
  const Mesh m = testutil::irregular_mesh();
  std::set<std::pair<std::size_t, std::size_t>> shared;
  for (const auto& t : m.triangles())
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) shared.insert(std::minmax(t[a], t[b]));
  const FemMatrices fem = build_fem(m);
  for (const SparseSymMatrix* a : {&fem.mass, &fem.stiffness})
    for (const auto& e : a->entries()) EXPECT_TRUE(shared.count({e.row, e.col})) << e.row << "," << e.col;
}

TEST(Assemble, GlobalMatricesMatchQuadratureAssembly) {
  const Mesh m = testutil::irregular_mesh();
  oracle::Dense jm = oracle::zeros(m.node_count()), dm = oracle::zeros(m.node_count());
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    const auto p = testutil::corners(m, t);
    const auto qm = quadrature_mass(p), qs = quadrature_stiffness(p);
    const auto& tri = m.triangle(t);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        jm[tri[a]][tri[b]] += qm[a][b];
        dm[tri[a]][tri[b]] += qs[a][b];
      }
  }
  const FemMatrices fem = build_fem(m);
  const auto j = testutil::to_dense(fem.mass), d = testutil::to_dense(fem.stiffness);
  for (std::size_t r = 0; r < m.node_count(); ++r)
    for (std::size_t c = 0; c < m.node_count(); ++c) {
      EXPECT_NEAR(j[r][c], jm[r][c], 1e-14);
      EXPECT_NEAR(d[r][c], dm[r][c], 1e-13);
    }
}

TEST(BuildFem, Examples) {
  const FemMatrices unit = build_fem(generate_structured_mesh(1, 1));
  EXPECT_EQ(unit.mass.dim(), 4u);
  EXPECT_EQ(unit.stiffness.dim(), 4u);

  const Mesh single({{0.2, 0.1}, {1.4, 0.3}, {0.5, 0.9}}, {{0, 1, 2}});
  const FemMatrices one = build_fem(single);
  const LocalMatrix lm = local_mass(triangle_map(single, 0));
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) EXPECT_EQ(one.mass.at(a, b), lm[a][b]);

  const Mesh fine = generate_structured_mesh(10, 10);
  const FemMatrices fem = build_fem(fine);
  double total = 0.0;
  for (double v : matvec(fem.mass, std::vector<double>(fine.node_count(), 1.0))) total += v;
  EXPECT_NEAR(total, 1.0, 1e-12);
  double noise = 0.0;
  for (double v : fem.white_noise) {
    EXPECT_GT(v, 0.0);
    noise += v;
  }
  EXPECT_NEAR(noise, 1.0, 1e-12);
  EXPECT_EQ(fem.mass, assemble_mass(fine));
  EXPECT_EQ(fem.white_noise, assemble_white_noise_cov(fine));
}

TEST(BuildFem, NoBoundaryTermsAreAdded) {
  // With zero-flux boundaries, D u for a globally linear u only sees
  // contributions at boundary nodes: interior rows of D vanish on linears.
  const Mesh m = generate_structured_mesh(6, 6);
  const SparseSymMatrix d = assemble_stiffness(m);
  std::vector<double> u(m.node_count());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = 2.0 * m.node(i).x - 3.0 * m.node(i).y;
  const auto du = matvec(d, u);
  double boundary_sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Point p = m.node(i);
    const bool interior = p.x > 0 && p.x < 1 && p.y > 0 && p.y < 1;
    if (interior) EXPECT_NEAR(du[i], 0.0, 1e-12);
    boundary_sum += du[i];
  }
  // Sum of D u equals the net boundary flux of grad u, which is zero here.
  EXPECT_NEAR(boundary_sum, 0.0, 1e-12);
}

}  // namespace
}  // namespace spdefem
