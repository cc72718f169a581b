#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nipf/grid.hpp"

using namespace nipf::fd;

namespace {

ScalarField sample(const StructuredGrid& g, double (*f)(double, double, double)) {
  ScalarField out(g);
  for (std::size_t k = 0; k < g.cells(); ++k) {
    const auto ijk = g.coords(k);
    double x[3] = {0, 0, 0};
    for (int a = 0; a < g.dim(); ++a) x[a] = g.center(a, ijk[a]);
    out[k] = f(x[0], x[1], x[2]);
  }
  return out;
}

ScalarField random_field(const StructuredGrid& g, unsigned seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  ScalarField f(g);
  for (auto& v : f.values) v = u(rng);
  return f;
}

}  // namespace

TEST(Grid, IndexingAndCoordinates) {
  const StructuredGrid g({4, 3, 5}, {0.5, 1.0, 2.0}, Boundary::Periodic);
  EXPECT_EQ(g.cells(), 60u);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 1.0);
  EXPECT_DOUBLE_EQ(g.length(2), 10.0);
  for (std::size_t k = 0; k < g.cells(); ++k) {
    const auto c = g.coords(k);
    EXPECT_EQ(g.index(c[0], c[1], c[2]), k);
  }
  EXPECT_DOUBLE_EQ(g.center(0, 0), 0.25);
}

TEST(Grid, RejectsBadShapes) {
  EXPECT_THROW(StructuredGrid({4, 4}, {1.0}, Boundary::Periodic), std::invalid_argument);
  EXPECT_THROW(StructuredGrid({2}, {1.0}, Boundary::Periodic), std::invalid_argument);
  EXPECT_THROW(StructuredGrid({4}, {-1.0}, Boundary::Periodic), std::invalid_argument);
  EXPECT_THROW(StructuredGrid({4, 4, 4, 4}, {1.0, 1.0, 1.0, 1.0}, Boundary::Periodic), std::invalid_argument);
}

TEST(Grid, NeighborRules) {
  const StructuredGrid p({5}, {1.0}, Boundary::Periodic);
  EXPECT_EQ(p.neighbor(0, 0, -1), 4u);
  EXPECT_EQ(p.neighbor(4, 0, +1), 0u);
  const StructuredGrid n({5, 3}, {1.0, 1.0}, Boundary::Neumann);
  EXPECT_EQ(n.neighbor(n.index(0, 1), 0, -1), n.index(0, 1));
  EXPECT_EQ(n.neighbor(n.index(4, 2), 1, +1), n.index(4, 2));
  EXPECT_EQ(n.neighbor(n.index(2, 1), 1, +1), n.index(2, 2));
}

TEST(Operators, DifferencesOfLinearFunction) {
  const StructuredGrid g({8, 6}, {0.3, 0.2}, Boundary::Neumann);
  const auto f = sample(g, [](double x, double y, double) { return 2.0 * x - 3.0 * y; });
  const auto dxp = dx_plus(f, 0), dym = dx_minus(f, 1), dxc = dx_central(f, 0);
  for (std::size_t k = 0; k < g.cells(); ++k) {
    const auto c = g.coords(k);
    if (c[0] < 7) EXPECT_NEAR(dxp[k], 2.0, 1e-12);
    if (c[1] > 0) EXPECT_NEAR(dym[k], -3.0, 1e-12);
    if (c[0] > 0 && c[0] < 7) EXPECT_NEAR(dxc[k], 2.0, 1e-12);
  }
  // Mirror ghosts give a one-sided half derivative at the boundary.
  EXPECT_NEAR(dxc[g.index(0, 0)], 1.0, 1e-12);
  EXPECT_NEAR(dxp[g.index(7, 0)], 0.0, 1e-12);
}

TEST(Operators, SecondOrderOnPeriodicSine) {
  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    const double h = 1.0 / n;
    const StructuredGrid g({n}, {h}, Boundary::Periodic);
    ScalarField f(g);
    for (int i = 0; i < n; ++i) f[i] = std::sin(2 * std::numbers::pi * g.center(0, i));
    const auto lap = laplacian(f);
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      const double exact = -4 * std::numbers::pi * std::numbers::pi * f[i];
      err = std::max(err, std::abs(lap[i] - exact));
    }
    if (prev > 0.0) EXPECT_NEAR(prev / err, 4.0, 0.1);
    prev = err;
  }
}

TEST(Operators, CentralTransposeIsAdjoint) {
  for (auto bc : {Boundary::Periodic, Boundary::Neumann}) {
    const StructuredGrid g({5, 4}, {0.3, 0.7}, bc);
    for (int a = 0; a < 2; ++a) {
      const auto f = random_field(g, 1), w = random_field(g, 2);
      const auto df = dx_central(f, a), dtw = dx_central_transpose(w, a);
      double lhs = 0.0, rhs = 0.0;
      for (std::size_t k = 0; k < g.cells(); ++k) {
        lhs += w[k] * df[k];
        rhs += dtw[k] * f[k];
      }
      EXPECT_NEAR(lhs, rhs, 1e-12);
    }
  }
  const StructuredGrid g({6}, {0.5}, Boundary::Periodic);
  const auto f = random_field(g, 3);
  const auto a = dx_central_transpose(f, 0), b = dx_central(f, 0);
  for (std::size_t k = 0; k < g.cells(); ++k) EXPECT_NEAR(a[k], -b[k], 1e-14);
}

TEST(Operators, LaplacianIsDivGradWithUnitMobility) {
  const StructuredGrid g({5, 6}, {0.4, 0.3}, Boundary::Neumann);
  const auto f = random_field(g, 5);
  FaceField one{g, {}};
  for (int a = 0; a < 3; ++a) one.faces[a].assign(g.cells(), a < g.dim() ? 1.0 : 0.0);
  const auto l1 = laplacian(f), l2 = div_m_grad(one, f);
  for (std::size_t k = 0; k < g.cells(); ++k) EXPECT_NEAR(l1[k], l2[k], 1e-12);
}

TEST(Operators, GradSqAverage) {
  const StructuredGrid g({6}, {0.5}, Boundary::Periodic);
  const auto f = random_field(g, 7);
  const auto gs = grad_sq_avg(f, 0);
  const auto p = dx_plus(f, 0), m = dx_minus(f, 0);
  for (std::size_t k = 0; k < g.cells(); ++k) EXPECT_NEAR(gs[k], 0.5 * (p[k] * p[k] + m[k] * m[k]), 1e-14);
}

TEST(Mobility, FaceAverageAndDomain) {
  const StructuredGrid g({4}, {1.0}, Boundary::Periodic);
  const ScalarField c(g, std::vector<double>{0.1, 0.2, 0.3, 0.4});
  const auto m = mobility_face(c, 2.0);
  EXPECT_NEAR(m.faces[0][0], 2.0 * (0.09 + 0.16) / 2, 1e-15);
  EXPECT_NEAR(m.faces[0][3], 2.0 * (0.24 + 0.09) / 2, 1e-15);
  const ScalarField bad(g, std::vector<double>{0.1, 1.0, 0.3, 0.4});
  EXPECT_THROW(mobility_face(bad, 1.0), std::domain_error);
}

TEST(Summation, PairwiseIsDeterministicAndAccurate) {
  std::vector<double> v(10001);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / static_cast<double>(i + 1);
  const double s1 = pairwise_sum(v), s2 = pairwise_sum(v);
  EXPECT_EQ(s1, s2);
  long double ref = 0.0L;
  for (double x : v) ref += x;
  EXPECT_NEAR(s1, static_cast<double>(ref), 1e-13);
  EXPECT_EQ(pairwise_sum({}), 0.0);
}

TEST(Summation, InnerIncludesCellVolume) {
  const StructuredGrid g({4, 4}, {0.5, 0.5}, Boundary::Periodic);
  const ScalarField one(g, 1.0);
  EXPECT_DOUBLE_EQ(integral(one), 4.0);
  EXPECT_DOUBLE_EQ(inner(one, ScalarField(g, 3.0)), 12.0);
}

TEST(SummationByParts, FourCellExample) {
  // phi = psi = (1, 2, 4, 8) on a Neumann grid with unit mobility:
  // -sum phi D(MD)psi = sum over interior faces of (D+ phi)^2 = 1 + 4 + 16 = 21.
  const StructuredGrid g({4}, {1.0}, Boundary::Neumann);
  const ScalarField f(g, std::vector<double>{1, 2, 4, 8});
  FaceField one{g, {}};
  one.faces[0].assign(4, 1.0);
  const auto dmd = div_m_grad(one, f);
  double lhs = 0.0;
  for (std::size_t k = 0; k < 4; ++k) lhs -= f[k] * dmd[k];
  EXPECT_NEAR(lhs, 21.0, 1e-13);
  EXPECT_LE(sbp_identity_residual(f, f, one, 1.0), 1e-13);
  EXPECT_NEAR(sbp_identity_residual(f, f, one, 0.5), 10.5, 1e-12);
}

TEST(SummationByParts, RandomFieldsBothBoundaries) {
  for (auto bc : {Boundary::Periodic, Boundary::Neumann}) {
    for (unsigned seed = 0; seed < 20; ++seed) {
      const StructuredGrid g({7, 5, 3}, {0.2, 0.3, 0.4}, bc);
      const auto c = random_field(g, seed, 0.05, 0.95);
      const auto m = mobility_face(c, 0.7);
      const auto phi = random_field(g, seed + 50), psi = random_field(g, seed + 90);
      EXPECT_LE(sbp_identity_residual(phi, psi, m), 1e-10);
    }
  }
}

TEST(SummationByParts, DivergenceFormConservesTotal) {
  for (auto bc : {Boundary::Periodic, Boundary::Neumann}) {
    const StructuredGrid g({6, 7}, {0.3, 0.3}, bc);
    const auto c = random_field(g, 3, 0.1, 0.9);
    const auto d = div_m_grad(mobility_face(c, 1.0), random_field(g, 4));
    EXPECT_NEAR(pairwise_sum(d.values), 0.0, 1e-11);
  }
}
