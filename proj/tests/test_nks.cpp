#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <random>

#include <Eigen/SparseLU>

#include "nipf/nks.hpp"

using namespace nipf;
using nks::SparseMatrix;

namespace {

/// 2D five-point Laplacian plus a shift and a small nonsymmetric convection part.
SparseMatrix model_matrix(int n, double shift = 0.1, double convection = 0.3) {
  std::vector<Eigen::Triplet<double, int>> t;
  auto id = [n](int i, int j) { return j * n + i; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int r = id(i, j);
      t.emplace_back(r, r, 4.0 + shift);
      if (i > 0) t.emplace_back(r, id(i - 1, j), -1.0 - convection);
      if (i < n - 1) t.emplace_back(r, id(i + 1, j), -1.0 + convection);
      if (j > 0) t.emplace_back(r, id(i, j - 1), -1.0);
      if (j < n - 1) t.emplace_back(r, id(i, j + 1), -1.0);
    }
  SparseMatrix A(n * n, n * n);
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();
  return A;
}

nks::LinearOperator as_operator(const SparseMatrix& A) {
  return [&A](std::span<const double> x, std::span<double> y) {
    Eigen::Map<const Eigen::VectorXd> xm(x.data(), static_cast<Eigen::Index>(x.size()));
    Eigen::Map<Eigen::VectorXd> ym(y.data(), static_cast<Eigen::Index>(y.size()));
    ym = A * xm;
  };
}

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

double residual_norm(const SparseMatrix& A, const std::vector<double>& x, const std::vector<double>& b) {
  Eigen::Map<const Eigen::VectorXd> xm(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::Map<const Eigen::VectorXd> bm(b.data(), static_cast<Eigen::Index>(b.size()));
  return (bm - A * xm).norm();
}

}  // namespace

TEST(Ilu, ZeroFillKeepsPatternAndMatchesOnPattern) {
  const auto A = model_matrix(6);
  const nks::IluFactorization ilu(A, 0);
  EXPECT_EQ(ilu.nonzeros(), static_cast<std::size_t>(A.nonZeros()));
  // (L U)_ij == A_ij on the pattern of A.
  const SparseMatrix LU = ilu.lower() * ilu.upper();
  for (int r = 0; r < A.rows(); ++r)
    for (SparseMatrix::InnerIterator it(A, r); it; ++it) EXPECT_NEAR(LU.coeff(r, it.col()), it.value(), 1e-12);
}

TEST(Ilu, MoreFillIsMoreAccurate) {
  const auto A = model_matrix(8);
  const auto b = random_vector(64, 1);
  double prev = 1e300;
  std::size_t prev_nnz = 0;
  for (int k : {0, 1, 2}) {
    const nks::IluFactorization ilu(A, k);
    std::vector<double> x(64);
    ilu.solve(b, x);
    const double r = residual_norm(A, x, b);
    EXPECT_LT(r, prev);
    EXPECT_GT(ilu.nonzeros(), prev_nnz);
    prev = r;
    prev_nnz = ilu.nonzeros();
  }
}

TEST(Ilu, CompleteFactorizationMatchesSparseLU) {
  const auto A = model_matrix(7);
  const auto b = random_vector(49, 2);
  const nks::IluFactorization lu(A, nks::IluFactorization::kComplete);
  std::vector<double> x(49);
  lu.solve(b, x);

  Eigen::SparseMatrix<double> Ac = A;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> ref;
  ref.compute(Ac);
  ASSERT_EQ(ref.info(), Eigen::Success);
  const Eigen::VectorXd xr = ref.solve(Eigen::Map<const Eigen::VectorXd>(b.data(), 49));
  for (int i = 0; i < 49; ++i) EXPECT_NEAR(x[i], xr[i], 1e-12);
}

TEST(Ilu, ZeroPivotIsReported) {
  SparseMatrix A(2, 2);
  std::vector<Eigen::Triplet<double, int>> t = {{0, 1, 1.0}, {1, 0, 1.0}};
  A.setFromTriplets(t.begin(), t.end());
  EXPECT_THROW(nks::IluFactorization(A, 0), nks::ZeroPivot);
}

TEST(Gmres, IdentityConvergesInOneIteration) {
  const std::size_t n = 20;
  const auto b = random_vector(n, 3);
  std::vector<double> x(n, 0.0);
  auto I = [](std::span<const double> v, std::span<double> y) { std::copy(v.begin(), v.end(), y.begin()); };
  const auto res = nks::gmres(I, {}, b, x, {});
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.iterations, 1);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(x[i], b[i], 1e-14);
}

TEST(Gmres, ExactPreconditionerConvergesInOneIteration) {
  const auto A = model_matrix(6);
  const nks::IluFactorization lu(A, nks::IluFactorization::kComplete);
  auto M = [&lu](std::span<const double> r, std::span<double> z) { lu.solve(r, z); };
  for (auto side : {nks::PreconditionSide::Left, nks::PreconditionSide::Right}) {
    const auto b = random_vector(36, 4);
    std::vector<double> x(36, 0.0);
    nks::GmresOptions opt;
    opt.side = side;
    const auto res = nks::gmres(as_operator(A), M, b, x, opt);
    EXPECT_TRUE(res.converged);
    EXPECT_EQ(res.iterations, 1);
    EXPECT_LT(residual_norm(A, x, b), 1e-9);
  }
}

TEST(Gmres, RestartedSolveReachesTolerance) {
  const auto A = model_matrix(12);
  const auto b = random_vector(144, 5);
  for (int restart : {5, 30}) {
    std::vector<double> x(144, 0.0);
    nks::GmresOptions opt;
    opt.restart = restart;
    opt.max_iterations = 2000;
    const auto res = nks::gmres(as_operator(A), {}, b, x, opt);
    EXPECT_TRUE(res.converged);
    EXPECT_LE(residual_norm(A, x, b), std::max(1e-10 * nks::norm2(b), 1e-9) * 1.0001);
  }
}

TEST(Gmres, ZeroRightHandSide) {
  const auto A = model_matrix(4);
  std::vector<double> b(16, 0.0), x(16, 0.0);
  const auto res = nks::gmres(as_operator(A), {}, b, x, {});
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.iterations, 0);
}

TEST(Gmres, IluPreconditioningReducesIterations) {
  const auto A = model_matrix(16, 0.01, 0.0);
  const auto b = random_vector(256, 6);
  const nks::IluFactorization ilu(A, 0);
  auto M = [&ilu](std::span<const double> r, std::span<double> z) { ilu.solve(r, z); };
  std::vector<double> x0(256, 0.0), x1(256, 0.0);
  nks::GmresOptions opt;
  opt.max_iterations = 5000;
  const auto plain = nks::gmres(as_operator(A), {}, b, x0, opt);
  const auto pre = nks::gmres(as_operator(A), M, b, x1, opt);
  EXPECT_TRUE(plain.converged);
  EXPECT_TRUE(pre.converged);
  EXPECT_LT(pre.iterations, plain.iterations);
}

TEST(Partition, RowSplitWithOverlap) {
  const auto subs = nks::partition_rows(8, 1, 2, 1);
  ASSERT_EQ(subs.size(), 2u);
  EXPECT_EQ(subs[0].rows, (std::vector<int>{0, 1, 2, 3, 4}));
  EXPECT_EQ(subs[1].rows, (std::vector<int>{3, 4, 5, 6, 7}));
  EXPECT_EQ(subs[0].owned, (std::vector<char>{1, 1, 1, 1, 0}));
  EXPECT_EQ(subs[1].owned, (std::vector<char>{0, 1, 1, 1, 1}));
}

TEST(Partition, GridBoxesCoverEveryRowOnce) {
  const fd::StructuredGrid g({16, 12}, {1.0, 1.0}, fd::Boundary::Periodic);
  for (int count : {1, 2, 4, 6, 8}) {
    for (int overlap : {0, 1, 2}) {
      const auto subs = nks::partition(g, 4, count, overlap);
      ASSERT_EQ(subs.size(), static_cast<std::size_t>(count));
      std::vector<int> owners(g.cells() * 4, 0);
      for (const auto& s : subs) {
        ASSERT_EQ(s.rows.size(), s.owned.size());
        EXPECT_TRUE(std::is_sorted(s.rows.begin(), s.rows.end()));
        for (std::size_t i = 0; i < s.rows.size(); ++i)
          if (s.owned[i]) ++owners[s.rows[i]];
      }
      for (int o : owners) EXPECT_EQ(o, 1);
      if (overlap == 0)
        for (const auto& s : subs)
          for (char o : s.owned) EXPECT_EQ(o, 1);
    }
  }
  EXPECT_THROW(nks::partition(g, 4, 0, 1), std::invalid_argument);
  EXPECT_THROW(nks::partition(g, 4, 1000, 1), std::invalid_argument);
}

TEST(Partition, EightBoxesOnSquareGrid) {
  const fd::StructuredGrid g({64, 64}, {1.0, 1.0}, fd::Boundary::Periodic);
  const auto subs = nks::partition(g, 1, 8, 0);
  for (const auto& s : subs) EXPECT_EQ(s.rows.size(), 512u);
}

TEST(Schwarz, SingleSubdomainWithLuIsExactSolve) {
  const auto A = model_matrix(5);
  nks::SchwarzConfig cfg;
  cfg.use_lu = true;
  for (auto kind : {nks::SchwarzKind::ClassicalAS, nks::SchwarzKind::LeftRAS, nks::SchwarzKind::RightRAS}) {
    cfg.kind = kind;
    nks::SchwarzPreconditioner pc(cfg, nks::partition_rows(25, 1, 1, 0));
    pc.setup(A);
    const auto b = random_vector(25, 7);
    std::vector<double> z(25);
    pc.apply(b, z);
    EXPECT_LT(residual_norm(A, z, b), 1e-12);
  }
}

TEST(Schwarz, AdditiveIsSumOfLocalSolves) {
  // Block-diagonal matrix: non-overlapping AS equals the exact inverse.
  SparseMatrix A(6, 6);
  std::vector<Eigen::Triplet<double, int>> t;
  for (int i = 0; i < 6; ++i) t.emplace_back(i, i, 2.0 + i);
  t.emplace_back(0, 1, 0.5);
  t.emplace_back(4, 5, -0.5);
  A.setFromTriplets(t.begin(), t.end());
  nks::SchwarzConfig cfg;
  cfg.use_lu = true;
  nks::SchwarzPreconditioner pc(cfg, nks::partition_rows(6, 1, 3, 0));
  pc.setup(A);
  const auto b = random_vector(6, 8);
  std::vector<double> z(6);
  pc.apply(b, z);
  EXPECT_LT(residual_norm(A, z, b), 1e-14);
}

TEST(Schwarz, VariantsAcceleratePreconditionedGmres) {
  const auto A = model_matrix(16);
  const auto b = random_vector(256, 9);
  nks::GmresOptions opt;
  opt.max_iterations = 2000;
  std::vector<double> x0(256, 0.0);
  const int plain = nks::gmres(as_operator(A), {}, b, x0, opt).iterations;
  for (auto kind : {nks::SchwarzKind::ClassicalAS, nks::SchwarzKind::LeftRAS, nks::SchwarzKind::RightRAS}) {
    nks::SchwarzConfig cfg;
    cfg.kind = kind;
    cfg.fill_level = 1;
    nks::SchwarzPreconditioner pc(cfg, nks::partition_rows(256, 16, 4, 2));
    pc.setup(A);
    std::vector<double> x(256, 0.0);
    auto M = [&pc](std::span<const double> r, std::span<double> z) { pc.apply(r, z); };
    const auto res = nks::gmres(as_operator(A), M, b, x, opt);
    EXPECT_TRUE(res.converged) << nks::to_string(kind);
    EXPECT_LT(res.iterations, plain) << nks::to_string(kind);
  }
}

TEST(Schwarz, ReuseSkipsRefactorization) {
  const auto A = model_matrix(4);
  nks::SchwarzConfig cfg;
  cfg.reuse = true;
  nks::SchwarzPreconditioner pc(cfg, nks::partition_rows(16, 1, 2, 1));
  pc.setup(A);
  pc.setup(A);
  EXPECT_EQ(pc.factorization_count(), 1);
  pc.invalidate();
  EXPECT_FALSE(pc.has_factors());
  pc.setup(A);
  EXPECT_EQ(pc.factorization_count(), 2);
  cfg.reuse = false;
  nks::SchwarzPreconditioner fresh(cfg, nks::partition_rows(16, 1, 2, 1));
  fresh.setup(A);
  fresh.setup(A);
  EXPECT_EQ(fresh.factorization_count(), 2);
}

TEST(Schwarz, ParallelApplyMatchesSerial) {
  const auto A = model_matrix(12);
  const auto b = random_vector(144, 10);
  std::vector<double> z1(144), z4(144);
  for (int workers : {1, 4}) {
    nks::SchwarzConfig cfg;
    cfg.workers = workers;
    nks::SchwarzPreconditioner pc(cfg, nks::partition_rows(144, 12, 4, 1));
    pc.setup(A);
    pc.apply(b, workers == 1 ? z1 : z4);
  }
  EXPECT_EQ(z1, z4);
}

TEST(Schwarz, KindNamesRoundTrip) {
  for (auto kind : {nks::SchwarzKind::ClassicalAS, nks::SchwarzKind::LeftRAS, nks::SchwarzKind::RightRAS})
    EXPECT_EQ(nks::schwarz_kind_from_string(nks::to_string(kind)), kind);
  EXPECT_THROW(nks::schwarz_kind_from_string("jacobi"), std::invalid_argument);
}

TEST(ParallelFor, VisitsEveryIndexOnceAndRethrows) {
  std::vector<std::atomic<int>> hits(100);
  nks::parallel_for(100, 3, [&](int i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(nks::parallel_for(10, 2, [](int i) { if (i == 7) throw std::runtime_error("x"); }),
               std::runtime_error);
}

namespace {

nks::NonlinearProblem scalar_problem(double (*f)(double), double (*df)(double)) {
  nks::NonlinearProblem p;
  p.residual = [f](std::span<const double> x) {
    if (x[0] <= 0.0) throw std::domain_error("x must stay positive");
    return std::vector<double>{f(x[0])};
  };
  p.jacobian = [df](std::span<const double> x) {
    SparseMatrix J(1, 1);
    J.insert(0, 0) = df(x[0]);
    J.makeCompressed();
    return J;
  };
  return p;
}

}  // namespace

TEST(Newton, SquareRootOfFour) {
  auto prob = scalar_problem([](double x) { return x * x - 4.0; }, [](double x) { return 2.0 * x; });
  nks::SchwarzConfig sc;
  sc.use_lu = true;
  nks::SchwarzPreconditioner pc(sc, nks::partition_rows(1, 1, 1, 0));
  std::vector<double> x{3.0};
  nks::NewtonConfig cfg;
  cfg.eps_abs = 1e-14;
  cfg.eps_rel = 1e-16;
  const auto rep = nks::newton_solve(prob, x, cfg, pc);
  EXPECT_TRUE(rep.converged) << rep.reason;
  EXPECT_NEAR(x[0], 2.0, 1e-12);
  EXPECT_LE(rep.newton_iterations, 6);
  // Quadratic convergence from x0 = 3: 2.1667, 2.0064, 2.00001, 2.
  EXPECT_GE(rep.newton_iterations, 3);
}

TEST(Newton, LineSearchKeepsIterateAdmissible) {
  // A full step from x = 20 jumps to x = -20 for f = ln x - 1.
  auto prob = scalar_problem([](double x) { return std::log(x) - 1.0; }, [](double x) { return 1.0 / x; });
  nks::SchwarzConfig sc;
  sc.use_lu = true;
  nks::SchwarzPreconditioner pc(sc, nks::partition_rows(1, 1, 1, 0));
  std::vector<double> x{20.0};
  nks::NewtonConfig cfg;
  cfg.eps_abs = 1e-13;
  cfg.eps_rel = 1e-16;
  const auto rep = nks::newton_solve(prob, x, cfg, pc);
  EXPECT_TRUE(rep.converged) << rep.reason;
  EXPECT_NEAR(x[0], std::exp(1.0), 1e-10);
}

TEST(Newton, ReportsFailureWithoutRoot) {
  auto prob = scalar_problem([](double x) { return x * x + 1.0; }, [](double x) { return 2.0 * x; });
  nks::SchwarzConfig sc;
  sc.use_lu = true;
  nks::SchwarzPreconditioner pc(sc, nks::partition_rows(1, 1, 1, 0));
  std::vector<double> x{1.0};
  nks::NewtonConfig cfg;
  cfg.max_iterations = 10;
  const auto rep = nks::newton_solve(prob, x, cfg, pc);
  EXPECT_FALSE(rep.converged);
  EXPECT_FALSE(rep.reason.empty());
}

TEST(Newton, ProjectionIsAppliedToDirections) {
  // F(x) = (x0 + x1 - 1, x0 - x1) with directions forced to keep x0 + x1 fixed.
  nks::NonlinearProblem p;
  p.residual = [](std::span<const double> x) { return std::vector<double>{0.0, x[0] - x[1]}; };
  p.jacobian = [](std::span<const double>) {
    SparseMatrix J(2, 2);
    J.insert(0, 0) = 1.0;
    J.insert(0, 1) = 1.0;
    J.insert(1, 0) = 1.0;
    J.insert(1, 1) = -1.0;
    J.makeCompressed();
    return J;
  };
  p.project_direction = [](std::span<double> d) {
    const double m = 0.5 * (d[0] + d[1]);
    d[0] -= m;
    d[1] -= m;
  };
  nks::SchwarzConfig sc;
  sc.use_lu = true;
  nks::SchwarzPreconditioner pc(sc, nks::partition_rows(2, 2, 1, 0));
  std::vector<double> x{0.9, 0.1};
  const auto rep = nks::newton_solve(p, x, {}, pc);
  EXPECT_TRUE(rep.converged) << rep.reason;
  EXPECT_NEAR(x[0] + x[1], 1.0, 1e-15);
  EXPECT_NEAR(x[0], 0.5, 1e-12);
}
