#include <cstddef>
#include <vector>

#include "nipf/dvd.hpp"

namespace nipf::dvd {

using model::ModelParameters;
using Triplet = Eigen::Triplet<double, int>;

namespace {

/// Rows: cells, columns: point-blocked dofs; picks field f of every cell.
SparseMatrix selection(std::size_t N, int nf, int f) {
  SparseMatrix P(static_cast<int>(N), static_cast<int>(N * nf));
  std::vector<Triplet> t;
  t.reserve(N);
  for (std::size_t k = 0; k < N; ++k) t.emplace_back(static_cast<int>(k), static_cast<int>(k * nf + f), 1.0);
  P.setFromTriplets(t.begin(), t.end());
  return P;
}

SparseMatrix mul(const SparseMatrix& a, const SparseMatrix& b) { return SparseMatrix(a * b); }

SparseMatrix diagonal(const std::vector<double>& v) {
  SparseMatrix D(static_cast<int>(v.size()), static_cast<int>(v.size()));
  std::vector<Triplet> t;
  t.reserve(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) t.emplace_back(static_cast<int>(k), static_cast<int>(k), v[k]);
  D.setFromTriplets(t.begin(), t.end());
  return D;
}

SparseMatrix laplacian_matrix(const fd::StructuredGrid& g) {
  const std::size_t N = g.cells();
  std::vector<Triplet> t;
  t.reserve(N * (1 + 2 * g.dim()));
  for (int a = 0; a < g.dim(); ++a) {
    const double w = 1.0 / (g.h(a) * g.h(a));
    for (std::size_t k = 0; k < N; ++k) {
      const int r = static_cast<int>(k);
      t.emplace_back(r, static_cast<int>(g.neighbor(k, a, +1)), w);
      t.emplace_back(r, static_cast<int>(g.neighbor(k, a, -1)), w);
      t.emplace_back(r, r, -2.0 * w);
    }
  }
  SparseMatrix L(static_cast<int>(N), static_cast<int>(N));
  L.setFromTriplets(t.begin(), t.end());
  return L;
}

SparseMatrix central_matrix(const fd::StructuredGrid& g, int a) {
  const std::size_t N = g.cells();
  const double w = 1.0 / (2.0 * g.h(a));
  std::vector<Triplet> t;
  t.reserve(2 * N);
  for (std::size_t k = 0; k < N; ++k) {
    const int r = static_cast<int>(k);
    t.emplace_back(r, static_cast<int>(g.neighbor(k, a, +1)), w);
    t.emplace_back(r, static_cast<int>(g.neighbor(k, a, -1)), -w);
  }
  SparseMatrix D(static_cast<int>(N), static_cast<int>(N));
  D.setFromTriplets(t.begin(), t.end());
  return D;
}

/// Matrix of f -> sum_axes D(M D f).
SparseMatrix div_m_grad_matrix(const fd::FaceField& mob) {
  const auto& g = mob.grid;
  const std::size_t N = g.cells();
  std::vector<Triplet> t;
  t.reserve(N * (1 + 2 * g.dim()));
  for (int a = 0; a < g.dim(); ++a) {
    const double w = 1.0 / (g.h(a) * g.h(a));
    const auto& faces = mob.faces[a];
    for (std::size_t k = 0; k < N; ++k) {
      const int r = static_cast<int>(k);
      const std::size_t kp = g.neighbor(k, a, +1);
      const std::size_t km = g.neighbor(k, a, -1);
      t.emplace_back(r, static_cast<int>(kp), w * faces[k]);
      t.emplace_back(r, static_cast<int>(km), w * faces[km]);
      t.emplace_back(r, r, -w * (faces[k] + faces[km]));
    }
  }
  SparseMatrix A(static_cast<int>(N), static_cast<int>(N));
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

/// Derivative of the stacked elastic residual with respect to the point-
/// blocked unknowns; c_field < 0 means c is not an unknown.
SparseMatrix elastic_rows(const fd::StructuredGrid& g, const ModelParameters& p, int nf, int u_offset, int c_field) {
  const std::size_t N = g.cells();
  const int d = g.dim();
  const int n = static_cast<int>(N * nf);
  SparseMatrix J(n, n);
  const double L = p.elastic_scale;
  const auto& C = p.elastic;

  std::vector<SparseMatrix> Pu, Dh;
  for (int I = 0; I < d; ++I) {
    Pu.push_back(selection(N, nf, u_offset + I));
    Dh.push_back(central_matrix(g, I));
  }
  SparseMatrix trace_u(static_cast<int>(N), n);
  for (int K = 0; K < d; ++K) trace_u += mul(Dh[K], Pu[K]);
  SparseMatrix Pc;
  if (c_field >= 0) Pc = selection(N, nf, c_field);

  for (int I = 0; I < d; ++I) {
    SparseMatrix rows(static_cast<int>(N), n);
    for (int Jx = 0; Jx < d; ++Jx) {
      SparseMatrix dsigma;
      if (Jx == I) {
        dsigma = L * (C.c12 * trace_u + (C.c11 - C.c12) * mul(Dh[I], Pu[I]));
        if (c_field >= 0) dsigma -= (L * (d * C.c12 + C.c11 - C.c12) * p.eps0) * Pc;
      } else {
        dsigma = (L * C.c44) * (mul(Dh[Jx], Pu[I]) + mul(Dh[I], Pu[Jx]));
      }
      rows += mul(SparseMatrix(Dh[Jx].transpose()), dsigma);
    }
    J += mul(SparseMatrix(Pu[I].transpose()), rows);
  }
  return J;
}

void replace_rows_with_identity(SparseMatrix& J, const std::vector<std::size_t>& rows) {
  std::vector<double> mask(static_cast<std::size_t>(J.rows()), 1.0);
  for (auto r : rows) mask[r] = 0.0;
  SparseMatrix out = mul(diagonal(mask), J);
  std::vector<Triplet> t;
  t.reserve(rows.size());
  for (auto r : rows) t.emplace_back(static_cast<int>(r), static_cast<int>(r), 1.0);
  SparseMatrix id(J.rows(), J.cols());
  id.setFromTriplets(t.begin(), t.end());
  out += id;
  out.prune(0.0, 0.0);
  J = std::move(out);
}

}  // namespace

SparseMatrix StepSystem::jacobian(std::span<const double> x) const {
  const auto s1 = unpack(x);
  check_admissible(s1);
  const auto& g = prev_.grid;
  const auto& p = params_;
  const std::size_t N = g.cells();
  const int d = g.dim();
  const int n = static_cast<int>(size());

  std::vector<double> acc(N), ace(N), aec(N), aee(N);
  for (std::size_t k = 0; k < N; ++k) {
    const auto a = g1_point_jacobian(prev_.c[k], prev_.eta[k], s1.c[k], s1.eta[k], p.poly);
    const auto b = g2_point_jacobian(prev_.c[k], prev_.eta[k], s1.c[k], s1.eta[k], p.theta, scheme_);
    acc[k] = a.cc + b.cc;
    ace[k] = a.ce + b.ce;
    aec[k] = a.ec + b.ec;
    aee[k] = a.ee + b.ee;
  }

  const SparseMatrix Pc = selection(N, nf_, 0);
  const SparseMatrix Pe = selection(N, nf_, 1);
  const SparseMatrix Lap = laplacian_matrix(g);
  const SparseMatrix A = div_m_grad_matrix(mobility_);

  SparseMatrix dGc = mul(diagonal(acc), Pc) + mul(diagonal(ace), Pe) - (0.5 * p.gamma_c) * mul(Lap, Pc);
  if (p.elastic_scale != 0.0) {
    const double ktr = p.elastic_scale * (p.elastic.c11 + (d - 1) * p.elastic.c12);
    SparseMatrix tr(static_cast<int>(N), n);
    for (int I = 0; I < d; ++I) tr += mul(central_matrix(g, I), selection(N, nf_, 2 + I));
    tr -= (d * p.eps0) * Pc;
    dGc -= (0.5 * p.eps0 * ktr) * tr;
  }
  const SparseMatrix Jc = (1.0 / dt_) * Pc - mul(A, dGc);
  const SparseMatrix Je =
      (1.0 / dt_) * Pe + mul(diagonal(aec), Pc) + mul(diagonal(aee), Pe) - (1.5 * p.gamma_eta) * mul(Lap, Pe);

  SparseMatrix J = mul(SparseMatrix(Pc.transpose()), Jc) + mul(SparseMatrix(Pe.transpose()), Je);

  std::vector<std::size_t> identity_rows;
  if (p.elastic_scale == 0.0) {
    for (std::size_t k = 0; k < N; ++k)
      for (int I = 0; I < d; ++I) identity_rows.push_back(k * nf_ + 2 + I);
  } else {
    J += elastic_rows(g, p, nf_, 2, 0);
    for (const auto& pin : pins_) identity_rows.push_back(pin.cell * nf_ + 2 + pin.component);
  }
  replace_rows_with_identity(J, identity_rows);
  J.makeCompressed();
  return J;
}

SparseMatrix ElasticSystem::jacobian() const {
  const auto& g = state_.grid;
  const int d = g.dim();
  const int n = static_cast<int>(size());
  std::vector<std::size_t> identity_rows;
  SparseMatrix J(n, n);
  if (params_.elastic_scale == 0.0) {
    for (std::size_t r = 0; r < size(); ++r) identity_rows.push_back(r);
  } else {
    J = elastic_rows(g, params_, d, 0, -1);
    for (const auto& pin : pins_) identity_rows.push_back(pin.cell * d + pin.component);
  }
  replace_rows_with_identity(J, identity_rows);
  J.makeCompressed();
  return J;
}

}  // namespace nipf::dvd
