#include "nipf/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nipf::fd {

StructuredGrid::StructuredGrid(std::vector<int> dims, std::vector<double> spacing, Boundary bc) : bc_(bc) {
  if (dims.empty() || dims.size() > 3 || dims.size() != spacing.size())
    throw std::invalid_argument("StructuredGrid: need 1-3 dims with matching spacing");
  dim_ = static_cast<int>(dims.size());
  cells_ = 1;
  for (int a = 0; a < dim_; ++a) {
    if (dims[a] < 3) throw std::invalid_argument("StructuredGrid: every axis needs at least 3 cells");
    if (!(spacing[a] > 0.0)) throw std::invalid_argument("StructuredGrid: spacing must be positive");
    n_[a] = dims[a];
    h_[a] = spacing[a];
    cells_ *= static_cast<std::size_t>(dims[a]);
  }
  stride_[0] = 1;
  stride_[1] = static_cast<std::size_t>(n_[0]);
  stride_[2] = stride_[1] * static_cast<std::size_t>(n_[1]);
}

double StructuredGrid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= h_[a];
  return v;
}

std::array<int, 3> StructuredGrid::coords(std::size_t idx) const {
  return {coord(idx, 0), coord(idx, 1), coord(idx, 2)};
}

void StructuredGrid::check_axis(int axis) const {
  if (axis < 0 || axis >= dim_) throw std::out_of_range("invalid axis " + std::to_string(axis));
}

ScalarField::ScalarField(const StructuredGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.cells()) throw std::invalid_argument("ScalarField: value count != cell count");
}

namespace {

template <class Op>
ScalarField map_cells(const ScalarField& f, Op op) {
  ScalarField out(f.grid);
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = op(k);
  return out;
}

}  // namespace

ScalarField dx_plus(const ScalarField& f, int axis) {
  f.grid.check_axis(axis);
  const double h = f.grid.h(axis);
  return map_cells(f, [&](std::size_t k) { return (f[f.grid.neighbor(k, axis, +1)] - f[k]) / h; });
}

ScalarField dx_minus(const ScalarField& f, int axis) {
  f.grid.check_axis(axis);
  const double h = f.grid.h(axis);
  return map_cells(f, [&](std::size_t k) { return (f[k] - f[f.grid.neighbor(k, axis, -1)]) / h; });
}

ScalarField dx_central(const ScalarField& f, int axis) {
  f.grid.check_axis(axis);
  const double h2 = 2.0 * f.grid.h(axis);
  return map_cells(f, [&](std::size_t k) {
    return (f[f.grid.neighbor(k, axis, +1)] - f[f.grid.neighbor(k, axis, -1)]) / h2;
  });
}

ScalarField dx_central_transpose(const ScalarField& f, int axis) {
  f.grid.check_axis(axis);
  const double h2 = 2.0 * f.grid.h(axis);
  ScalarField out(f.grid);
  for (std::size_t k = 0; k < f.size(); ++k) {
    out[f.grid.neighbor(k, axis, +1)] += f[k] / h2;
    out[f.grid.neighbor(k, axis, -1)] -= f[k] / h2;
  }
  return out;
}

ScalarField grad_sq_avg(const ScalarField& f, int axis) {
  f.grid.check_axis(axis);
  const double h = f.grid.h(axis);
  return map_cells(f, [&](std::size_t k) {
    const double p = (f[f.grid.neighbor(k, axis, +1)] - f[k]) / h;
    const double m = (f[k] - f[f.grid.neighbor(k, axis, -1)]) / h;
    return 0.5 * (p * p + m * m);
  });
}

ScalarField grad_sq_avg_sum(const ScalarField& f) {
  ScalarField out(f.grid);
  for (int a = 0; a < f.grid.dim(); ++a) {
    const auto g = grad_sq_avg(f, a);
    for (std::size_t k = 0; k < f.size(); ++k) out[k] += g[k];
  }
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  ScalarField out(f.grid);
  for (int a = 0; a < f.grid.dim(); ++a) {
    const double h2 = f.grid.h(a) * f.grid.h(a);
    for (std::size_t k = 0; k < f.size(); ++k)
      out[k] += (f[f.grid.neighbor(k, a, +1)] - 2.0 * f[k] + f[f.grid.neighbor(k, a, -1)]) / h2;
  }
  return out;
}

FaceField mobility_face(const ScalarField& c, double kappa) {
  for (double v : c.values)
    if (!(v > 0.0 && v < 1.0)) throw std::domain_error("mobility_face: composition outside (0,1)");
  FaceField m{c.grid, {}};
  for (int a = 0; a < c.grid.dim(); ++a) {
    auto& faces = m.faces[a];
    faces.resize(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
      const double ck = c[k];
      const double cn = c[c.grid.neighbor(k, a, +1)];
      faces[k] = kappa * 0.5 * (ck * (1.0 - ck) + cn * (1.0 - cn));
    }
  }
  return m;
}

ScalarField div_m_grad(const FaceField& mob, const ScalarField& f) {
  const auto& g = f.grid;
  ScalarField out(g);
  for (int a = 0; a < g.dim(); ++a) {
    const double h2 = g.h(a) * g.h(a);
    const auto& faces = mob.faces[a];
    for (std::size_t k = 0; k < f.size(); ++k) {
      const std::size_t kp = g.neighbor(k, a, +1);
      const std::size_t km = g.neighbor(k, a, -1);
      out[k] += (faces[k] * (f[kp] - f[k]) - faces[km] * (f[k] - f[km])) / h2;
    }
  }
  return out;
}

double pairwise_sum(std::span<const double> v) {
  constexpr std::size_t kLeaf = 64;
  if (v.size() <= kLeaf) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double inner(const ScalarField& f, const ScalarField& g) {
  if (f.size() != g.size()) throw std::invalid_argument("inner: size mismatch");
  std::vector<double> prod(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) prod[k] = f[k] * g[k];
  return pairwise_sum(prod) * f.grid.cell_volume();
}

double integral(const ScalarField& f) { return pairwise_sum(f.values) * f.grid.cell_volume(); }

double sbp_identity_residual(const ScalarField& phi, const ScalarField& psi, const FaceField& mob,
                             double rhs_factor) {
  const auto& g = phi.grid;
  const auto lhs_field = div_m_grad(mob, psi);
  std::vector<double> lhs(phi.size());
  for (std::size_t k = 0; k < phi.size(); ++k) lhs[k] = -phi[k] * lhs_field[k];

  std::vector<double> rhs(phi.size() * static_cast<std::size_t>(g.dim()));
  for (int a = 0; a < g.dim(); ++a) {
    // Neumann: the mirror ghost makes D+ vanish on the last cell, so boundary
    // faces drop out automatically.
    const auto dphi = dx_plus(phi, a);
    const auto dpsi = dx_plus(psi, a);
    for (std::size_t k = 0; k < phi.size(); ++k)
      rhs[a * phi.size() + k] = mob.faces[a][k] * dphi[k] * dpsi[k];
  }
  return std::abs(pairwise_sum(lhs) - rhs_factor * pairwise_sum(rhs));
}

}  // namespace nipf::fd
