#include "nipf/dvd.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace nipf::dvd {

using model::ModelParameters;
using model::SymTensor;

double DiscreteState::mean_c() const {
  return fd::pairwise_sum(c.values) / static_cast<double>(c.size());
}

void check_admissible(const DiscreteState& s) {
  for (std::size_t k = 0; k < s.c.size(); ++k) {
    const double c = s.c[k];
    const double e = s.eta[k];
    const double p = c * e;
    const double q = c * (4.0 - 3.0 * e);
    if (!(c > 0.0 && c < 1.0 && p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0))
      throw std::domain_error("inadmissible state at cell " + std::to_string(k) + " (c=" + std::to_string(c) +
                              ", eta=" + std::to_string(e) + ")");
  }
}

// ---- strain / stress --------------------------------------------------------

SymTensor strain(const DiscreteState& s, std::size_t k) {
  const auto& g = s.grid;
  const int d = g.dim();
  double grad[3][3] = {};  // grad[I][J] = Dhat_J u_I
  for (int J = 0; J < d; ++J) {
    const std::size_t kp = g.neighbor(k, J, +1);
    const std::size_t km = g.neighbor(k, J, -1);
    const double inv = 1.0 / (2.0 * g.h(J));
    for (int I = 0; I < d; ++I) grad[I][J] = (s.u.comp[I][kp] - s.u.comp[I][km]) * inv;
  }
  SymTensor e{};
  for (int I = 0; I < d; ++I)
    for (int J = 0; J < d; ++J) e[I][J] = 0.5 * (grad[I][J] + grad[J][I]);
  return e;
}

SymTensor elastic_strain(const DiscreteState& s, std::size_t k, const ModelParameters& p) {
  auto e = strain(s, k);
  const double eig = p.eps0 * (s.c[k] - s.cbar0);
  for (int I = 0; I < s.grid.dim(); ++I) e[I][I] -= eig;
  return e;
}

namespace {

double trace_sigma_coefficient(const ModelParameters& p, int d) {
  return p.elastic_scale * (p.elastic.c11 + (d - 1) * p.elastic.c12);
}

std::vector<double> trace_sigma(const DiscreteState& s, const ModelParameters& p) {
  const int d = s.grid.dim();
  const double k = trace_sigma_coefficient(p, d);
  std::vector<double> out(s.c.size(), 0.0);
  if (p.elastic_scale == 0.0) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto e = elastic_strain(s, i, p);
    double tr = 0.0;
    for (int I = 0; I < d; ++I) tr += e[I][I];
    out[i] = k * tr;
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> elastic_residual(const DiscreteState& s, const ModelParameters& p) {
  const auto& g = s.grid;
  const int d = g.dim();
  std::vector<std::vector<double>> r(static_cast<std::size_t>(d), std::vector<double>(g.cells(), 0.0));
  if (p.elastic_scale == 0.0) return r;
  for (std::size_t k = 0; k < g.cells(); ++k) {
    const auto sigma = model::hooke(elastic_strain(s, k, p), d, p);
    // Scatter of Dhat_J^T sigma_IJ.
    for (int J = 0; J < d; ++J) {
      const std::size_t kp = g.neighbor(k, J, +1);
      const std::size_t km = g.neighbor(k, J, -1);
      const double inv = 1.0 / (2.0 * g.h(J));
      for (int I = 0; I < d; ++I) {
        r[I][kp] += sigma[I][J] * inv;
        r[I][km] -= sigma[I][J] * inv;
      }
    }
  }
  return r;
}

// ---- energy -----------------------------------------------------------------

DiscreteEnergy discrete_energy(const DiscreteState& s, const ModelParameters& p) {
  const std::size_t n = s.c.size();
  const double vol = s.grid.cell_volume();
  const int d = s.grid.dim();
  std::vector<double> w1(n), w2(n), w3(n), w4(n);
  const auto gc = fd::grad_sq_avg_sum(s.c);
  const auto ge = fd::grad_sq_avg_sum(s.eta);
  for (std::size_t k = 0; k < n; ++k) {
    w1[k] = model::gibbs_polynomial(s.c[k], s.eta[k], p.poly);
    w2[k] = model::gibbs_log(s.c[k], s.eta[k], p.theta);
    w3[k] = (p.elastic_scale == 0.0) ? 0.0 : model::elastic_density(elastic_strain(s, k, p), d, p);
    w4[k] = 0.5 * p.gamma_c * gc[k] + 1.5 * p.gamma_eta * ge[k];
  }
  return {fd::pairwise_sum(w1) * vol, fd::pairwise_sum(w2) * vol, fd::pairwise_sum(w3) * vol,
          fd::pairwise_sum(w4) * vol};
}

// ---- quotients --------------------------------------------------------------

double psi_quotient_exact(double y1, double y2, double guard) {
  if (std::abs(y1 - y2) <= guard) throw std::domain_error("psi_quotient_exact: arguments too close");
  return (model::psi(y1) - model::psi(y2)) / (y1 - y2);
}

double psi_quotient_exact_d1(double y1, double y2, double guard) {
  const double q = psi_quotient_exact(y1, y2, guard);
  return (model::psi_derivative(y1, 1) - q) / (y1 - y2);
}

namespace {

void check_midpoint(double y) {
  if (!(y > 0.0 && y < 1.0)) throw std::domain_error("psi quotient: midpoint outside (0,1)");
}

}  // namespace

// For odd s >= 3 the term delta^(s-1) psi^(s)(y) / s! reduces to
// [b^(s-1) - a^(s-1)] / (s (s-1)) with a = delta / y and b = delta / (1 - y).
double psi_quotient_S(double y1, double y2, int S) {
  if (S < 1) throw std::invalid_argument("psi_quotient_S: S must be >= 1");
  const double y = 0.5 * (y1 + y2);
  check_midpoint(y);
  const double delta = 0.5 * (y1 - y2);
  const double a2 = (delta / y) * (delta / y);
  const double b2 = (delta / (1.0 - y)) * (delta / (1.0 - y));
  double value = model::psi_derivative(y, 1);
  double ap = 1.0, bp = 1.0;
  for (int s = 3; s <= 2 * S - 1; s += 2) {
    ap *= a2;
    bp *= b2;
    value += (bp - ap) / (s * (s - 1.0));
  }
  return value;
}

double psi_quotient_S_d1(double y1, double y2, int S) {
  if (S < 1) throw std::invalid_argument("psi_quotient_S_d1: S must be >= 1");
  const double y = 0.5 * (y1 + y2);
  check_midpoint(y);
  const double delta = 0.5 * (y1 - y2);
  const double a = delta / y;
  const double b = delta / (1.0 - y);
  const double da = (1.0 - a) / (2.0 * y);
  const double db = (1.0 + b) / (2.0 * (1.0 - y));
  double value = 0.5 * (1.0 / y + 1.0 / (1.0 - y));
  double ap = a, bp = b;  // a^(s-2), b^(s-2)
  for (int s = 3; s <= 2 * S - 1; s += 2) {
    value += (bp * db - ap * da) / s;
    ap *= a * a;
    bp *= b * b;
  }
  return value;
}

double psi_quotient(double y1, double y2, const SchemeConfig& cfg) {
  if (cfg.quotient_mode == QuotientMode::Exact && std::abs(y1 - y2) > cfg.q_guard)
    return psi_quotient_exact(y1, y2, cfg.q_guard);
  return psi_quotient_S(y1, y2, cfg.S);
}

double psi_quotient_d1(double y1, double y2, const SchemeConfig& cfg) {
  if (cfg.quotient_mode == QuotientMode::Exact && std::abs(y1 - y2) > cfg.q_guard)
    return psi_quotient_exact_d1(y1, y2, cfg.q_guard);
  return psi_quotient_S_d1(y1, y2, cfg.S);
}

// ---- pointwise G1 / G2 ------------------------------------------------------

Pair g1_point(double c0, double eta0, double c1, double eta1, const model::PolyCoefficients& m) {
  const double f0 = 1.0 - eta0, f1 = 1.0 - eta1;
  const double avg_m1 = 0.5 * (m.M1(f0) + m.M1(f1));
  const double avg_m2 = 0.5 * (m.M2(f0) + m.M2(f1));
  const double q3 = c1 * c1 + c1 * c0 + c0 * c0;
  const double q4 = (c1 + c0) * (c1 * c1 + c0 * c0);
  const double q5 = c1 * c1 * c1 * c1 + c1 * c1 * c1 * c0 + c1 * c1 * c0 * c0 + c1 * c0 * c0 * c0 +
                    c0 * c0 * c0 * c0;
  Pair g;
  g.c = avg_m1 * 0.5 * (c0 + c1) + avg_m2 / 3.0 * q3 + m.m3 / 4.0 * q4 + m.m4 / 5.0 * q5 + m.m0;
  const double avg_m5 = 0.5 * (m.M5(c0) + m.M5(c1));
  const double avg_m6 = 0.5 * (m.M6(c0) + m.M6(c1));
  g.eta = avg_m5 * 0.5 * (f0 + f1) + avg_m6 / 3.0 * (f1 * f1 + f1 * f0 + f0 * f0);
  return g;
}

PairJacobian g1_point_jacobian(double c0, double eta0, double c1, double eta1,
                               const model::PolyCoefficients& m) {
  const double f0 = 1.0 - eta0, f1 = 1.0 - eta1;
  const double ch = 0.5 * (c0 + c1);
  const double fh = 0.5 * (f0 + f1);
  const double avg_m1 = 0.5 * (m.M1(f0) + m.M1(f1));
  const double avg_m2 = 0.5 * (m.M2(f0) + m.M2(f1));
  const double avg_m5 = 0.5 * (m.M5(c0) + m.M5(c1));
  const double avg_m6 = 0.5 * (m.M6(c0) + m.M6(c1));
  const double q3c = c1 * c1 + c1 * c0 + c0 * c0;
  const double q3f = f1 * f1 + f1 * f0 + f0 * f0;
  const double dq3 = 2.0 * c1 + c0;
  const double dq4 = 3.0 * c1 * c1 + 2.0 * c1 * c0 + c0 * c0;
  const double dq5 = 4.0 * c1 * c1 * c1 + 3.0 * c1 * c1 * c0 + 2.0 * c1 * c0 * c0 + c0 * c0 * c0;
  PairJacobian j;
  j.cc = 0.5 * avg_m1 + avg_m2 / 3.0 * dq3 + m.m3 / 4.0 * dq4 + m.m4 / 5.0 * dq5;
  j.ce = -(0.5 * m.dM1(f1) * ch + m.dM2(f1) * q3c / 6.0);
  j.ec = 0.5 * m.dM5(c1) * fh + m.dM6(c1) * q3f / 6.0;
  j.ee = -(0.5 * avg_m5 + avg_m6 / 3.0 * (2.0 * f1 + f0));
  return j;
}

Pair g2_point(double c0, double eta0, double c1, double eta1, double theta, const SchemeConfig& cfg) {
  if (theta == 0.0) return {};
  const double p0 = c0 * eta0, p1 = c1 * eta1;
  const double q0 = c0 * (4.0 - 3.0 * eta0), q1 = c1 * (4.0 - 3.0 * eta1);
  const double Qc = psi_quotient(c1, c0, cfg);
  const double Qp = psi_quotient(p1, p0, cfg);
  const double Qq = psi_quotient(q1, q0, cfg);
  const double eh = 0.5 * (eta0 + eta1);
  const double ch = 0.5 * (c0 + c1);
  return {theta / 4.0 * (4.0 * Qc + 3.0 * eh * Qp + (4.0 - 3.0 * eh) * Qq), theta / 4.0 * 3.0 * ch * (Qp - Qq)};
}

PairJacobian g2_point_jacobian(double c0, double eta0, double c1, double eta1, double theta,
                               const SchemeConfig& cfg) {
  if (theta == 0.0) return {};
  const double p0 = c0 * eta0, p1 = c1 * eta1;
  const double q0 = c0 * (4.0 - 3.0 * eta0), q1 = c1 * (4.0 - 3.0 * eta1);
  const double Qp = psi_quotient(p1, p0, cfg);
  const double Qq = psi_quotient(q1, q0, cfg);
  const double dQc = psi_quotient_d1(c1, c0, cfg);
  const double dQp = psi_quotient_d1(p1, p0, cfg);
  const double dQq = psi_quotient_d1(q1, q0, cfg);
  const double eh = 0.5 * (eta0 + eta1);
  const double ehp = 4.0 - 3.0 * eh;
  const double ch = 0.5 * (c0 + c1);
  const double t = theta / 4.0;
  const double dq_dc = 4.0 - 3.0 * eta1;
  PairJacobian j;
  j.cc = t * (4.0 * dQc + 3.0 * eh * dQp * eta1 + ehp * dQq * dq_dc);
  j.ce = t * (1.5 * Qp + 3.0 * eh * dQp * c1 - 1.5 * Qq - 3.0 * ehp * dQq * c1);
  j.ec = t * (1.5 * (Qp - Qq) + 3.0 * ch * (dQp * eta1 - dQq * dq_dc));
  j.ee = t * 3.0 * ch * (dQp * c1 + 3.0 * c1 * dQq);
  return j;
}

// ---- field-level pieces -----------------------------------------------------

namespace {

void check_same_grid(const DiscreteState& a, const DiscreteState& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("states live on different grids");
}

}  // namespace

PairField g1(const DiscreteState& n, const DiscreteState& np1, const ModelParameters& p) {
  check_same_grid(n, np1);
  PairField out{std::vector<double>(n.c.size()), std::vector<double>(n.c.size())};
  for (std::size_t k = 0; k < n.c.size(); ++k) {
    const auto g = g1_point(n.c[k], n.eta[k], np1.c[k], np1.eta[k], p.poly);
    out.c[k] = g.c;
    out.eta[k] = g.eta;
  }
  return out;
}

PairField g2(const DiscreteState& n, const DiscreteState& np1, const ModelParameters& p, const SchemeConfig& cfg) {
  check_same_grid(n, np1);
  PairField out{std::vector<double>(n.c.size()), std::vector<double>(n.c.size())};
  for (std::size_t k = 0; k < n.c.size(); ++k) {
    const auto g = g2_point(n.c[k], n.eta[k], np1.c[k], np1.eta[k], p.theta, cfg);
    out.c[k] = g.c;
    out.eta[k] = g.eta;
  }
  return out;
}

PairField g3(const DiscreteState& n, const DiscreteState& np1, const ModelParameters& p) {
  check_same_grid(n, np1);
  PairField out{std::vector<double>(n.c.size(), 0.0), std::vector<double>(n.c.size(), 0.0)};
  if (p.elastic_scale == 0.0) return out;
  const auto t0 = trace_sigma(n, p);
  const auto t1 = trace_sigma(np1, p);
  for (std::size_t k = 0; k < n.c.size(); ++k) out.c[k] = -p.eps0 * 0.5 * (t0[k] + t1[k]);
  return out;
}

PairField g4(const DiscreteState& n, const DiscreteState& np1, const ModelParameters& p) {
  check_same_grid(n, np1);
  fd::ScalarField ch(n.grid), eh(n.grid);
  for (std::size_t k = 0; k < n.c.size(); ++k) {
    ch[k] = 0.5 * (n.c[k] + np1.c[k]);
    eh[k] = 0.5 * (n.eta[k] + np1.eta[k]);
  }
  const auto lc = fd::laplacian(ch);
  const auto le = fd::laplacian(eh);
  PairField out{std::vector<double>(n.c.size()), std::vector<double>(n.c.size())};
  for (std::size_t k = 0; k < n.c.size(); ++k) {
    out.c[k] = -p.gamma_c * lc[k];
    out.eta[k] = -3.0 * p.gamma_eta * le[k];
  }
  return out;
}

// ---- gauge ------------------------------------------------------------------

std::vector<PinnedDof> gauge_pins(const fd::StructuredGrid& g) {
  const int d = g.dim();
  std::vector<PinnedDof> pins;
  if (g.bc() == fd::Boundary::Periodic) {
    // Central differences cannot see parity classes on even axes: every
    // component is free per class.
    std::vector<int> even;
    for (int a = 0; a < d; ++a)
      if (g.n(a) % 2 == 0) even.push_back(a);
    const int classes = 1 << even.size();
    for (int I = 0; I < d; ++I) {
      for (int m = 0; m < classes; ++m) {
        std::array<int, 3> ijk{0, 0, 0};
        for (std::size_t b = 0; b < even.size(); ++b) ijk[even[b]] = (m >> b) & 1;
        pins.push_back({g.index(ijk[0], ijk[1], ijk[2]), I});
      }
    }
  } else {
    for (int I = 0; I < d; ++I) pins.push_back({0, I});
    // A discrete rotation in the (I, J) plane survives when both axes have an
    // even number of cells.
    for (int I = 0; I < d; ++I) {
      for (int J = I + 1; J < d; ++J) {
        if (g.n(I) % 2 != 0 || g.n(J) % 2 != 0) continue;
        std::array<int, 3> ijk{0, 0, 0};
        ijk[I] = 1;
        pins.push_back({g.index(ijk[0], ijk[1], ijk[2]), J});
      }
    }
  }
  return pins;
}

std::vector<std::vector<int>> displacement_groups(const fd::StructuredGrid& g, int nf, int u_offset) {
  const int d = g.dim();
  std::vector<int> even;
  for (int a = 0; a < d; ++a)
    if (g.n(a) % 2 == 0) even.push_back(a);
  const int classes = 1 << even.size();
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(d * classes));
  // Pinned dofs are left out: a translation including them is an exact null
  // vector of the pinned operator and carries no information.
  std::vector<char> pinned(g.cells() * static_cast<std::size_t>(d), 0);
  for (const auto& p : gauge_pins(g)) pinned[p.cell * d + p.component] = 1;
  for (std::size_t k = 0; k < g.cells(); ++k) {
    const auto ijk = g.coords(k);
    int m = 0;
    for (std::size_t b = 0; b < even.size(); ++b) m |= (ijk[even[b]] & 1) << b;
    for (int I = 0; I < d; ++I)
      if (!pinned[k * d + I]) groups[I * classes + m].push_back(static_cast<int>(k) * nf + u_offset + I);
  }
  return groups;
}

// ---- StepSystem -------------------------------------------------------------

StepSystem::StepSystem(DiscreteState previous, double dt, ModelParameters params, SchemeConfig scheme)
    : prev_(std::move(previous)), dt_(dt), params_(std::move(params)), scheme_(scheme) {
  if (!(dt_ > 0.0)) throw std::invalid_argument("StepSystem: dt must be positive");
  nf_ = 2 + prev_.grid.dim();
  pins_ = gauge_pins(prev_.grid);
  mobility_ = fd::mobility_face(prev_.c, params_.kappa);
  trace_sigma_prev_ = trace_sigma(prev_, params_);
}

std::vector<double> StepSystem::pack(const DiscreteState& s) const {
  const std::size_t N = s.grid.cells();
  const int d = s.grid.dim();
  std::vector<double> x(size());
  for (std::size_t k = 0; k < N; ++k) {
    double* xk = &x[k * nf_];
    xk[0] = s.c[k];
    xk[1] = s.eta[k];
    for (int I = 0; I < d; ++I) xk[2 + I] = s.u.comp[I][k];
  }
  return x;
}

DiscreteState StepSystem::unpack(std::span<const double> x) const {
  if (x.size() != size()) throw std::invalid_argument("StepSystem::unpack: wrong vector length");
  DiscreteState s(prev_.grid);
  s.cbar0 = prev_.cbar0;
  const int d = s.grid.dim();
  for (std::size_t k = 0; k < s.grid.cells(); ++k) {
    const double* xk = &x[k * nf_];
    s.c[k] = xk[0];
    s.eta[k] = xk[1];
    for (int I = 0; I < d; ++I) s.u.comp[I][k] = xk[2 + I];
  }
  return s;
}

std::vector<double> StepSystem::residual(std::span<const double> x) const {
  const auto s1 = unpack(x);
  check_admissible(s1);
  const std::size_t N = s1.grid.cells();
  const int d = s1.grid.dim();
  const auto& p = params_;

  fd::ScalarField gc(s1.grid);
  std::vector<double> ge(N);
  {
    fd::ScalarField ch(s1.grid), eh(s1.grid);
    for (std::size_t k = 0; k < N; ++k) {
      ch[k] = 0.5 * (prev_.c[k] + s1.c[k]);
      eh[k] = 0.5 * (prev_.eta[k] + s1.eta[k]);
    }
    const auto lc = fd::laplacian(ch);
    const auto le = fd::laplacian(eh);
    const auto t1 = trace_sigma(s1, p);
    for (std::size_t k = 0; k < N; ++k) {
      const auto a = g1_point(prev_.c[k], prev_.eta[k], s1.c[k], s1.eta[k], p.poly);
      const auto b = g2_point(prev_.c[k], prev_.eta[k], s1.c[k], s1.eta[k], p.theta, scheme_);
      gc[k] = a.c + b.c - p.gamma_c * lc[k] - p.eps0 * 0.5 * (trace_sigma_prev_[k] + t1[k]);
      ge[k] = a.eta + b.eta - 3.0 * p.gamma_eta * le[k];
    }
  }
  const auto flux = fd::div_m_grad(mobility_, gc);

  std::vector<double> r(size());
  for (std::size_t k = 0; k < N; ++k) {
    r[k * nf_] = (s1.c[k] - prev_.c[k]) / dt_ - flux[k];
    r[k * nf_ + 1] = (s1.eta[k] - prev_.eta[k]) / dt_ + ge[k];
  }
  if (p.elastic_scale == 0.0) {
    for (std::size_t k = 0; k < N; ++k)
      for (int I = 0; I < d; ++I) r[k * nf_ + 2 + I] = s1.u.comp[I][k];
    return r;
  }
  const auto ru = elastic_residual(s1, p);
  for (std::size_t k = 0; k < N; ++k)
    for (int I = 0; I < d; ++I) r[k * nf_ + 2 + I] = ru[I][k];
  for (const auto& pin : pins_) r[pin.cell * nf_ + 2 + pin.component] = s1.u.comp[pin.component][pin.cell];
  return r;
}

void StepSystem::project_direction(std::span<double> dx) const {
  const std::size_t N = prev_.grid.cells();
  std::vector<double> dc(N);
  for (std::size_t k = 0; k < N; ++k) dc[k] = dx[k * nf_];
  const double mean = fd::pairwise_sum(dc) / static_cast<double>(N);
  for (std::size_t k = 0; k < N; ++k) dx[k * nf_] -= mean;
}

std::vector<double> assemble_residual(const DiscreteState& xn, const DiscreteState& xnp1, double dt,
                                      const ModelParameters& p, const SchemeConfig& cfg) {
  const StepSystem sys(xn, dt, p, cfg);
  return sys.residual(sys.pack(xnp1));
}

SparseMatrix assemble_jacobian(const DiscreteState& xn, const DiscreteState& xnp1, double dt,
                               const ModelParameters& p, const SchemeConfig& cfg) {
  const StepSystem sys(xn, dt, p, cfg);
  return sys.jacobian(sys.pack(xnp1));
}

// ---- ElasticSystem ----------------------------------------------------------

ElasticSystem::ElasticSystem(DiscreteState state, ModelParameters params)
    : state_(std::move(state)), params_(std::move(params)), pins_(gauge_pins(state_.grid)) {}

std::vector<double> ElasticSystem::pack(const DiscreteState& s) const {
  const int d = s.grid.dim();
  std::vector<double> x(size());
  for (std::size_t k = 0; k < s.grid.cells(); ++k)
    for (int I = 0; I < d; ++I) x[k * d + I] = s.u.comp[I][k];
  return x;
}

DiscreteState ElasticSystem::unpack(std::span<const double> x) const {
  if (x.size() != size()) throw std::invalid_argument("ElasticSystem::unpack: wrong vector length");
  DiscreteState s = state_;
  const int d = s.grid.dim();
  for (std::size_t k = 0; k < s.grid.cells(); ++k)
    for (int I = 0; I < d; ++I) s.u.comp[I][k] = x[k * d + I];
  return s;
}

std::vector<double> ElasticSystem::residual(std::span<const double> x) const {
  const auto s = unpack(x);
  const int d = s.grid.dim();
  std::vector<double> r(size());
  if (params_.elastic_scale == 0.0) {
    std::copy(x.begin(), x.end(), r.begin());
    return r;
  }
  const auto ru = elastic_residual(s, params_);
  for (std::size_t k = 0; k < s.grid.cells(); ++k)
    for (int I = 0; I < d; ++I) r[k * d + I] = ru[I][k];
  for (const auto& pin : pins_) r[pin.cell * d + pin.component] = x[pin.cell * d + pin.component];
  return r;
}

}  // namespace nipf::dvd
