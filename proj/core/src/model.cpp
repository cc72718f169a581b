#include "nipf/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nipf::model {

namespace {

bool close(double a, double b, double rel_tol) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) <= rel_tol * scale || std::abs(a - b) < 1e-14;
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("ModelParameters: ") + what);
}

// Representative cubic constants of a Ni-rich fcc matrix, in GPa.
constexpr double kC11Gpa = 166.0;
constexpr double kC12Gpa = 106.5;
constexpr double kC44Gpa = 75.3;

// Gradient energy coefficients (J/m) and the length unit (m).
constexpr double kGammaC = 2.5e-9;
constexpr double kGammaEta = 6.0e-12;
constexpr double kLengthUnit = 1.5e-9;

}  // namespace

bool PolyCoefficients::integrable(double rel_tol) const {
  return close(m5a, -m1b, rel_tol) && close(m5b, -2.0 * m2b / 3.0, rel_tol) &&
         close(m6, -m2c, rel_tol);
}

void ModelParameters::validate() const {
  require(gamma_c > 0.0, "gamma_c must be positive");
  require(gamma_eta > 0.0, "gamma_eta must be positive");
  require(kappa > 0.0, "kappa must be positive");
  require(theta > 0.0, "theta must be positive");
  require(elastic_scale >= 0.0, "elastic_scale must be non-negative");
  if (elastic_scale > 0.0) {
    require(elastic.c11 - elastic.c12 > 0.0, "c11 - c12 must be positive");
    require(elastic.c44 > 0.0, "c44 must be positive");
  }
  require(poly.integrable(), "eta-side coefficients (m5a, m5b, m6) are not the mixed partials of the c side");
}

ModelParameters ModelParameters::model_default() {
  CalphadInputs in;
  const double T = in.temp_T;
  in.l0 = -162407.75 + 16.212965 * T;
  in.l1 = 73417.798 - 34.914168 * T;
  in.l2 = 33471.014 - 9.8373558 * T;
  in.l3 = -30758.01 + 10.25267 * T;
  // Ordering energies tuned so the two wells sit at the gamma/gamma' compositions.
  in.u1 = -12050.0;
  in.u4 = 3415.0;

  const auto built = build_coefficients(in);
  ModelParameters p;
  p.poly = built.poly;
  p.theta = built.theta;
  p.gamma_c = dimensionless_gradient(kGammaC, in.deltaE, kLengthUnit);
  p.gamma_eta = dimensionless_gradient(kGammaEta, in.deltaE, kLengthUnit);
  p.elastic = {kC11Gpa * 1e9 / in.deltaE, kC12Gpa * 1e9 / in.deltaE, kC44Gpa * 1e9 / in.deltaE};
  p.elastic_scale = 1.0;
  p.calphad = in;
  return p;
}

double psi(double z) {
  if (!(z > 0.0 && z < 1.0)) throw std::domain_error("psi: argument outside (0,1)");
  return z * std::log(z) + (1.0 - z) * std::log1p(-z);
}

double psi_derivative(double z, int s) {
  if (!(z > 0.0 && z < 1.0)) throw std::domain_error("psi_derivative: argument outside (0,1)");
  if (s < 1) throw std::invalid_argument("psi_derivative: order must be >= 1");
  if (s == 1) return std::log(z) - std::log1p(-z);
  // (s-2)! [(-1)^s z^(1-s) + (1-z)^(1-s)]
  double fact = 1.0;
  for (int k = 2; k <= s - 2; ++k) fact *= k;
  const double sign = (s % 2 == 0) ? 1.0 : -1.0;
  return fact * (sign * std::pow(z, 1 - s) + std::pow(1.0 - z, 1 - s));
}

double gibbs_polynomial(double c, double eta, const PolyCoefficients& m) {
  const double phi = 1.0 - eta;
  return c * (m.m0 + c * (m.M1(phi) / 2.0 + c * (m.M2(phi) / 3.0 + c * (m.m3 / 4.0 + c * m.m4 / 5.0))));
}

double gibbs_log(double c, double eta, double theta) {
  if (theta == 0.0) return 0.0;
  return theta * (psi(c) + 0.75 * psi(c * eta) + 0.25 * psi(c * (4.0 - 3.0 * eta)));
}

double gibbs_energy(double c, double eta, const ModelParameters& p) {
  return gibbs_polynomial(c, eta, p.poly) + gibbs_log(c, eta, p.theta);
}

double gibbs_dc(double c, double eta, const ModelParameters& p) {
  const auto& m = p.poly;
  const double phi = 1.0 - eta;
  const double poly = m.m0 + c * (m.M1(phi) + c * (m.M2(phi) + c * (m.m3 + c * m.m4)));
  if (p.theta == 0.0) return poly;
  const double etap = 4.0 - 3.0 * eta;
  return poly + p.theta / 4.0 *
                    (4.0 * psi_derivative(c, 1) + 3.0 * eta * psi_derivative(c * eta, 1) +
                     etap * psi_derivative(c * etap, 1));
}

double gibbs_deta(double c, double eta, const ModelParameters& p) {
  const auto& m = p.poly;
  const double phi = 1.0 - eta;
  const double poly = m.M5(c) * phi + m.M6(c) * phi * phi;
  if (p.theta == 0.0) return poly;
  const double etap = 4.0 - 3.0 * eta;
  return poly + p.theta / 4.0 * 3.0 * c * (psi_derivative(c * eta, 1) - psi_derivative(c * etap, 1));
}

SymTensor hooke(const SymTensor& eps, int dim, const ModelParameters& p) {
  SymTensor sigma{};
  const double L = p.elastic_scale;
  const auto& C = p.elastic;
  double tr = 0.0;
  for (int I = 0; I < dim; ++I) tr += eps[I][I];
  for (int I = 0; I < dim; ++I) {
    sigma[I][I] = L * (C.c12 * tr + (C.c11 - C.c12) * eps[I][I]);
    for (int J = 0; J < dim; ++J)
      if (J != I) sigma[I][J] = L * 2.0 * C.c44 * eps[I][J];
  }
  return sigma;
}

double elastic_density(const SymTensor& e, int dim, const ModelParameters& p) {
  if (p.elastic_scale == 0.0) return 0.0;
  const auto& C = p.elastic;
  double tr = 0.0;
  double diag_sq = 0.0;
  double off_sq = 0.0;
  for (int I = 0; I < dim; ++I) {
    tr += e[I][I];
    diag_sq += e[I][I] * e[I][I];
    for (int J = I + 1; J < dim; ++J) off_sq += e[I][J] * e[I][J];
  }
  return p.elastic_scale * 0.5 * (C.c12 * tr * tr + (C.c11 - C.c12) * diag_sq + 4.0 * C.c44 * off_sq);
}

BuiltCoefficients build_coefficients(const CalphadInputs& in) {
  const double s = in.vm * in.deltaE;
  if (s == 0.0) throw std::domain_error("build_coefficients: vm * deltaE is zero");
  const double L0 = in.l0, L1 = in.l1, L2 = in.l2, L3 = in.l3, U1 = in.u1, U4 = in.u4;
  BuiltCoefficients out;
  auto& m = out.poly;
  m.m0 = (in.e0_al - in.e0_ni + (L0 - L1 + L2 - L3)) / s;
  m.m1a = -(2.0 * L0 - 6.0 * L1 + 10.0 * L2 - 14.0 * L3) / s;
  m.m1b = (24.0 * U1 + 72.0 * U4) / s;
  m.m2a = -(6.0 * L1 - 24.0 * L2 + 54.0 * L3) / s;
  m.m2b = -216.0 * U4 / s;
  m.m2c = -144.0 * U4 / s;
  m.m3 = -(16.0 * L2 - 80.0 * L3) / s;
  m.m4 = -40.0 * L3 / s;
  // M5(c) = -(24 U1 c^2 + 72 U4 (1 - 2c) c^2) / s
  m.m5a = -(24.0 * U1 + 72.0 * U4) / s;
  m.m5b = 144.0 * U4 / s;
  m.m6 = 144.0 * U4 / s;
  out.theta = in.gas_R * in.temp_T / s;
  return out;
}

double dimensionless_gradient(double gamma_si, double deltaE, double length_unit) {
  return gamma_si / (deltaE * length_unit * length_unit);
}

}  // namespace nipf::model
