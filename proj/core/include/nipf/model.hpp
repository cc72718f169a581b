#pragma once

// Continuous Ni-Al phase-field model: free-energy densities of the reduced
// (c, eta) system, their analytic partial derivatives and the coefficient
// builder that maps thermodynamic inputs to dimensionless polynomials.

#include <array>
#include <optional>

namespace nipf::model {

/// Cubic elastic constants in units of the energy density scale.
struct ElasticConstants {
  double c11 = 0.0;
  double c12 = 0.0;
  double c44 = 0.0;
};

/// Constant parts of the polynomial coefficient functions of the Gibbs energy.
///
///   M1(phi) = m1a + m1b phi^2
///   M2(phi) = m2a + m2b phi^2 + m2c phi^3
///   M5(c)   = m5a c^2 + m5b c^3
///   M6(c)   = m6 c^3
///
/// with phi = 1 - eta. M0, M3 and M4 are constants.
struct PolyCoefficients {
  double m0 = 0.0;
  double m1a = 0.0;
  double m1b = 0.0;
  double m2a = 0.0;
  double m2b = 0.0;
  double m2c = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  double m5a = 0.0;
  double m5b = 0.0;
  double m6 = 0.0;

  double M1(double phi) const { return m1a + m1b * phi * phi; }
  double M2(double phi) const { return m2a + phi * phi * (m2b + m2c * phi); }
  double M5(double c) const { return c * c * (m5a + m5b * c); }
  double M6(double c) const { return m6 * c * c * c; }

  double dM1(double phi) const { return 2.0 * m1b * phi; }
  double dM2(double phi) const { return phi * (2.0 * m2b + 3.0 * m2c * phi); }
  double dM5(double c) const { return c * (2.0 * m5a + 3.0 * m5b * c); }
  double dM6(double c) const { return 3.0 * m6 * c * c; }

  /// The eta-side coefficients must be the mixed-partial partners of the
  /// c-side ones, otherwise no potential exists.
  bool integrable(double rel_tol = 1e-9) const;
};

/// Raw thermodynamic inputs (SI units, J/mol and m^3/mol, J/m^3).
struct CalphadInputs {
  double e0_al = 0.0;
  double e0_ni = 0.0;
  double l0 = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
  double u1 = 0.0;
  double u4 = 0.0;
  double gas_R = 8.314462618;
  double temp_T = 1073.0;
  double vm = 1.48e-5;
  double deltaE = 3.3e7;
};

struct ModelParameters {
  double theta = 1.0;
  double gamma_c = 1.0;
  double gamma_eta = 1.0;
  double kappa = 0.008;
  double eps0 = 0.049;
  ElasticConstants elastic{};
  double elastic_scale = 1.0;
  PolyCoefficients poly{};
  std::optional<CalphadInputs> calphad;

  /// Throws std::invalid_argument on the first violated invariant.
  void validate() const;

  /// Shipped coefficient set with wells near (c, eta) = (0.137, 1) and
  /// (0.229, 0.005) at T = 1073 K.
  static ModelParameters model_default();
};

/// Symmetric 3x3 strain or stress tensor, only the leading d x d block used.
using SymTensor = std::array<std::array<double, 3>, 3>;

/// Psi(z) = z ln z + (1 - z) ln(1 - z). Throws std::domain_error outside (0, 1).
double psi(double z);

/// s-th derivative of psi, s >= 1, in closed form.
double psi_derivative(double z, int s);

/// Polynomial part Phi(c, eta) of the Gibbs energy.
double gibbs_polynomial(double c, double eta, const PolyCoefficients& poly);

/// theta * {Psi(c) + 3/4 Psi(c eta) + 1/4 Psi(c (4 - 3 eta))}.
double gibbs_log(double c, double eta, double theta);

/// Full Gibbs energy density Phi + logarithmic part.
double gibbs_energy(double c, double eta, const ModelParameters& p);

double gibbs_dc(double c, double eta, const ModelParameters& p);
double gibbs_deta(double c, double eta, const ModelParameters& p);

/// Stress sigma = L * C : eps for the cubic tensor restricted to dim axes.
SymTensor hooke(const SymTensor& eps, int dim, const ModelParameters& p);

/// L/2 [C12 (tr eps)^2 + (C11 - C12) sum eps_II^2 + 4 C44 sum_{I<J} eps_IJ^2].
double elastic_density(const SymTensor& eps_el, int dim, const ModelParameters& p);

/// Populates the polynomial coefficients and theta from thermodynamic inputs.
/// Throws std::domain_error when vm * deltaE == 0.
struct BuiltCoefficients {
  PolyCoefficients poly;
  double theta = 0.0;
};
BuiltCoefficients build_coefficients(const CalphadInputs& in);

/// Physical gradient coefficient (J/m) to the dimensionless one for the
/// length unit `length_unit` (m) and energy density scale `deltaE` (J/m^3).
double dimensionless_gradient(double gamma_si, double deltaE, double length_unit);

}  // namespace nipf::model
