#pragma once

// Discrete energy, the discrete-variational-derivative (DVD) pieces G1..G4,
// the elastic equilibrium residual and the per-step nonlinear system.

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/SparseCore>

#include "nipf/grid.hpp"
#include "nipf/model.hpp"

namespace nipf::dvd {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

struct DiscreteState {
  fd::StructuredGrid grid;
  fd::ScalarField c;
  fd::ScalarField eta;
  fd::VectorField u;
  /// Stress-free reference composition, frozen at t = 0.
  double cbar0 = 0.0;

  DiscreteState() = default;
  explicit DiscreteState(const fd::StructuredGrid& g) : grid(g), c(g), eta(g), u(g) {}

  double mean_c() const;
};

/// c, c*eta and c*(4 - 3 eta) must all lie in (0, 1): the arguments of the
/// logarithmic energy. Throws std::domain_error otherwise.
void check_admissible(const DiscreteState& s);

enum class QuotientMode { TaylorS, Exact };

struct SchemeConfig {
  int S = 10;
  QuotientMode quotient_mode = QuotientMode::TaylorS;
  /// Exact mode falls back to the truncated series when |y1 - y2| <= q_guard.
  double q_guard = 1e-8;
};

struct DiscreteEnergy {
  double e1 = 0.0;  // polynomial
  double e2 = 0.0;  // logarithmic
  double e3 = 0.0;  // elastic
  double e4 = 0.0;  // gradient
  double total() const { return e1 + e2 + e3 + e4; }
};

DiscreteEnergy discrete_energy(const DiscreteState& s, const model::ModelParameters& p);

// ---- difference quotients of psi -------------------------------------------

/// (psi(y1) - psi(y2)) / (y1 - y2). Throws std::domain_error if |y1 - y2| <= guard.
double psi_quotient_exact(double y1, double y2, double guard = 1e-8);
/// d/dy1 of psi_quotient_exact.
double psi_quotient_exact_d1(double y1, double y2, double guard = 1e-8);

/// Odd-order Taylor series of the quotient about the midpoint, orders up to 2S.
double psi_quotient_S(double y1, double y2, int S);
double psi_quotient_S_d1(double y1, double y2, int S);

/// Mode dispatch used by the scheme.
double psi_quotient(double y1, double y2, const SchemeConfig& cfg);
double psi_quotient_d1(double y1, double y2, const SchemeConfig& cfg);

// ---- pointwise discrete derivatives ----------------------------------------

struct Pair {
  double c = 0.0;
  double eta = 0.0;
};

/// Partial derivatives of a Pair with respect to (c1, eta1).
struct PairJacobian {
  double cc = 0.0, ce = 0.0, ec = 0.0, ee = 0.0;
};

/// Exact discrete derivative of the polynomial density between
/// (c0, eta0) and (c1, eta1).
Pair g1_point(double c0, double eta0, double c1, double eta1, const model::PolyCoefficients& m);
PairJacobian g1_point_jacobian(double c0, double eta0, double c1, double eta1,
                               const model::PolyCoefficients& m);

/// Discrete derivative of the logarithmic density.
Pair g2_point(double c0, double eta0, double c1, double eta1, double theta, const SchemeConfig& cfg);
PairJacobian g2_point_jacobian(double c0, double eta0, double c1, double eta1, double theta,
                               const SchemeConfig& cfg);

// ---- field-level pieces -----------------------------------------------------

struct PairField {
  std::vector<double> c;
  std::vector<double> eta;
};

PairField g1(const DiscreteState& n, const DiscreteState& np1, const model::ModelParameters& p);
PairField g2(const DiscreteState& n, const DiscreteState& np1, const model::ModelParameters& p,
             const SchemeConfig& cfg);
/// Elastic contribution; the eta part is identically zero.
PairField g3(const DiscreteState& n, const DiscreteState& np1, const model::ModelParameters& p);
PairField g4(const DiscreteState& n, const DiscreteState& np1, const model::ModelParameters& p);

/// Symmetric strain from central differences of u at one cell.
model::SymTensor strain(const DiscreteState& s, std::size_t cell);
/// Strain minus the eigenstrain eps0 (c - cbar0) I.
model::SymTensor elastic_strain(const DiscreteState& s, std::size_t cell, const model::ModelParameters& p);

/// Gradient of the discrete elastic energy with respect to u, per component,
/// divided by the cell volume. Zero at mechanical equilibrium.
std::vector<std::vector<double>> elastic_residual(const DiscreteState& s, const model::ModelParameters& p);

// ---- gauge ------------------------------------------------------------------

struct PinnedDof {
  std::size_t cell = 0;
  int component = 0;
};

/// One pinned displacement per rigid / checkerboard null mode of the discrete
/// elastic operator. Empty when the elastic scale is zero (then u == 0).
std::vector<PinnedDof> gauge_pins(const fd::StructuredGrid& g);

/// Row sets of the per-component, per-parity-class displacement translations
/// in a point-blocked vector with `nf` fields per cell and u starting at
/// field `u_offset`. These are the slow modes of the pinned elastic block.
std::vector<std::vector<int>> displacement_groups(const fd::StructuredGrid& g, int nf, int u_offset);

// ---- the per-step system ----------------------------------------------------

/// Unknowns of one implicit step, point-blocked: dof = cell * nf + field with
/// field order (c, eta, u_0, ..., u_{d-1}).
class StepSystem {
 public:
  StepSystem(DiscreteState previous, double dt, model::ModelParameters params, SchemeConfig scheme);

  std::size_t size() const { return prev_.grid.cells() * static_cast<std::size_t>(nf_); }
  int fields_per_cell() const { return nf_; }
  double dt() const { return dt_; }
  const DiscreteState& previous() const { return prev_; }
  const model::ModelParameters& params() const { return params_; }
  const std::vector<PinnedDof>& pins() const { return pins_; }

  std::vector<double> pack(const DiscreteState& s) const;
  DiscreteState unpack(std::span<const double> x) const;

  /// Throws std::domain_error when x is outside the admissible set.
  std::vector<double> residual(std::span<const double> x) const;
  SparseMatrix jacobian(std::span<const double> x) const;

  /// Zero-sum correction of the c entries of a Newton direction.
  void project_direction(std::span<double> dx) const;

 private:
  DiscreteState prev_;
  double dt_;
  model::ModelParameters params_;
  SchemeConfig scheme_;
  int nf_;
  std::vector<PinnedDof> pins_;
  fd::FaceField mobility_;
  std::vector<double> trace_sigma_prev_;
};

std::vector<double> assemble_residual(const DiscreteState& xn, const DiscreteState& xnp1, double dt,
                                      const model::ModelParameters& p, const SchemeConfig& cfg);
SparseMatrix assemble_jacobian(const DiscreteState& xn, const DiscreteState& xnp1, double dt,
                               const model::ModelParameters& p, const SchemeConfig& cfg);

// ---- elastic-only subsystem (used to equilibrate u at fixed c) --------------

class ElasticSystem {
 public:
  ElasticSystem(DiscreteState state, model::ModelParameters params);
  std::size_t size() const { return state_.grid.cells() * static_cast<std::size_t>(state_.grid.dim()); }
  std::vector<double> pack(const DiscreteState& s) const;
  DiscreteState unpack(std::span<const double> x) const;
  std::vector<double> residual(std::span<const double> x) const;
  SparseMatrix jacobian() const;

 private:
  DiscreteState state_;
  model::ModelParameters params_;
  std::vector<PinnedDof> pins_;
};

}  // namespace nipf::dvd
