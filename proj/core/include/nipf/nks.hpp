#pragma once

// Inexact Newton-Krylov-Schwarz: level-of-fill ILU, restarted GMRES,
// overlapping Schwarz preconditioners and a line-searched Newton driver.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "nipf/grid.hpp"

namespace nipf::nks {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

// ---- ILU(k) -------------------------------------------------------------------

struct ZeroPivot : std::runtime_error {
  explicit ZeroPivot(const std::string& what) : std::runtime_error(what) {}
};

/// Incomplete LU with level-of-fill k. A negative level keeps every fill
/// entry, which gives the complete LU factorization.
class IluFactorization {
 public:
  static constexpr int kComplete = -1;

  IluFactorization() = default;
  /// Throws ZeroPivot when a pivot vanishes.
  IluFactorization(const SparseMatrix& a, int fill_level);

  /// Solves L U x = b.
  void solve(std::span<const double> b, std::span<double> x) const;

  int rows() const { return n_; }
  std::size_t nonzeros() const { return val_.size(); }
  int fill_level() const { return level_; }
  /// Unit lower factor (diagonal stored explicitly) and upper factor.
  SparseMatrix lower() const;
  SparseMatrix upper() const;

 private:
  int n_ = 0;
  int level_ = 0;
  std::vector<int> ptr_;
  std::vector<int> col_;
  std::vector<double> val_;
  std::vector<int> diag_;
};

// ---- GMRES ----------------------------------------------------------------------

using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

enum class PreconditionSide { Left, Right };

struct GmresOptions {
  int restart = 30;
  int max_iterations = 500;
  double rel_tol = 1e-10;
  double abs_tol = 1e-9;
  PreconditionSide side = PreconditionSide::Left;
};

struct GmresResult {
  int iterations = 0;
  bool converged = false;
  double residual_norm = 0.0;
};

/// Restarted GMRES on A x = b with x holding the initial guess. Converged
/// means the true residual satisfies ||b - A x|| <= max(rel_tol ||b||, abs_tol).
/// `precond` may be empty.
GmresResult gmres(const LinearOperator& A, const LinearOperator& precond, std::span<const double> b,
                  std::span<double> x, const GmresOptions& opt);

// ---- Schwarz --------------------------------------------------------------------

enum class SchwarzKind { ClassicalAS, LeftRAS, RightRAS };

struct SchwarzConfig {
  SchwarzKind kind = SchwarzKind::ClassicalAS;
  int overlap = 1;
  /// Level of fill for the subdomain ILU; ignored when use_lu is set.
  int fill_level = 0;
  bool use_lu = false;
  /// Keep subdomain factors across Newton iterations and steps until dt
  /// changes or a solve diverges.
  bool reuse = false;
  int subdomains = 1;
  int workers = 1;
  int gmres_restart = 30;
  int gmres_max_iterations = 500;
  /// Add a coarse correction on the displacement translation modes. Without
  /// it the single-point gauge pins make elastic solves converge slowly.
  bool coarse_space = true;
};

std::string to_string(SchwarzKind k);
SchwarzKind schwarz_kind_from_string(const std::string& s);

struct Subdomain {
  /// Sorted global row indices of the overlapping subdomain.
  std::vector<int> rows;
  /// owned[i] is true when rows[i] belongs to the non-overlapping part.
  std::vector<char> owned;
};

/// Splits the grid into `count` boxes and extends each by `overlap` cells
/// across internal boundaries. Every cell carries `fields_per_cell` rows.
std::vector<Subdomain> partition(const fd::StructuredGrid& grid, int fields_per_cell, int count, int overlap);

/// The same for a plain index range split into contiguous blocks of `block`
/// rows.
std::vector<Subdomain> partition_rows(int n, int block, int count, int overlap);

class SchwarzPreconditioner {
 public:
  SchwarzPreconditioner(SchwarzConfig cfg, std::vector<Subdomain> subdomains);

  /// Factors the subdomain matrices unless reuse is on and factors exist.
  void setup(const SparseMatrix& J);
  void apply(std::span<const double> r, std::span<double> z) const;
  void invalidate() {
    factors_.clear();
    coarse_ready_ = false;
  }
  /// Each group is the row set of one indicator basis vector. Used only when
  /// the config enables the coarse space.
  void set_coarse_groups(std::vector<std::vector<int>> groups) { groups_ = std::move(groups); }
  bool has_factors() const { return !factors_.empty(); }

  const SchwarzConfig& config() const { return cfg_; }
  const std::vector<Subdomain>& subdomains() const { return subs_; }
  /// Number of setup calls that refactored the subdomain matrices.
  int factorization_count() const { return factorizations_; }
  int lu_fallbacks() const { return fallbacks_; }

 private:
  SchwarzConfig cfg_;
  std::vector<Subdomain> subs_;
  std::vector<IluFactorization> factors_;
  std::vector<std::vector<int>> groups_;
  Eigen::MatrixXd coarse_pinv_;
  SparseMatrix coarse_J_;
  bool coarse_ready_ = false;
  int factorizations_ = 0;
  int fallbacks_ = 0;
};

// ---- Newton ---------------------------------------------------------------------

struct NewtonConfig {
  double eps_rel = 1e-8;
  double eps_abs = 1e-6;
  double xi_rel = 1e-10;
  double xi_abs = 1e-9;
  int max_iterations = 30;
  double ls_initial = 1.0;
  double ls_contraction = 0.5;
  double ls_sufficient_decrease = 1e-4;
  double ls_min = 1e-4;
};

struct SolveReport {
  int newton_iterations = 0;
  int gmres_iterations = 0;
  double gmres_average = 0.0;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  bool converged = false;
  std::string reason;
};

struct NonlinearProblem {
  /// Throws std::domain_error for inadmissible iterates.
  std::function<std::vector<double>(std::span<const double>)> residual;
  std::function<SparseMatrix(std::span<const double>)> jacobian;
  /// Optional in-place correction of each Newton direction.
  std::function<void(std::span<double>)> project_direction;
};

double norm2(std::span<const double> v);

/// Solves F(x) = 0 starting from x. On failure x holds the last accepted
/// iterate and the report gives the reason.
SolveReport newton_solve(const NonlinearProblem& problem, std::vector<double>& x, const NewtonConfig& cfg,
                         SchwarzPreconditioner& pc);

// ---- deterministic parallel loop -----------------------------------------------

/// Runs body(i) for i in [0, n) on up to `workers` threads. Each index is
/// processed by exactly one thread; callers write to disjoint slots.
void parallel_for(int n, int workers, const std::function<void(int)>& body);

}  // namespace nipf::nks
