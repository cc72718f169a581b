#pragma once

// Adaptive time stepping around the implicit step, conservation checks,
// CSV/snapshot/checkpoint output and restart.

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "nipf/dvd.hpp"
#include "nipf/model.hpp"
#include "nipf/nks.hpp"

namespace nipf::integrate {

struct AdaptiveConfig {
  double zeta = 100.0;
  double dt_min = 0.01;
  double dt_max = 2.0;
  double dt_init = 0.01;
  /// Retry policy after a failed step.
  double retry_shrink = 0.70710678118654752;
  double zeta_growth = 2.0;
  /// Abort when a retry would go below dt_min * abort_factor.
  double abort_factor = 1.0 / 1024.0;
  /// Restore the configured zeta after this many consecutive successes
  /// (0 disables the reset).
  int zeta_reset_after = 0;

  void validate() const;
};

struct LawPolicy {
  double mass_rel_tol = 1e-10;
  double energy_rel_tol = 1e-9;
  bool enforce = true;
};

/// Relative rate of change of (c, eta) between two states, l2 over all cells.
double change_rate(const dvd::DiscreteState& now, const dvd::DiscreteState& before, double dt);

/// max(dt_min, dt_max / sqrt(1 + zeta * rate^2)).
double predict_dt(double rate, double zeta, const AdaptiveConfig& cfg);

struct RunState {
  dvd::DiscreteState current;
  dvd::DiscreteState previous;
  bool has_previous = false;
  double t = 0.0;
  long step = 0;
  double dt_prev = 0.0;
  double zeta = 100.0;
  int success_streak = 0;
  double initial_mass = 0.0;
  dvd::DiscreteEnergy energy{};
};

struct StepRecord {
  long step = 0;
  double t = 0.0;
  double dt = 0.0;
  dvd::DiscreteEnergy energy{};
  double mean_c = 0.0;
  int newton_iterations = 0;
  double gmres_average = 0.0;
  int retries = 0;
  double mass_drift = 0.0;
  double energy_change = 0.0;
};

struct SolverAbort : std::runtime_error {
  explicit SolverAbort(const std::string& what) : std::runtime_error(what) {}
};

struct LawViolation : std::runtime_error {
  explicit LawViolation(const std::string& what) : std::runtime_error(what) {}
};

class Integrator {
 public:
  Integrator(model::ModelParameters params, dvd::SchemeConfig scheme, nks::NewtonConfig newton,
             nks::SchwarzConfig schwarz, AdaptiveConfig adaptive, LawPolicy laws = {});

  /// Freezes cbar0 to the mean composition and equilibrates u at t = 0.
  RunState initialize(dvd::DiscreteState initial) const;

  /// Advances one accepted step. Throws SolverAbort when retries exhaust the
  /// dt floor and LawViolation when a conservation check fails; in both cases
  /// the state is left at the last accepted step.
  StepRecord step(RunState& st, double dt_cap = 0.0);

  /// Returns true to force the given (step, attempt) to count as diverged.
  void set_failure_injector(std::function<bool(long, int)> f) { inject_ = std::move(f); }

  /// Drops cached subdomain factors; the next solve refactors.
  void invalidate_preconditioner();

  const model::ModelParameters& params() const { return params_; }
  const AdaptiveConfig& adaptive() const { return adaptive_; }
  const nks::SchwarzConfig& schwarz() const { return schwarz_; }

 private:
  model::ModelParameters params_;
  dvd::SchemeConfig scheme_;
  nks::NewtonConfig newton_;
  nks::SchwarzConfig schwarz_;
  AdaptiveConfig adaptive_;
  LawPolicy laws_;
  std::function<bool(long, int)> inject_;
  std::unique_ptr<nks::SchwarzPreconditioner> pc_;
  double pc_dt_ = -1.0;
};

/// One implicit step of size dt from st.current with a fresh preconditioner.
/// Used by the solver benchmarks; no retries, no law checks.
struct FixedStepResult {
  nks::SolveReport report;
  dvd::DiscreteState state;
  int factorizations = 0;
};
FixedStepResult solve_fixed_step(const dvd::DiscreteState& current, double dt, const model::ModelParameters& p,
                                 const dvd::SchemeConfig& scheme, const nks::NewtonConfig& newton,
                                 const nks::SchwarzConfig& schwarz);

/// Recomputes the cached energy of a state read from a checkpoint.
void refresh_energy(RunState& st, const model::ModelParameters& p);

/// Solves the elastic equilibrium for u at fixed (c, eta). Throws SolverAbort
/// on failure.
void equilibrate_displacement(dvd::DiscreteState& s, const model::ModelParameters& p,
                              const nks::NewtonConfig& newton, nks::SchwarzConfig schwarz);

// ---- checkpoints ----------------------------------------------------------------

/// Binary little-endian checkpoint plus a `<path>.manifest` text file.
void write_checkpoint(const std::filesystem::path& path, const RunState& st);
RunState read_checkpoint(const std::filesystem::path& path);

// ---- driver ---------------------------------------------------------------------

struct RunControl {
  double end_time = 0.0;
  long max_steps = -1;
  long snapshot_every = 0;
  long checkpoint_every = 0;
  std::filesystem::path output_dir;
  /// Append to an existing CSV instead of starting a new one.
  bool append_csv = false;
};

struct RunSummary {
  long steps = 0;
  double t = 0.0;
  bool aborted = false;
  std::string message;
  std::optional<std::filesystem::path> diagnostic_checkpoint;
};

std::string csv_header();
std::string csv_row(const StepRecord& r);

/// Steps until end_time or max_steps, writing run.csv, snapshots and
/// checkpoints into output_dir. Solver aborts and law violations end the run
/// with a diagnostic checkpoint instead of throwing.
RunSummary run(Integrator& integrator, RunState& st, const RunControl& ctl,
               const std::function<void(const RunState&, const StepRecord&)>& on_step = {});

}  // namespace nipf::integrate
