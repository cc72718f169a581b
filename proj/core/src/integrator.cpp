#include "nipf/integrator.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "nipf/io.hpp"

namespace nipf::integrate {

void AdaptiveConfig::validate() const {
  if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max))
    throw std::invalid_argument("AdaptiveConfig: need 0 < dt_min <= dt_init <= dt_max");
  if (!(zeta >= 0.0)) throw std::invalid_argument("AdaptiveConfig: zeta must be non-negative");
  if (!(retry_shrink > 0.0 && retry_shrink < 1.0)) throw std::invalid_argument("AdaptiveConfig: retry_shrink in (0,1)");
  if (!(zeta_growth >= 1.0)) throw std::invalid_argument("AdaptiveConfig: zeta_growth must be >= 1");
}

double change_rate(const dvd::DiscreteState& now, const dvd::DiscreteState& before, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("change_rate: dt must be positive");
  std::vector<double> sq(2 * now.c.size());
  for (std::size_t k = 0; k < now.c.size(); ++k) {
    const double dc = now.c[k] - before.c[k];
    const double de = now.eta[k] - before.eta[k];
    sq[2 * k] = dc * dc;
    sq[2 * k + 1] = de * de;
  }
  return std::sqrt(fd::pairwise_sum(sq)) / dt;
}

double predict_dt(double rate, double zeta, const AdaptiveConfig& cfg) {
  return std::max(cfg.dt_min, cfg.dt_max / std::sqrt(1.0 + zeta * rate * rate));
}

Integrator::Integrator(model::ModelParameters params, dvd::SchemeConfig scheme, nks::NewtonConfig newton,
                       nks::SchwarzConfig schwarz, AdaptiveConfig adaptive, LawPolicy laws)
    : params_(std::move(params)),
      scheme_(scheme),
      newton_(newton),
      schwarz_(schwarz),
      adaptive_(adaptive),
      laws_(laws) {
  params_.validate();
  adaptive_.validate();
}

void equilibrate_displacement(dvd::DiscreteState& s, const model::ModelParameters& p,
                              const nks::NewtonConfig& newton, nks::SchwarzConfig schwarz) {
  const dvd::ElasticSystem sys(s, p);
  const int d = s.grid.dim();
  schwarz.reuse = false;
  nks::SchwarzPreconditioner pc(schwarz, nks::partition(s.grid, d, schwarz.subdomains, schwarz.overlap));
  pc.set_coarse_groups(dvd::displacement_groups(s.grid, d, 0));
  nks::NonlinearProblem prob;
  prob.residual = [&](std::span<const double> x) { return sys.residual(x); };
  const auto J = sys.jacobian();
  prob.jacobian = [&](std::span<const double>) { return J; };
  auto x = sys.pack(s);
  auto cfg = newton;
  // Linear problem: drive it well below the step tolerance.
  cfg.eps_rel = std::min(cfg.eps_rel, 1e-12);
  cfg.eps_abs = std::min(cfg.eps_abs, 1e-9);
  const auto rep = nks::newton_solve(prob, x, cfg, pc);
  if (!rep.converged) throw SolverAbort("elastic equilibration failed: " + rep.reason);
  s = sys.unpack(x);
}

RunState Integrator::initialize(dvd::DiscreteState initial) const {
  dvd::check_admissible(initial);
  RunState st;
  initial.cbar0 = initial.mean_c();
  for (auto& comp : initial.u.comp) std::fill(comp.begin(), comp.end(), 0.0);
  equilibrate_displacement(initial, params_, newton_, schwarz_);
  st.current = std::move(initial);
  st.zeta = adaptive_.zeta;
  st.initial_mass = st.current.mean_c();
  st.energy = dvd::discrete_energy(st.current, params_);
  return st;
}

FixedStepResult solve_fixed_step(const dvd::DiscreteState& current, double dt, const model::ModelParameters& p,
                                 const dvd::SchemeConfig& scheme, const nks::NewtonConfig& newton,
                                 const nks::SchwarzConfig& schwarz) {
  const auto& g = current.grid;
  nks::SchwarzPreconditioner pc(schwarz, nks::partition(g, 2 + g.dim(), schwarz.subdomains, schwarz.overlap));
  pc.set_coarse_groups(dvd::displacement_groups(g, 2 + g.dim(), 2));
  const dvd::StepSystem sys(current, dt, p, scheme);
  nks::NonlinearProblem prob;
  prob.residual = [&](std::span<const double> x) { return sys.residual(x); };
  prob.jacobian = [&](std::span<const double> x) { return sys.jacobian(x); };
  prob.project_direction = [&](std::span<double> dx) { sys.project_direction(dx); };
  auto x = sys.pack(current);
  FixedStepResult out;
  out.report = nks::newton_solve(prob, x, newton, pc);
  out.state = sys.unpack(x);
  out.factorizations = pc.factorization_count();
  return out;
}

void refresh_energy(RunState& st, const model::ModelParameters& p) {
  st.energy = dvd::discrete_energy(st.current, p);
}

void Integrator::invalidate_preconditioner() {
  if (pc_) pc_->invalidate();
}

StepRecord Integrator::step(RunState& st, double dt_cap) {
  const auto& g = st.current.grid;
  if (!pc_) {
    pc_ = std::make_unique<nks::SchwarzPreconditioner>(
        schwarz_, nks::partition(g, 2 + g.dim(), schwarz_.subdomains, schwarz_.overlap));
    pc_->set_coarse_groups(dvd::displacement_groups(g, 2 + g.dim(), 2));
  }

  double dt = st.has_previous ? predict_dt(change_rate(st.current, st.previous, st.dt_prev), st.zeta, adaptive_)
                              : adaptive_.dt_init;
  if (dt_cap > 0.0 && dt > dt_cap) dt = dt_cap;
  const double floor = adaptive_.dt_min * adaptive_.abort_factor;

  StepRecord rec;
  for (int attempt = 0;; ++attempt) {
    if (dt != pc_dt_) {
      pc_->invalidate();
      pc_dt_ = dt;
    }
    const dvd::StepSystem sys(st.current, dt, params_, scheme_);
    nks::NonlinearProblem prob;
    prob.residual = [&](std::span<const double> x) { return sys.residual(x); };
    prob.jacobian = [&](std::span<const double> x) { return sys.jacobian(x); };
    prob.project_direction = [&](std::span<double> dx) { sys.project_direction(dx); };
    auto x = sys.pack(st.current);

    nks::SolveReport rep;
    const bool forced = inject_ && inject_(st.step, attempt);
    if (forced) {
      rep.reason = "forced divergence";
    } else {
      rep = nks::newton_solve(prob, x, newton_, *pc_);
    }

    if (rep.converged) {
      auto next = sys.unpack(x);
      const auto energy = dvd::discrete_energy(next, params_);
      const double mean = next.mean_c();
      rec.step = st.step + 1;
      rec.t = st.t + dt;
      rec.dt = dt;
      rec.energy = energy;
      rec.mean_c = mean;
      rec.newton_iterations = rep.newton_iterations;
      rec.gmres_average = rep.gmres_average;
      rec.retries = attempt;
      rec.mass_drift = std::abs(mean - st.initial_mass) / std::abs(st.initial_mass);
      rec.energy_change = energy.total() - st.energy.total();

      if (laws_.enforce) {
        if (rec.mass_drift > laws_.mass_rel_tol) {
          std::ostringstream os;
          os << "mass drift " << rec.mass_drift << " exceeds " << laws_.mass_rel_tol << " at step " << rec.step;
          throw LawViolation(os.str());
        }
        if (rec.energy_change > laws_.energy_rel_tol * std::abs(st.energy.total())) {
          std::ostringstream os;
          os << std::setprecision(17) << "energy increased by " << rec.energy_change << " at step " << rec.step
             << " (dt=" << dt << ")";
          throw LawViolation(os.str());
        }
      }
      if (dt < adaptive_.dt_min)
        std::cerr << "[step " << rec.step << "] accepted dt=" << dt << " below dt_min after backoff\n";

      st.previous = std::move(st.current);
      st.current = std::move(next);
      st.has_previous = true;
      st.t = rec.t;
      st.step = rec.step;
      st.dt_prev = dt;
      st.energy = energy;
      ++st.success_streak;
      if (adaptive_.zeta_reset_after > 0 && st.success_streak >= adaptive_.zeta_reset_after)
        st.zeta = adaptive_.zeta;
      return rec;
    }

    st.success_streak = 0;
    const double next_dt = dt * adaptive_.retry_shrink;
    std::cerr << "[step " << st.step + 1 << "] attempt " << attempt << " at dt=" << dt << " failed (" << rep.reason
              << ")\n";
    if (next_dt < floor)
      throw SolverAbort("step " + std::to_string(st.step + 1) + ": dt fell below the floor after " +
                        std::to_string(attempt + 1) + " attempts (" + rep.reason + ")");
    dt = next_dt;
    st.zeta *= adaptive_.zeta_growth;
  }
}

// ---- driver -----------------------------------------------------------------------

std::string csv_header() { return "t,dt,E_total,E1,E2,E3,E4,mean_c,newton_iters,gmres_avg,retries"; }

std::string csv_row(const StepRecord& r) {
  std::ostringstream os;
  os << std::setprecision(17) << r.t << ',' << r.dt << ',' << r.energy.total() << ',' << r.energy.e1 << ','
     << r.energy.e2 << ',' << r.energy.e3 << ',' << r.energy.e4 << ',' << r.mean_c << ',' << r.newton_iterations
     << ',' << r.gmres_average << ',' << r.retries;
  return os.str();
}

namespace {

std::filesystem::path numbered(const std::filesystem::path& dir, const std::string& stem, long step,
                               const std::string& ext) {
  std::ostringstream os;
  os << stem << '_' << std::setw(6) << std::setfill('0') << step << ext;
  return dir / os.str();
}

}  // namespace

RunSummary run(Integrator& integrator, RunState& st, const RunControl& ctl,
               const std::function<void(const RunState&, const StepRecord&)>& on_step) {
  RunSummary sum;
  std::filesystem::create_directories(ctl.output_dir);
  const auto csv_path = ctl.output_dir / "run.csv";
  std::ofstream csv;
  if (ctl.append_csv && std::filesystem::exists(csv_path)) {
    csv.open(csv_path, std::ios::app);
  } else {
    csv.open(csv_path);
    csv << csv_header() << '\n';
    StepRecord r0;
    r0.step = st.step;
    r0.t = st.t;
    r0.energy = st.energy;
    r0.mean_c = st.current.mean_c();
    csv << csv_row(r0) << '\n';
    if (ctl.snapshot_every > 0 || ctl.end_time <= st.t)
      io::write_snapshot(numbered(ctl.output_dir, "snapshot", st.step, ".vtk"), st.current, st.t, st.step);
  }
  if (!csv) throw std::runtime_error("cannot write " + csv_path.string());

  const double eps = 1e-12 * std::max(1.0, ctl.end_time);
  while (st.t < ctl.end_time - eps && (ctl.max_steps < 0 || sum.steps < ctl.max_steps)) {
    StepRecord rec;
    try {
      rec = integrator.step(st, ctl.end_time - st.t);
    } catch (const SolverAbort& e) {
      sum.aborted = true;
      sum.message = e.what();
    } catch (const LawViolation& e) {
      sum.aborted = true;
      sum.message = e.what();
    }
    if (sum.aborted) {
      const auto diag = ctl.output_dir / "diagnostic.ckpt";
      write_checkpoint(diag, st);
      sum.diagnostic_checkpoint = diag;
      break;
    }
    ++sum.steps;
    csv << csv_row(rec) << '\n';
    csv.flush();
    if (ctl.snapshot_every > 0 && st.step % ctl.snapshot_every == 0)
      io::write_snapshot(numbered(ctl.output_dir, "snapshot", st.step, ".vtk"), st.current, st.t, st.step);
    if (ctl.checkpoint_every > 0 && st.step % ctl.checkpoint_every == 0) {
      write_checkpoint(numbered(ctl.output_dir, "checkpoint", st.step, ".ckpt"), st);
      // A resumed run starts without cached factors; match that here.
      integrator.invalidate_preconditioner();
    }
    if (on_step) on_step(st, rec);
  }
  sum.t = st.t;
  return sum;
}

}  // namespace nipf::integrate
