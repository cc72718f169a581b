// Command-line driver: run, analyze, bench-solver.

#include <glob.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nipf/analysis.hpp"
#include "nipf/io.hpp"
#include "nipf/scenario.hpp"

using namespace nipf;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kSolverAbort = 2;

struct RunArgs {
  std::string config;
  std::string output;
  std::string resume;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

int cmd_run(const RunArgs& a) {
  scenario::ScenarioConfig cfg;
  try {
    cfg = scenario::load_config(a.config);
    if (!a.output.empty()) cfg.output.dir = a.output;
    if (a.seed) cfg.seed = *a.seed;
    if (a.workers) cfg.schwarz.workers = *a.workers;
    cfg.validate();
  } catch (const scenario::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  integrate::Integrator in(cfg.model, cfg.scheme, cfg.newton, cfg.schwarz, cfg.adaptive, cfg.laws);
  integrate::RunState st;
  const bool resuming = !a.resume.empty();
  try {
    if (resuming) {
      st = integrate::read_checkpoint(a.resume);
      integrate::refresh_energy(st, cfg.model);
    } else {
      st = in.initialize(scenario::make_initial_state(cfg));
    }
  } catch (const integrate::SolverAbort& e) {
    std::cerr << "solver abort during initialisation: " << e.what() << '\n';
    return kSolverAbort;
  } catch (const std::exception& e) {
    std::cerr << "cannot set up the initial state: " << e.what() << '\n';
    return kConfigError;
  }

  std::filesystem::create_directories(cfg.output.dir);
  scenario::save_config(cfg, cfg.output.dir / "config.ini");

  integrate::RunControl ctl;
  ctl.end_time = cfg.output.end_time;
  ctl.max_steps = cfg.output.max_steps;
  ctl.snapshot_every = cfg.output.snapshot_every;
  ctl.checkpoint_every = cfg.output.checkpoint_every;
  ctl.output_dir = cfg.output.dir;
  ctl.append_csv = resuming;

  const auto t0 = std::chrono::steady_clock::now();
  const auto sum = integrate::run(in, st, ctl, [](const integrate::RunState& s, const integrate::StepRecord& r) {
    if (s.step % 10 == 0)
      std::fprintf(stderr, "step %ld t=%.6g dt=%.4g E=%.10g newton=%d gmres/newton=%.1f\n", s.step, s.t, r.dt,
                   r.energy.total(), r.newton_iterations, r.gmres_average);
  });
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  // Always leave a restart point at the end.
  integrate::write_checkpoint(cfg.output.dir / "final.ckpt", st);
  std::fprintf(stderr, "%ld steps to t=%.6g in %.1f s\n", sum.steps, sum.t, secs);
  if (sum.aborted) {
    std::cerr << "solver abort: " << sum.message << "; state saved to " << sum.diagnostic_checkpoint->string() << '\n';
    return kSolverAbort;
  }
  return kOk;
}

std::vector<std::string> expand_glob(const std::string& pattern) {
  glob_t g{};
  std::vector<std::string> out;
  if (::glob(pattern.c_str(), 0, nullptr, &g) == 0)
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  globfree(&g);
  return out;  // glob sorts by name
}

int cmd_analyze(const std::string& pattern, double threshold) {
  const auto files = expand_glob(pattern);
  if (files.empty()) {
    std::cerr << "no snapshots match '" << pattern << "'\n";
    return kConfigError;
  }
  if (!(threshold > 0.0 && threshold < 0.25)) {
    std::cerr << "threshold must lie in (0, 0.25)\n";
    return kConfigError;
  }
  std::vector<double> times, radii;
  std::printf("file,step,t,particles,mean_radius,anisotropy\n");
  for (const auto& f : files) {
    io::Snapshot snap;
    try {
      snap = io::read_snapshot(f);
    } catch (const std::exception& e) {
      std::cerr << f << ": " << e.what() << '\n';
      return kConfigError;
    }
    const auto st = analysis::label_particles(snap.state.c, threshold);
    double aniso = std::nan("");
    if (st.count > 0 && snap.state.grid.dim() >= 2) aniso = analysis::anisotropy_measure(snap.state.c, threshold);
    std::printf("%s,%ld,%.17g,%zu,%.10g,%.10g\n", f.c_str(), snap.step, snap.t, st.count, st.mean_radius, aniso);
    if (st.count > 0) {
      times.push_back(snap.t);
      radii.push_back(st.mean_radius);
    }
  }
  if (times.size() >= 3) {
    try {
      const auto fit = analysis::fit_coarsening(times, radii, times.front(), times.back());
      std::printf("# <R>^3 fit over t in [%g, %g]: K=%.6g R0^3=%.6g r^2=%.6f points=%zu\n", times.front(),
                  times.back(), fit.K, fit.R0_cubed, fit.r_squared, fit.points);
    } catch (const std::exception& e) {
      std::printf("# no fit: %s\n", e.what());
    }
  }
  return kOk;
}

int cmd_bench(const std::string& config) {
  scenario::ScenarioConfig cfg;
  try {
    cfg = scenario::load_config(config);
  } catch (const scenario::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  integrate::Integrator in(cfg.model, cfg.scheme, cfg.newton, cfg.schwarz, cfg.adaptive, cfg.laws);
  dvd::DiscreteState start;
  try {
    start = in.initialize(scenario::make_initial_state(cfg)).current;
  } catch (const integrate::SolverAbort& e) {
    std::cerr << "solver abort during initialisation: " << e.what() << '\n';
    return kSolverAbort;
  }

  struct Solver {
    const char* name;
    int fill;
    bool lu;
  };
  const Solver solvers[] = {{"ILU(0)", 0, false}, {"ILU(1)", 1, false}, {"ILU(2)", 2, false}, {"LU", 0, true}};
  std::printf("kind,overlap,subdomain_solver,subdomains,steps,newton_total,gmres_per_newton,seconds,converged\n");
  bool all_ok = true;
  for (auto kind : {nks::SchwarzKind::ClassicalAS, nks::SchwarzKind::LeftRAS, nks::SchwarzKind::RightRAS}) {
    for (int overlap : {0, 1, 2}) {
      for (const auto& s : solvers) {
        auto sc = cfg.schwarz;
        sc.kind = kind;
        sc.overlap = overlap;
        sc.fill_level = s.fill;
        sc.use_lu = s.lu;
        auto cur = start;
        int newton = 0, gmres = 0, steps = 0;
        bool ok = true;
        const auto t0 = std::chrono::steady_clock::now();
        for (; steps < cfg.bench.steps; ++steps) {
          const auto r = integrate::solve_fixed_step(cur, cfg.bench.dt, cfg.model, cfg.scheme, cfg.newton, sc);
          newton += r.report.newton_iterations;
          gmres += r.report.gmres_iterations;
          if (!r.report.converged) {
            ok = false;
            break;
          }
          cur = r.state;
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        all_ok = all_ok && ok;
        std::printf("%s,%d,%s,%d,%d,%d,%.2f,%.3f,%d\n", nks::to_string(kind).c_str(), overlap, s.name, sc.subdomains,
                    steps, newton, newton > 0 ? static_cast<double>(gmres) / newton : 0.0, secs, ok ? 1 : 0);
        std::fflush(stdout);
      }
    }
  }
  return all_ok ? kOk : kSolverAbort;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ni-Al phase-field simulator"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "integrate a scenario");
  run->add_option("--config", ra.config, "INI scenario file")->required();
  run->add_option("--output", ra.output, "output directory (overrides the config)");
  run->add_option("--resume", ra.resume, "checkpoint to continue from");
  run->add_option("--seed", ra.seed, "random seed for noisy initial states");
  run->add_option("--workers", ra.workers, "threads for the subdomain solves")->check(CLI::PositiveNumber);

  std::string pattern;
  double threshold = 0.22;
  auto* analyze = app.add_subcommand("analyze", "particle statistics of VTK snapshots");
  analyze->add_option("--snapshots", pattern, "glob of snapshot files")->required();
  analyze->add_option("--threshold", threshold, "composition contour defining particles");

  std::string bench_config;
  auto* bench = app.add_subcommand("bench-solver", "sweep preconditioner settings on fixed steps");
  bench->add_option("--config", bench_config, "INI scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(ra);
    if (*analyze) return cmd_analyze(pattern, threshold);
    if (*bench) return cmd_bench(bench_config);
  } catch (const integrate::SolverAbort& e) {
    std::cerr << "solver abort: " << e.what() << '\n';
    return kSolverAbort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
