#include <benchmark/benchmark.h>

#include <map>
#include <vector>

#include "nipf/scenario.hpp"

using namespace nipf;

namespace {

// Equilibrated single-particle state on an n x n grid, built once per size.
const dvd::DiscreteState& particle_state(int n) {
  static std::map<int, dvd::DiscreteState> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    const auto cfg = scenario::preset_single_particle(1.0, {n, n});
    integrate::Integrator in(cfg.model, cfg.scheme, cfg.newton, cfg.schwarz, cfg.adaptive, cfg.laws);
    it = cache.emplace(n, in.initialize(scenario::make_initial_state(cfg)).current).first;
  }
  return it->second;
}

const model::ModelParameters& params() {
  static const auto p = model::ModelParameters::model_default();
  return p;
}

void BM_Residual(benchmark::State& state) {
  const auto& s = particle_state(static_cast<int>(state.range(0)));
  const dvd::StepSystem sys(s, 0.1, params(), {});
  const auto x = sys.pack(s);
  for (auto _ : state) benchmark::DoNotOptimize(sys.residual(x));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(s.grid.cells()));
}
BENCHMARK(BM_Residual)->Arg(32)->Arg(64);

void BM_Jacobian(benchmark::State& state) {
  const auto& s = particle_state(static_cast<int>(state.range(0)));
  const dvd::StepSystem sys(s, 0.1, params(), {});
  const auto x = sys.pack(s);
  for (auto _ : state) benchmark::DoNotOptimize(sys.jacobian(x));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(s.grid.cells()));
}
BENCHMARK(BM_Jacobian)->Arg(32)->Arg(64);

void BM_IluFactor(benchmark::State& state) {
  const auto& s = particle_state(32);
  const dvd::StepSystem sys(s, 0.1, params(), {});
  const auto J = sys.jacobian(sys.pack(s));
  const int level = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nks::IluFactorization(J, level));
}
BENCHMARK(BM_IluFactor)->Arg(0)->Arg(1)->Arg(2);

void BM_SchwarzApply(benchmark::State& state) {
  const auto& s = particle_state(64);
  const dvd::StepSystem sys(s, 0.1, params(), {});
  const auto J = sys.jacobian(sys.pack(s));
  nks::SchwarzConfig sc;
  sc.subdomains = static_cast<int>(state.range(0));
  nks::SchwarzPreconditioner pc(sc, nks::partition(s.grid, sys.fields_per_cell(), sc.subdomains, sc.overlap));
  pc.set_coarse_groups(dvd::displacement_groups(s.grid, sys.fields_per_cell(), 2));
  pc.setup(J);
  std::vector<double> r(sys.size(), 1.0), z(sys.size());
  for (auto _ : state) {
    pc.apply(r, z);
    benchmark::DoNotOptimize(z.data());
  }
}
BENCHMARK(BM_SchwarzApply)->Arg(1)->Arg(4)->Arg(8);

void BM_FixedStep(benchmark::State& state) {
  const auto& s = particle_state(32);
  nks::SchwarzConfig sc;
  sc.fill_level = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate::solve_fixed_step(s, 0.01, params(), {}, {}, sc).report.newton_iterations);
}
BENCHMARK(BM_FixedStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
