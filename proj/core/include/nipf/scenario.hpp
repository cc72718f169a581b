#pragma once

// Scenario configuration: INI loading, presets and initial conditions.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "nipf/dvd.hpp"
#include "nipf/integrator.hpp"
#include "nipf/model.hpp"
#include "nipf/nks.hpp"

namespace nipf::scenario {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class Kind { SingleParticleShape, SingleParticleCoarsening, Nucleation, SolverBench, Custom };

std::string to_string(Kind k);
Kind kind_from_string(const std::string& s);

struct GridSpec {
  std::vector<int> dims{64, 64};
  double h = 0.25;
  fd::Boundary bc = fd::Boundary::Periodic;
  fd::StructuredGrid make() const;
};

/// Particle-in-matrix (shape, coarsening, custom) or noisy uniform state
/// (nucleation).
struct InitialCondition {
  double radius = 7.5;
  double c_particle = 0.238;
  double eta_particle = 0.01;
  double c_matrix = 0.1375;
  double eta_matrix = 0.99;
  double c_mean = 0.1622;
  double eta_mean = 0.1;
  double amplitude = 0.05;
};

struct OutputConfig {
  std::filesystem::path dir = "out";
  double end_time = 100.0;
  long max_steps = -1;
  long snapshot_every = 0;
  long checkpoint_every = 0;
};

/// Solver benchmark: a fixed number of steps at a fixed dt per configuration.
struct BenchConfig {
  int steps = 3;
  double dt = 0.01;
};

struct ScenarioConfig {
  Kind kind = Kind::Custom;
  GridSpec grid;
  model::ModelParameters model = model::ModelParameters::model_default();
  dvd::SchemeConfig scheme;
  nks::NewtonConfig newton;
  nks::SchwarzConfig schwarz;
  integrate::AdaptiveConfig adaptive;
  integrate::LawPolicy laws;
  std::uint64_t seed = 1;
  InitialCondition init;
  OutputConfig output;
  BenchConfig bench;

  /// Throws ConfigError on the first invalid setting.
  void validate() const;
};

/// Matrix composition 0.147 + 0.087 V_f used by the coarsening and
/// nucleation presets.
double matrix_composition(double volume_fraction);

/// Radius 7.5 when the box is at least 20 units wide, else 0.375 of the
/// shortest box length so the particle stays isolated in small boxes.
ScenarioConfig preset_single_particle(double elastic_scale, std::vector<int> dims = {64, 64});
ScenarioConfig preset_coarsening(double volume_fraction, std::vector<int> dims = {64, 64});
ScenarioConfig preset_nucleation(double volume_fraction, std::uint64_t seed, std::vector<int> dims = {128, 128, 8});

/// Uniform value in [-amplitude, amplitude] for (seed, cell, channel), from a
/// counter-based hash: no state, identical on any platform.
double perturbation(std::uint64_t seed, std::uint64_t cell, int channel, double amplitude);

/// Cells whose centers lie within `radius` of the box center.
bool inside_particle(const fd::StructuredGrid& g, std::size_t cell, double radius);

dvd::DiscreteState make_initial_state(const ScenarioConfig& cfg);

ScenarioConfig load_config(const std::filesystem::path& path);
/// Writes every setting back as INI; load_config(save_config(x)) == x.
void save_config(const ScenarioConfig& cfg, const std::filesystem::path& path);

}  // namespace nipf::scenario
