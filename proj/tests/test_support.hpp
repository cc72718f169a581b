#pragma once

#include <cstdint>
#include <random>

#include "nipf/dvd.hpp"
#include "nipf/model.hpp"

namespace nipf::testing {

/// Admissible random state around a mixed gamma/gamma' composition.
inline dvd::DiscreteState random_state(const fd::StructuredGrid& g, std::uint32_t seed, double u_amp = 0.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uc(0.12, 0.23), ue(0.05, 0.95), uu(-1.0, 1.0);
  dvd::DiscreteState s(g);
  for (std::size_t k = 0; k < g.cells(); ++k) {
    s.c[k] = uc(rng);
    s.eta[k] = ue(rng);
    for (auto& comp : s.u.comp) comp[k] = u_amp * uu(rng);
  }
  s.cbar0 = 0.17;
  return s;
}

/// Second state close to `a`, as produced by one time step.
inline dvd::DiscreteState perturbed(const dvd::DiscreteState& a, std::uint32_t seed, double amp) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto b = a;
  for (std::size_t k = 0; k < a.c.size(); ++k) {
    b.c[k] += amp * u(rng);
    b.eta[k] += 5.0 * amp * u(rng);
    for (auto& comp : b.u.comp) comp[k] += amp * u(rng);
  }
  return b;
}

/// Model default with an optional multiplier on the elastic stiffness.
inline model::ModelParameters test_params(double elastic_scale = 1.0) {
  auto p = model::ModelParameters::model_default();
  p.elastic_scale = elastic_scale;
  return p;
}

}  // namespace nipf::testing
