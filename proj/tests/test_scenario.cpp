#include <gtest/gtest.h>

#include <fstream>

#include "nipf/scenario.hpp"

using namespace nipf;
using namespace nipf::scenario;

namespace {

std::filesystem::path write_ini(const std::string& name, const std::string& text) {
  const auto dir = std::filesystem::temp_directory_path() / "nipf_test_ini";
  std::filesystem::create_directories(dir);
  const auto p = dir / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Presets, SingleParticleRadiusRule) {
  EXPECT_DOUBLE_EQ(preset_single_particle(1.0, {80, 80}).init.radius, 7.5);   // box 20
  EXPECT_DOUBLE_EQ(preset_single_particle(1.0, {96, 64}).init.radius, 6.0);   // shortest side 16
  EXPECT_DOUBLE_EQ(preset_single_particle(1.0).init.radius, 6.0);
}

TEST(Presets, RadiusScalesInSmallBoxes) {
  const auto c = preset_single_particle(1.0, {32, 32});
  EXPECT_DOUBLE_EQ(c.init.radius, 0.375 * 8.0);
  const auto big = preset_single_particle(1.0, {128, 128});
  EXPECT_DOUBLE_EQ(big.init.radius, 7.5);
}

TEST(Presets, MatrixCompositionRule) {
  EXPECT_DOUBLE_EQ(matrix_composition(0.0), 0.147);
  EXPECT_NEAR(matrix_composition(0.25), 0.16875, 1e-15);
  EXPECT_DOUBLE_EQ(preset_coarsening(0.2).init.c_matrix, matrix_composition(0.2));
  EXPECT_DOUBLE_EQ(preset_coarsening(0.2).init.radius, 1.5);
  EXPECT_DOUBLE_EQ(preset_coarsening(0.2).init.c_particle, 0.234);
  const auto n = preset_nucleation(0.2, 7);
  EXPECT_DOUBLE_EQ(n.init.c_mean, matrix_composition(0.2));
  EXPECT_EQ(n.grid.dims, (std::vector<int>{128, 128, 8}));
  EXPECT_EQ(n.seed, 7u);
}

TEST(Presets, AllValidate) {
  EXPECT_NO_THROW(preset_single_particle(0.0).validate());
  EXPECT_NO_THROW(preset_single_particle(5.0).validate());
  EXPECT_NO_THROW(preset_coarsening(0.3).validate());
  EXPECT_NO_THROW(preset_nucleation(0.3, 1).validate());
}

TEST(Perturbation, DeterministicBoundedAndDecorrelated) {
  double sum = 0.0;
  for (std::uint64_t k = 0; k < 10000; ++k) {
    const double v = perturbation(42, k, 0, 0.05);
    EXPECT_EQ(v, perturbation(42, k, 0, 0.05));
    EXPECT_LE(std::abs(v), 0.05);
    sum += v;
  }
  EXPECT_NEAR(sum / 10000.0, 0.0, 0.002);
  EXPECT_NE(perturbation(42, 3, 0, 1.0), perturbation(42, 3, 1, 1.0));
  EXPECT_NE(perturbation(42, 3, 0, 1.0), perturbation(43, 3, 0, 1.0));
  // Reference values from an independent splitmix64 evaluation.
  EXPECT_DOUBLE_EQ(perturbation(0, 0, 0, 1.0), 0.7666216164272852);
  EXPECT_DOUBLE_EQ(perturbation(7, 5, 1, 1.0), 0.9197481531461831);
}

TEST(InitialState, ParticleInMatrix) {
  const auto cfg = preset_coarsening(0.2, {32, 32});
  const auto s = make_initial_state(cfg);
  const auto& g = s.grid;
  EXPECT_DOUBLE_EQ(s.c[g.index(16, 16)], 0.234);
  EXPECT_DOUBLE_EQ(s.c[g.index(0, 0)], matrix_composition(0.2));
  EXPECT_DOUBLE_EQ(s.cbar0, s.mean_c());
  EXPECT_NO_THROW(dvd::check_admissible(s));
}

TEST(InitialState, NucleationNoiseIsReproducible) {
  auto cfg = preset_nucleation(0.175, 3, {16, 16});
  const auto a = make_initial_state(cfg), b = make_initial_state(cfg);
  EXPECT_EQ(a.c.values, b.c.values);
  for (std::size_t k = 0; k < a.c.size(); ++k) {
    EXPECT_LE(std::abs(a.c[k] - cfg.init.c_mean), cfg.init.amplitude);
    EXPECT_LE(std::abs(a.eta[k] - 0.1), 0.05);
  }
  cfg.seed = 4;
  EXPECT_NE(make_initial_state(cfg).c.values, a.c.values);
}

TEST(Config, RoundTrip) {
  auto cfg = preset_coarsening(0.25, {40, 24});
  cfg.grid.bc = fd::Boundary::Neumann;
  cfg.scheme.S = 6;
  cfg.scheme.quotient_mode = dvd::QuotientMode::Exact;
  cfg.schwarz.kind = nks::SchwarzKind::RightRAS;
  cfg.schwarz.use_lu = true;
  cfg.schwarz.reuse = true;
  cfg.schwarz.subdomains = 4;
  cfg.adaptive.zeta = 333.3;
  cfg.output.max_steps = 12;
  cfg.seed = 123456789012345ULL;
  const auto path = write_ini("roundtrip.ini", "");
  save_config(cfg, path);
  const auto back = load_config(path);
  EXPECT_EQ(back.kind, cfg.kind);
  EXPECT_EQ(back.grid.dims, cfg.grid.dims);
  EXPECT_EQ(back.grid.bc, cfg.grid.bc);
  EXPECT_EQ(back.scheme.S, 6);
  EXPECT_EQ(back.scheme.quotient_mode, dvd::QuotientMode::Exact);
  EXPECT_EQ(back.schwarz.kind, nks::SchwarzKind::RightRAS);
  EXPECT_TRUE(back.schwarz.use_lu);
  EXPECT_TRUE(back.schwarz.reuse);
  EXPECT_EQ(back.schwarz.subdomains, 4);
  EXPECT_EQ(back.adaptive.zeta, 333.3);
  EXPECT_EQ(back.output.max_steps, 12);
  EXPECT_EQ(back.seed, cfg.seed);
  EXPECT_EQ(back.init.c_matrix, cfg.init.c_matrix);
  EXPECT_EQ(back.model.poly.m2c, cfg.model.poly.m2c);
  EXPECT_EQ(back.model.theta, cfg.model.theta);
  EXPECT_EQ(back.model.elastic.c44, cfg.model.elastic.c44);
}

TEST(Config, PresetDefaultsApplyForOmittedKeys) {
  const auto cfg = load_config(write_ini("short.ini", "[scenario]\nkind = single_particle\n[grid]\ndims = 32 32\n"));
  EXPECT_EQ(cfg.kind, Kind::SingleParticleShape);
  EXPECT_DOUBLE_EQ(cfg.init.radius, 3.0);
  EXPECT_DOUBLE_EQ(cfg.model.theta, model::ModelParameters::model_default().theta);
}

TEST(Config, CalphadSectionRebuildsCoefficients) {
  const auto def = model::ModelParameters::model_default();
  const auto cfg = load_config(write_ini("cal.ini", "[calphad]\nu4 = 4000\n"));
  EXPECT_NE(cfg.model.poly.m2b, def.poly.m2b);
  EXPECT_DOUBLE_EQ(cfg.model.poly.m1a, def.poly.m1a);
  EXPECT_TRUE(cfg.model.poly.integrable());
}

TEST(Config, UnknownKeysAndSectionsAreErrors) {
  EXPECT_THROW(load_config(write_ini("k.ini", "[grid]\nspacing = 0.5\n")), ConfigError);
  EXPECT_THROW(load_config(write_ini("s.ini", "[solver]\nx = 1\n")), ConfigError);
}

TEST(Config, BadValuesAreErrors) {
  EXPECT_THROW(load_config(write_ini("v1.ini", "[grid]\nh = fast\n")), ConfigError);
  EXPECT_THROW(load_config(write_ini("v2.ini", "[grid]\nboundary = open\n")), ConfigError);
  EXPECT_THROW(load_config(write_ini("v3.ini", "[schwarz]\nkind = jacobi\n")), ConfigError);
  EXPECT_THROW(load_config(write_ini("v4.ini", "[adaptive]\ndt_min = 5\n")), ConfigError);
  EXPECT_THROW(load_config(write_ini("v5.ini", "[model]\ngamma_c = -1\n")), ConfigError);
  EXPECT_THROW(load_config(write_ini("v6.ini", "[grid]\ndims = 2 2\n")), ConfigError);
  EXPECT_THROW(load_config(write_ini("v7.ini", "[scenario]\nkind = movie\n")), ConfigError);
  EXPECT_THROW(load_config(write_ini("v8.ini", "[schwarz]\nreuse = maybe\n")), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/x.ini"), ConfigError);
}
