#include "nipf/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace nipf::scenario {

std::string to_string(Kind k) {
  switch (k) {
    case Kind::SingleParticleShape: return "single_particle";
    case Kind::SingleParticleCoarsening: return "coarsening";
    case Kind::Nucleation: return "nucleation";
    case Kind::SolverBench: return "solver_bench";
    case Kind::Custom: return "custom";
  }
  return "custom";
}

Kind kind_from_string(const std::string& s) {
  for (Kind k : {Kind::SingleParticleShape, Kind::SingleParticleCoarsening, Kind::Nucleation, Kind::SolverBench,
                 Kind::Custom})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown scenario kind '" + s + "'");
}

fd::StructuredGrid GridSpec::make() const {
  return fd::StructuredGrid(dims, std::vector<double>(dims.size(), h), bc);
}

void ScenarioConfig::validate() const {
  try {
    if (grid.dims.empty() || grid.dims.size() > 3) throw ConfigError("grid.dims needs 1 to 3 entries");
    const auto g = grid.make();
    model.validate();
    adaptive.validate();
    if (scheme.S < 1) throw ConfigError("scheme.S must be >= 1");
    if (schwarz.overlap < 0) throw ConfigError("schwarz.overlap must be >= 0");
    if (schwarz.fill_level < 0) throw ConfigError("schwarz.fill_level must be >= 0");
    if (schwarz.subdomains < 1) throw ConfigError("schwarz.subdomains must be >= 1");
    if (schwarz.workers < 1) throw ConfigError("schwarz.workers must be >= 1");
    nks::partition(g, 1, schwarz.subdomains, schwarz.overlap);
    if (!(newton.eps_abs > 0.0 && newton.eps_rel > 0.0)) throw ConfigError("newton tolerances must be positive");
    if (newton.max_iterations < 1) throw ConfigError("newton.max_iterations must be >= 1");
    if (output.end_time < 0.0) throw ConfigError("output.end_time must be >= 0");
    if (bench.steps < 1 || !(bench.dt > 0.0)) throw ConfigError("bench needs steps >= 1 and dt > 0");
    if (kind == Kind::Nucleation) {
      const double lo = init.c_mean - init.amplitude, hi = init.c_mean + init.amplitude;
      if (!(lo > 0.0 && hi < 0.25)) throw ConfigError("initial c range leaves (0, 0.25)");
      if (!(init.eta_mean - init.amplitude > 0.0 && init.eta_mean + init.amplitude < 1.0))
        throw ConfigError("initial eta range leaves (0, 1)");
    } else if (!(init.radius > 0.0)) {
      throw ConfigError("initial.radius must be positive");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

double matrix_composition(double vf) { return 0.147 + 0.087 * vf; }

namespace {

double box_min_length(const std::vector<int>& dims, double h) {
  return *std::min_element(dims.begin(), dims.end()) * h;
}

}  // namespace

ScenarioConfig preset_single_particle(double elastic_scale, std::vector<int> dims) {
  ScenarioConfig c;
  c.kind = Kind::SingleParticleShape;
  c.grid.dims = std::move(dims);
  c.grid.h = 0.25;
  c.model.elastic_scale = elastic_scale;
  const double L = box_min_length(c.grid.dims, c.grid.h);
  c.init.radius = L >= 20.0 ? 7.5 : 0.375 * L;
  c.init.c_particle = 0.238;
  c.init.eta_particle = 0.01;
  c.init.c_matrix = 0.1375;
  c.init.eta_matrix = 0.99;
  c.output.end_time = 200.0;
  return c;
}

ScenarioConfig preset_coarsening(double vf, std::vector<int> dims) {
  ScenarioConfig c;
  c.kind = Kind::SingleParticleCoarsening;
  c.grid.dims = std::move(dims);
  c.grid.h = 0.25;
  c.init.radius = 1.5;
  c.init.c_particle = 0.234;
  c.init.eta_particle = 0.01;
  c.init.c_matrix = matrix_composition(vf);
  c.init.eta_matrix = 0.99;
  c.output.end_time = 200.0;
  return c;
}

ScenarioConfig preset_nucleation(double vf, std::uint64_t seed, std::vector<int> dims) {
  ScenarioConfig c;
  c.kind = Kind::Nucleation;
  c.grid.dims = std::move(dims);
  c.grid.h = 0.25;
  c.seed = seed;
  c.init.c_mean = matrix_composition(vf);
  c.init.eta_mean = 0.1;
  c.init.amplitude = 0.05;
  c.output.end_time = 200.0;
  return c;
}

double perturbation(std::uint64_t seed, std::uint64_t cell, int channel, double amplitude) {
  // splitmix64 finalizer over a counter derived from (seed, cell, channel).
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (2 * cell + static_cast<std::uint64_t>(channel) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  const double u = static_cast<double>(z >> 11) * 0x1.0p-53;
  return amplitude * (2.0 * u - 1.0);
}

bool inside_particle(const fd::StructuredGrid& g, std::size_t cell, double radius) {
  double r2 = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    const double x = g.center(a, g.coord(cell, a)) - 0.5 * g.length(a);
    r2 += x * x;
  }
  return r2 <= radius * radius;
}

dvd::DiscreteState make_initial_state(const ScenarioConfig& cfg) {
  const auto g = cfg.grid.make();
  dvd::DiscreteState s(g);
  const auto& in = cfg.init;
  for (std::size_t k = 0; k < g.cells(); ++k) {
    if (cfg.kind == Kind::Nucleation) {
      s.c[k] = in.c_mean + perturbation(cfg.seed, k, 0, in.amplitude);
      s.eta[k] = in.eta_mean + perturbation(cfg.seed, k, 1, in.amplitude);
    } else if (inside_particle(g, k, in.radius)) {
      s.c[k] = in.c_particle;
      s.eta[k] = in.eta_particle;
    } else {
      s.c[k] = in.c_matrix;
      s.eta[k] = in.eta_matrix;
    }
  }
  s.cbar0 = s.mean_c();
  return s;
}

// ---- INI binding table ------------------------------------------------------------

namespace {

struct Binding {
  std::string section;
  std::string key;
  std::function<void(const std::string&)> set;
  std::function<std::string()> get;
};

std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": '" + s + "' is not a number");
  }
}

long parse_long(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": '" + s + "' is not an integer");
  }
}

bool parse_bool(const std::string& s, const std::string& what) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(what + ": '" + s + "' is not a boolean");
}

class Table {
 public:
  void real(const std::string& sec, const std::string& key, double& ref) {
    const auto name = sec + "." + key;
    b_.push_back({sec, key, [&ref, name](const std::string& s) { ref = parse_double(s, name); },
                  [&ref] { return fmt_double(ref); }});
  }
  template <class Int>
  void integer(const std::string& sec, const std::string& key, Int& ref) {
    const auto name = sec + "." + key;
    b_.push_back({sec, key, [&ref, name](const std::string& s) { ref = static_cast<Int>(parse_long(s, name)); },
                  [&ref] { return std::to_string(ref); }});
  }
  void boolean(const std::string& sec, const std::string& key, bool& ref) {
    const auto name = sec + "." + key;
    b_.push_back({sec, key, [&ref, name](const std::string& s) { ref = parse_bool(s, name); },
                  [&ref] { return std::string(ref ? "true" : "false"); }});
  }
  void custom(const std::string& sec, const std::string& key, std::function<void(const std::string&)> set,
              std::function<std::string()> get) {
    b_.push_back({sec, key, std::move(set), std::move(get)});
  }
  const std::vector<Binding>& bindings() const { return b_; }

 private:
  std::vector<Binding> b_;
};

// CALPHAD inputs live outside ModelParameters until the [calphad] section is
// applied, so they are bound to a scratch copy.
Table make_table(ScenarioConfig& c, model::CalphadInputs& cal, bool& has_calphad) {
  Table t;
  t.custom("scenario", "kind", [&c](const std::string& s) { c.kind = kind_from_string(s); },
           [&c] { return to_string(c.kind); });
  t.custom(
      "scenario", "seed",
      [&c](const std::string& s) {
        try {
          c.seed = std::stoull(s);
        } catch (const std::exception&) {
          throw ConfigError("scenario.seed: '" + s + "' is not an unsigned integer");
        }
      },
      [&c] { return std::to_string(c.seed); });

  t.custom(
      "grid", "dims",
      [&c](const std::string& s) {
        std::istringstream is(s);
        std::vector<int> d;
        std::string tok;
        while (is >> tok) d.push_back(static_cast<int>(parse_long(tok, "grid.dims")));
        c.grid.dims = d;
      },
      [&c] {
        std::string out;
        for (std::size_t i = 0; i < c.grid.dims.size(); ++i) out += (i ? " " : "") + std::to_string(c.grid.dims[i]);
        return out;
      });
  t.real("grid", "h", c.grid.h);
  t.custom(
      "grid", "boundary",
      [&c](const std::string& s) {
        if (s == "periodic") c.grid.bc = fd::Boundary::Periodic;
        else if (s == "neumann") c.grid.bc = fd::Boundary::Neumann;
        else throw ConfigError("grid.boundary must be periodic or neumann");
      },
      [&c] { return std::string(c.grid.bc == fd::Boundary::Periodic ? "periodic" : "neumann"); });

  auto& in = c.init;
  t.real("initial", "radius", in.radius);
  t.real("initial", "c_particle", in.c_particle);
  t.real("initial", "eta_particle", in.eta_particle);
  t.real("initial", "c_matrix", in.c_matrix);
  t.real("initial", "eta_matrix", in.eta_matrix);
  t.real("initial", "c_mean", in.c_mean);
  t.real("initial", "eta_mean", in.eta_mean);
  t.real("initial", "amplitude", in.amplitude);

  auto& m = c.model;
  t.real("model", "theta", m.theta);
  t.real("model", "gamma_c", m.gamma_c);
  t.real("model", "gamma_eta", m.gamma_eta);
  t.real("model", "kappa", m.kappa);
  t.real("model", "eps0", m.eps0);
  t.real("model", "c11", m.elastic.c11);
  t.real("model", "c12", m.elastic.c12);
  t.real("model", "c44", m.elastic.c44);
  t.real("model", "elastic_scale", m.elastic_scale);
  t.real("model", "m0", m.poly.m0);
  t.real("model", "m1a", m.poly.m1a);
  t.real("model", "m1b", m.poly.m1b);
  t.real("model", "m2a", m.poly.m2a);
  t.real("model", "m2b", m.poly.m2b);
  t.real("model", "m2c", m.poly.m2c);
  t.real("model", "m3", m.poly.m3);
  t.real("model", "m4", m.poly.m4);
  t.real("model", "m5a", m.poly.m5a);
  t.real("model", "m5b", m.poly.m5b);
  t.real("model", "m6", m.poly.m6);

  auto cal_real = [&](const std::string& key, double& ref) {
    t.custom(
        "calphad", key,
        [&ref, &has_calphad, key](const std::string& s) {
          ref = parse_double(s, "calphad." + key);
          has_calphad = true;
        },
        [&ref] { return fmt_double(ref); });
  };
  cal_real("e0_al", cal.e0_al);
  cal_real("e0_ni", cal.e0_ni);
  cal_real("l0", cal.l0);
  cal_real("l1", cal.l1);
  cal_real("l2", cal.l2);
  cal_real("l3", cal.l3);
  cal_real("u1", cal.u1);
  cal_real("u4", cal.u4);
  cal_real("gas_R", cal.gas_R);
  cal_real("temperature", cal.temp_T);
  cal_real("vm", cal.vm);
  cal_real("deltaE", cal.deltaE);

  t.integer("scheme", "S", c.scheme.S);
  t.custom(
      "scheme", "quotient",
      [&c](const std::string& s) {
        if (s == "taylor") c.scheme.quotient_mode = dvd::QuotientMode::TaylorS;
        else if (s == "exact") c.scheme.quotient_mode = dvd::QuotientMode::Exact;
        else throw ConfigError("scheme.quotient must be taylor or exact");
      },
      [&c] { return std::string(c.scheme.quotient_mode == dvd::QuotientMode::TaylorS ? "taylor" : "exact"); });
  t.real("scheme", "q_guard", c.scheme.q_guard);

  auto& n = c.newton;
  t.real("newton", "eps_rel", n.eps_rel);
  t.real("newton", "eps_abs", n.eps_abs);
  t.real("newton", "xi_rel", n.xi_rel);
  t.real("newton", "xi_abs", n.xi_abs);
  t.integer("newton", "max_iterations", n.max_iterations);
  t.real("newton", "ls_initial", n.ls_initial);
  t.real("newton", "ls_contraction", n.ls_contraction);
  t.real("newton", "ls_sufficient_decrease", n.ls_sufficient_decrease);
  t.real("newton", "ls_min", n.ls_min);

  auto& w = c.schwarz;
  t.custom("schwarz", "kind", [&w](const std::string& s) {
    try {
      w.kind = nks::schwarz_kind_from_string(s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }, [&w] { return nks::to_string(w.kind); });
  t.integer("schwarz", "overlap", w.overlap);
  t.integer("schwarz", "fill_level", w.fill_level);
  t.custom(
      "schwarz", "subdomain_solver",
      [&w](const std::string& s) {
        if (s == "ilu") w.use_lu = false;
        else if (s == "lu") w.use_lu = true;
        else throw ConfigError("schwarz.subdomain_solver must be ilu or lu");
      },
      [&w] { return std::string(w.use_lu ? "lu" : "ilu"); });
  t.boolean("schwarz", "reuse", w.reuse);
  t.integer("schwarz", "subdomains", w.subdomains);
  t.integer("schwarz", "workers", w.workers);
  t.integer("schwarz", "gmres_restart", w.gmres_restart);
  t.integer("schwarz", "gmres_max_iterations", w.gmres_max_iterations);
  t.boolean("schwarz", "coarse_space", w.coarse_space);

  auto& a = c.adaptive;
  t.real("adaptive", "zeta", a.zeta);
  t.real("adaptive", "dt_min", a.dt_min);
  t.real("adaptive", "dt_max", a.dt_max);
  t.real("adaptive", "dt_init", a.dt_init);
  t.real("adaptive", "retry_shrink", a.retry_shrink);
  t.real("adaptive", "zeta_growth", a.zeta_growth);
  t.real("adaptive", "abort_factor", a.abort_factor);
  t.integer("adaptive", "zeta_reset_after", a.zeta_reset_after);

  t.boolean("laws", "enforce", c.laws.enforce);
  t.real("laws", "mass_rel_tol", c.laws.mass_rel_tol);
  t.real("laws", "energy_rel_tol", c.laws.energy_rel_tol);

  t.custom("output", "dir", [&c](const std::string& s) { c.output.dir = s; },
           [&c] { return c.output.dir.string(); });
  t.real("output", "end_time", c.output.end_time);
  t.integer("output", "max_steps", c.output.max_steps);
  t.integer("output", "snapshot_every", c.output.snapshot_every);
  t.integer("output", "checkpoint_every", c.output.checkpoint_every);

  t.integer("bench", "steps", c.bench.steps);
  t.real("bench", "dt", c.bench.dt);
  return t;
}

}  // namespace

ScenarioConfig load_config(const std::filesystem::path& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.what());
  }

  ScenarioConfig cfg;
  // Start from the preset named in the file so omitted keys take its values.
  if (const auto kind = tree.get_optional<std::string>("scenario.kind")) {
    const auto k = kind_from_string(*kind);
    if (k == Kind::SingleParticleShape) cfg = preset_single_particle(1.0);
    else if (k == Kind::SingleParticleCoarsening) cfg = preset_coarsening(0.175);
    else if (k == Kind::Nucleation) cfg = preset_nucleation(0.175, 1);
    cfg.kind = k;
  }
  model::CalphadInputs cal = cfg.model.calphad.value_or(model::CalphadInputs{});
  bool has_calphad = false;
  const auto table = make_table(cfg, cal, has_calphad);

  std::map<std::string, std::map<std::string, const Binding*>> index;
  for (const auto& b : table.bindings()) index[b.section][b.key] = &b;

  // Apply [calphad] before [model] so explicit model keys override the
  // coefficients built from thermodynamic inputs.
  std::vector<std::string> order = {"scenario", "grid", "initial", "calphad", "model", "scheme",
                                    "newton",   "schwarz", "adaptive", "laws", "output", "bench"};
  for (const auto& [sec, _] : tree)
    if (std::find(order.begin(), order.end(), sec) == order.end())
      throw ConfigError("unknown section [" + sec + "] in " + path.string());
  bool radius_given = false;
  for (const auto& sec : order) {
    const auto node = tree.get_child_optional(sec);
    if (!node) continue;
    for (const auto& [key, val] : *node) {
      const auto it = index[sec].find(key);
      if (it == index[sec].end()) throw ConfigError("unknown key " + sec + "." + key + " in " + path.string());
      it->second->set(val.get_value<std::string>());
      if (sec == "initial" && key == "radius") radius_given = true;
    }
    if (sec == "calphad" && has_calphad) {
      const auto built = model::build_coefficients(cal);
      cfg.model.poly = built.poly;
      cfg.model.theta = built.theta;
      cfg.model.calphad = cal;
    }
    if (sec == "grid" && cfg.kind == Kind::SingleParticleShape && !radius_given) {
      const double L = box_min_length(cfg.grid.dims, cfg.grid.h);
      cfg.init.radius = L >= 20.0 ? 7.5 : 0.375 * L;
    }
  }
  cfg.validate();
  return cfg;
}

void save_config(const ScenarioConfig& cfg_in, const std::filesystem::path& path) {
  ScenarioConfig cfg = cfg_in;
  model::CalphadInputs cal{};
  bool has_calphad = false;
  const auto table = make_table(cfg, cal, has_calphad);
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  std::string current;
  for (const auto& b : table.bindings()) {
    if (b.section == "calphad") continue;
    if (b.section != current) {
      os << (current.empty() ? "" : "\n") << '[' << b.section << "]\n";
      current = b.section;
    }
    os << b.key << " = " << b.get() << '\n';
  }
}

}  // namespace nipf::scenario
