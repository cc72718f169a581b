#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <string>

#include "nipf/integrator.hpp"

namespace nipf::integrate {

namespace {

constexpr char kMagic[8] = {'N', 'I', 'P', 'F', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

template <class U>
U to_little(U v) {
  if constexpr (std::endian::native == std::endian::big) {
    U out = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) out = (out << 8) | ((v >> (8 * i)) & 0xff);
    return out;
  }
  return v;
}

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  void u32(std::uint32_t v) { raw(to_little(v)); }
  void i64(std::int64_t v) { raw(to_little(static_cast<std::uint64_t>(v))); }
  void f64(double v) { raw(to_little(std::bit_cast<std::uint64_t>(v))); }
  void vec(const std::vector<double>& v) {
    i64(static_cast<std::int64_t>(v.size()));
    for (double x : v) f64(x);
  }

 private:
  template <class U>
  void raw(U v) {
    os_.write(reinterpret_cast<const char*>(&v), sizeof(U));
  }
  std::ostream& os_;
};

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}
  std::uint32_t u32() { return to_little(raw<std::uint32_t>()); }
  std::int64_t i64() { return static_cast<std::int64_t>(to_little(raw<std::uint64_t>())); }
  double f64() { return std::bit_cast<double>(to_little(raw<std::uint64_t>())); }
  std::vector<double> vec(std::size_t expected) {
    const auto n = i64();
    if (n < 0 || static_cast<std::size_t>(n) != expected) throw std::runtime_error("checkpoint: field size mismatch");
    std::vector<double> v(expected);
    for (auto& x : v) x = f64();
    return v;
  }

 private:
  template <class U>
  U raw() {
    U v{};
    if (!is_.read(reinterpret_cast<char*>(&v), sizeof(U))) throw std::runtime_error("checkpoint: truncated file");
    return v;
  }
  std::istream& is_;
};

void write_state(Writer& w, const dvd::DiscreteState& s) {
  w.vec(s.c.values);
  w.vec(s.eta.values);
  for (const auto& comp : s.u.comp) w.vec(comp);
}

void read_state(Reader& r, dvd::DiscreteState& s) {
  const auto n = s.grid.cells();
  s.c.values = r.vec(n);
  s.eta.values = r.vec(n);
  for (auto& comp : s.u.comp) comp = r.vec(n);
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const RunState& st) {
  const auto& g = st.current.grid;
  {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os.write(kMagic, sizeof(kMagic));
    Writer w(os);
    w.u32(kVersion);
    w.u32(static_cast<std::uint32_t>(g.dim()));
    w.u32(g.bc() == fd::Boundary::Periodic ? 0u : 1u);
    for (int a = 0; a < g.dim(); ++a) {
      w.i64(g.n(a));
      w.f64(g.h(a));
    }
    w.f64(st.t);
    w.i64(st.step);
    w.f64(st.dt_prev);
    w.f64(st.zeta);
    w.i64(st.success_streak);
    w.f64(st.initial_mass);
    w.f64(st.current.cbar0);
    w.u32(st.has_previous ? 1u : 0u);
    write_state(w, st.current);
    if (st.has_previous) write_state(w, st.previous);
    if (!os) throw std::runtime_error("write failed for " + path.string());
  }
  std::ofstream man(path.string() + ".manifest");
  man << std::setprecision(17);
  man << "format = nipf-checkpoint\nversion = " << kVersion << "\nbyte_order = little\n";
  man << "dim = " << g.dim() << "\nboundary = " << (g.bc() == fd::Boundary::Periodic ? "periodic" : "neumann") << '\n';
  man << "cells =";
  for (int a = 0; a < g.dim(); ++a) man << ' ' << g.n(a);
  man << "\nspacing =";
  for (int a = 0; a < g.dim(); ++a) man << ' ' << g.h(a);
  man << "\nt = " << st.t << "\nstep = " << st.step << "\ndt_prev = " << st.dt_prev << "\nzeta = " << st.zeta
      << "\nhas_previous = " << st.has_previous << '\n';
}

RunState read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error(path.string() + " is not a checkpoint");
  Reader r(is);
  const auto version = r.u32();
  if (version != kVersion) throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  const int dim = static_cast<int>(r.u32());
  if (dim < 1 || dim > 3) throw std::runtime_error("checkpoint: bad dimension");
  const auto bc = r.u32() == 0 ? fd::Boundary::Periodic : fd::Boundary::Neumann;
  std::vector<int> n(dim);
  std::vector<double> h(dim);
  for (int a = 0; a < dim; ++a) {
    n[a] = static_cast<int>(r.i64());
    h[a] = r.f64();
  }
  const fd::StructuredGrid g(n, h, bc);
  RunState st;
  st.t = r.f64();
  st.step = r.i64();
  st.dt_prev = r.f64();
  st.zeta = r.f64();
  st.success_streak = static_cast<int>(r.i64());
  st.initial_mass = r.f64();
  const double cbar0 = r.f64();
  st.has_previous = r.u32() != 0;
  st.current = dvd::DiscreteState(g);
  st.current.cbar0 = cbar0;
  read_state(r, st.current);
  if (st.has_previous) {
    st.previous = dvd::DiscreteState(g);
    st.previous.cbar0 = cbar0;
    read_state(r, st.previous);
  }
  return st;
}

}  // namespace nipf::integrate
