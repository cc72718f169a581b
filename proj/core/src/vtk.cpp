#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nipf/io.hpp"

namespace nipf::io {

namespace {

const char* kAxisNames[3] = {"x", "y", "z"};

void write_field(std::ostream& os, const std::string& name, const std::vector<double>& v) {
  os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
  for (double x : v) os << x << '\n';
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const dvd::DiscreteState& s, double t, long step) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const auto& g = s.grid;
  os << std::setprecision(17);
  os << "# vtk DataFile Version 3.0\n";
  os << "nipf t=" << t << " step=" << step << " cbar0=" << s.cbar0
     << " bc=" << (g.bc() == fd::Boundary::Periodic ? "periodic" : "neumann") << " dim=" << g.dim() << '\n';
  os << "ASCII\nDATASET STRUCTURED_POINTS\n";
  os << "DIMENSIONS";
  for (int a = 0; a < 3; ++a) os << ' ' << (a < g.dim() ? g.n(a) : 1);
  os << "\nORIGIN";
  for (int a = 0; a < 3; ++a) os << ' ' << (a < g.dim() ? 0.5 * g.h(a) : 0.0);
  os << "\nSPACING";
  for (int a = 0; a < 3; ++a) os << ' ' << (a < g.dim() ? g.h(a) : 1.0);
  os << "\nPOINT_DATA " << g.cells() << '\n';
  write_field(os, "c", s.c.values);
  write_field(os, "eta", s.eta.values);
  for (int I = 0; I < g.dim(); ++I) write_field(os, std::string("u_") + kAxisNames[I], s.u.comp[I]);
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

namespace {

std::string expect_token(std::istream& is, const std::string& want) {
  std::string tok;
  if (!(is >> tok) || tok != want) throw std::runtime_error("VTK parse error: expected '" + want + "', got '" + tok + "'");
  return tok;
}

std::string header_value(const std::string& line, const std::string& key) {
  const auto pos = line.find(key + "=");
  if (pos == std::string::npos) throw std::runtime_error("VTK header lacks " + key);
  const auto start = pos + key.size() + 1;
  return line.substr(start, line.find(' ', start) - start);
}

}  // namespace

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(is, line);
  if (line.rfind("# vtk DataFile", 0) != 0) throw std::runtime_error(path.string() + " is not a legacy VTK file");
  std::string title;
  std::getline(is, title);
  Snapshot snap;
  snap.t = std::stod(header_value(title, "t"));
  snap.step = std::stol(header_value(title, "step"));
  const double cbar0 = std::stod(header_value(title, "cbar0"));
  const auto bc = header_value(title, "bc") == "periodic" ? fd::Boundary::Periodic : fd::Boundary::Neumann;
  const int dim = std::stoi(header_value(title, "dim"));

  expect_token(is, "ASCII");
  expect_token(is, "DATASET");
  expect_token(is, "STRUCTURED_POINTS");
  expect_token(is, "DIMENSIONS");
  int n[3];
  is >> n[0] >> n[1] >> n[2];
  expect_token(is, "ORIGIN");
  double o[3];
  is >> o[0] >> o[1] >> o[2];
  expect_token(is, "SPACING");
  double h[3];
  is >> h[0] >> h[1] >> h[2];
  expect_token(is, "POINT_DATA");
  std::size_t count = 0;
  is >> count;

  fd::StructuredGrid g(std::vector<int>(n, n + dim), std::vector<double>(h, h + dim), bc);
  if (count != g.cells()) throw std::runtime_error("VTK point count does not match dimensions");
  snap.state = dvd::DiscreteState(g);
  snap.state.cbar0 = cbar0;

  std::string tok;
  while (is >> tok) {
    if (tok != "SCALARS") throw std::runtime_error("VTK parse error near '" + tok + "'");
    std::string name, type;
    int ncomp = 0;
    is >> name >> type >> ncomp;
    expect_token(is, "LOOKUP_TABLE");
    is >> tok;
    std::vector<double>* dst = nullptr;
    if (name == "c") dst = &snap.state.c.values;
    else if (name == "eta") dst = &snap.state.eta.values;
    else
      for (int I = 0; I < dim; ++I)
        if (name == std::string("u_") + kAxisNames[I]) dst = &snap.state.u.comp[I];
    std::vector<double> sink(count);
    auto& out = dst ? *dst : sink;
    for (std::size_t k = 0; k < count; ++k)
      if (!(is >> out[k])) throw std::runtime_error("VTK field '" + name + "' is truncated");
  }
  return snap;
}

}  // namespace nipf::io
