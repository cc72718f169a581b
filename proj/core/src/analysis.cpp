#include "nipf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace nipf::analysis {

double equivalent_radius(double volume, int dim) {
  switch (dim) {
    case 1: return volume;
    case 2: return std::sqrt(volume / std::numbers::pi);
    case 3: return std::cbrt(3.0 * volume / (4.0 * std::numbers::pi));
  }
  throw std::invalid_argument("equivalent_radius: dim must be 1, 2 or 3");
}

ParticleStats label_particles(const fd::ScalarField& c, double threshold) {
  const auto& g = c.grid;
  ParticleStats st;
  st.threshold = threshold;
  st.labels.assign(c.size(), -1);
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < c.size(); ++seed) {
    if (c[seed] < threshold || st.labels[seed] >= 0) continue;
    const int label = static_cast<int>(st.count++);
    std::size_t n = 0;
    st.labels[seed] = label;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      ++n;
      for (int a = 0; a < g.dim(); ++a)
        for (int dir : {-1, +1}) {
          const std::size_t nb = g.neighbor(k, a, dir);
          if (st.labels[nb] < 0 && c[nb] >= threshold) {
            st.labels[nb] = label;
            stack.push_back(nb);
          }
        }
    }
    st.cells.push_back(n);
    st.radii.push_back(equivalent_radius(static_cast<double>(n) * g.cell_volume(), g.dim()));
  }
  if (st.count > 0)
    st.mean_radius = std::accumulate(st.radii.begin(), st.radii.end(), 0.0) / static_cast<double>(st.count);
  return st;
}

CoarseningFit fit_coarsening(const std::vector<double>& t, const std::vector<double>& r, double t0, double t1) {
  if (t.size() != r.size()) throw std::invalid_argument("fit_coarsening: t and <R> differ in length");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= t0 && t[i] <= t1) {
      x.push_back(t[i] - t0);
      y.push_back(r[i] * r[i] * r[i]);
    }
  if (x.size() < 3) throw std::invalid_argument("fit_coarsening: fewer than 3 points in the window");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_coarsening: all samples at the same time");
  CoarseningFit f;
  f.K = sxy / sxx;
  f.R0_cubed = my - f.K * mx;
  f.t0 = t0;
  f.points = x.size();
  if (syy == 0.0) {
    f.r_squared = 1.0;
  } else {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - (f.R0_cubed + f.K * x[i]);
      ss_res += e * e;
    }
    f.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return f;
}

Histogram psd_histogram(const std::vector<double>& radii, int bins, double max_ratio) {
  if (radii.empty()) throw std::invalid_argument("psd_histogram: no radii");
  if (bins < 1 || !(max_ratio > 0.0)) throw std::invalid_argument("psd_histogram: bad binning");
  const double mean = std::accumulate(radii.begin(), radii.end(), 0.0) / static_cast<double>(radii.size());
  if (!(mean > 0.0)) throw std::invalid_argument("psd_histogram: mean radius must be positive");
  Histogram h;
  const double w = max_ratio / bins;
  for (int b = 0; b <= bins; ++b) h.edges.push_back(b * w);
  std::vector<std::size_t> counts(bins, 0);
  std::size_t inside = 0;
  for (double r : radii) {
    const double x = r / mean;
    if (x > max_ratio) {
      ++h.dropped;
      continue;
    }
    const int b = std::min(bins - 1, static_cast<int>(x / w));
    ++counts[b];
    ++inside;
  }
  if (inside == 0) throw std::invalid_argument("psd_histogram: every sample lies beyond the range");
  for (int b = 0; b < bins; ++b) h.density.push_back(static_cast<double>(counts[b]) / (inside * w));
  return h;
}

namespace {

double sample(const fd::ScalarField& c, double x, double y, int k) {
  const auto& g = c.grid;
  const bool periodic = g.bc() == fd::Boundary::Periodic;
  auto cell = [&](int axis, double pos, int& i0, int& i1, double& f) {
    const double s = pos / g.h(axis) - 0.5;
    const double fl = std::floor(s);
    f = s - fl;
    i0 = static_cast<int>(fl);
    i1 = i0 + 1;
    const int n = g.n(axis);
    if (periodic) {
      i0 = ((i0 % n) + n) % n;
      i1 = ((i1 % n) + n) % n;
    } else {
      i0 = std::clamp(i0, 0, n - 1);
      i1 = std::clamp(i1, 0, n - 1);
    }
  };
  int x0, x1, y0, y1;
  double fx, fy;
  cell(0, x, x0, x1, fx);
  cell(1, y, y0, y1, fy);
  const auto v = [&](int i, int j) { return c[g.index(i, j, k)]; };
  return (1 - fx) * (1 - fy) * v(x0, y0) + fx * (1 - fy) * v(x1, y0) + (1 - fx) * fy * v(x0, y1) +
         fx * fy * v(x1, y1);
}

std::array<double, 3> largest_particle_center(const fd::ScalarField& c, double threshold) {
  const auto st = label_particles(c, threshold);
  if (st.count == 0) throw std::invalid_argument("anisotropy_measure: no cell reaches the threshold");
  const auto biggest =
      static_cast<int>(std::max_element(st.cells.begin(), st.cells.end()) - st.cells.begin());
  const auto& g = c.grid;
  std::array<double, 3> center{0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim(); ++a) {
    const double L = g.length(a);
    double sc = 0.0, ss = 0.0, lin = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (st.labels[k] != biggest) continue;
      const double x = g.center(a, g.coord(k, a));
      const double ang = 2.0 * std::numbers::pi * x / L;
      sc += std::cos(ang);
      ss += std::sin(ang);
      lin += x;
      ++n;
    }
    if (g.bc() == fd::Boundary::Periodic) {
      double ang = std::atan2(ss, sc);
      if (ang < 0) ang += 2.0 * std::numbers::pi;
      center[a] = ang * L / (2.0 * std::numbers::pi);
    } else {
      center[a] = lin / static_cast<double>(n);
    }
  }
  return center;
}

}  // namespace

double anisotropy_measure(const fd::ScalarField& c, double threshold, std::optional<std::array<double, 3>> center) {
  const auto& g = c.grid;
  if (g.dim() < 2) throw std::invalid_argument("anisotropy_measure: needs at least 2 dimensions");
  if (std::none_of(c.values.begin(), c.values.end(), [&](double v) { return v >= threshold; }))
    throw std::invalid_argument("anisotropy_measure: no cell reaches the threshold");
  const auto ctr = center ? *center : largest_particle_center(c, threshold);
  const int layer = g.dim() == 3 ? std::clamp(static_cast<int>(std::floor(ctr[2] / g.h(2))), 0, g.n(2) - 1) : 0;

  const double step = 0.05 * std::min(g.h(0), g.h(1));
  const double reach = 0.5 * std::min(g.length(0), g.length(1));
  auto extent = [&](double angle) {
    const double dx = std::cos(angle), dy = std::sin(angle);
    double prev = sample(c, ctr[0], ctr[1], layer);
    if (prev < threshold) return 0.0;
    for (double s = step; s <= reach; s += step) {
      const double v = sample(c, ctr[0] + s * dx, ctr[1] + s * dy, layer);
      if (v < threshold) return s - step + step * (prev - threshold) / (prev - v);
      prev = v;
    }
    return reach;
  };
  double axis = 0.0, diag = 0.0;
  for (int q = 0; q < 4; ++q) {
    axis += extent(q * std::numbers::pi / 2.0);
    diag += extent(q * std::numbers::pi / 2.0 + std::numbers::pi / 4.0);
  }
  if (axis <= 0.0) throw std::invalid_argument("anisotropy_measure: center lies outside the particle");
  return diag / axis;
}

}  // namespace nipf::analysis
