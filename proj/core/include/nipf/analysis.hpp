#pragma once

// Post-processing of composition fields: particle census, coarsening fit,
// size distribution and a shape anisotropy measure.

#include <array>
#include <optional>
#include <vector>

#include "nipf/grid.hpp"

namespace nipf::analysis {

struct ParticleStats {
  std::size_t count = 0;
  std::vector<double> radii;
  std::vector<std::size_t> cells;  // cells per particle
  double mean_radius = 0.0;
  double threshold = 0.22;
  /// labels[k] = particle index of cell k, or -1.
  std::vector<int> labels;
};

/// R = (V / pi)^(1/2) in 2D, (3 V / 4 pi)^(1/3) in 3D, V in 1D.
double equivalent_radius(double volume, int dim);

/// Face-adjacent components of {c >= threshold}; periodic grids wrap.
ParticleStats label_particles(const fd::ScalarField& c, double threshold = 0.22);

struct CoarseningFit {
  double K = 0.0;
  double R0_cubed = 0.0;
  double t0 = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Least-squares line <R>^3 = R0_cubed + K (t - t0) over samples with
/// t in [t0, t1]. Throws std::invalid_argument with fewer than 3 points.
CoarseningFit fit_coarsening(const std::vector<double>& t, const std::vector<double>& mean_radius, double t0,
                             double t1);

struct Histogram {
  std::vector<double> edges;    // bins + 1 entries
  std::vector<double> density;  // bins entries, integrates to 1
  std::size_t dropped = 0;      // samples beyond the last edge
};

/// Histogram of R / <R> over [0, max_ratio] normalized to unit area over the
/// samples that fall inside. Throws std::invalid_argument when empty.
Histogram psd_histogram(const std::vector<double>& radii, int bins = 25, double max_ratio = 2.5);

/// Mean extent along the face diagonals divided by the mean extent along the
/// axes, measured on rays from `center` in the (x, y) plane through it. A
/// disk gives 1, a square sqrt(2). Without a center the centroid of the
/// largest particle is used. Throws std::invalid_argument if no cell reaches
/// the threshold.
double anisotropy_measure(const fd::ScalarField& c, double threshold = 0.22,
                          std::optional<std::array<double, 3>> center = std::nullopt);

}  // namespace nipf::analysis
