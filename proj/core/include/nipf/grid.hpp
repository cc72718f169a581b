#pragma once

// Uniform cell-centered grids, scalar/vector fields and the finite-difference
// operators of the scheme. Every stencil is a 1D stencil applied per axis.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace nipf::fd {

enum class Boundary { Periodic, Neumann };

class StructuredGrid {
 public:
  StructuredGrid() = default;
  /// dims and spacing must have the same length, 1 to 3 entries.
  StructuredGrid(std::vector<int> dims, std::vector<double> spacing, Boundary bc);

  int dim() const { return dim_; }
  int n(int axis) const { return n_[axis]; }
  double h(int axis) const { return h_[axis]; }
  Boundary bc() const { return bc_; }
  std::size_t cells() const { return cells_; }
  double cell_volume() const;
  double length(int axis) const { return n_[axis] * h_[axis]; }
  double domain_volume() const { return cell_volume() * static_cast<double>(cells_); }

  std::size_t stride(int axis) const { return stride_[axis]; }
  std::size_t index(int i, int j = 0, int k = 0) const {
    return static_cast<std::size_t>(i) + stride_[1] * static_cast<std::size_t>(j) +
           stride_[2] * static_cast<std::size_t>(k);
  }
  std::array<int, 3> coords(std::size_t idx) const;
  int coord(std::size_t idx, int axis) const {
    return static_cast<int>((idx / stride_[axis]) % static_cast<std::size_t>(n_[axis]));
  }
  /// Cell center x_i = (i + 1/2) h along `axis`.
  double center(int axis, int i) const { return (i + 0.5) * h_[axis]; }

  /// Index of the cell `dir` (+1 or -1) steps away along `axis`, with ghost
  /// cells resolved by the boundary rule: wraparound for periodic grids, the
  /// mirror f_0 = f_1, f_{N+1} = f_N for Neumann grids.
  std::size_t neighbor(std::size_t idx, int axis, int dir) const {
    const int i = coord(idx, axis);
    int ni = i + dir;
    if (ni < 0) {
      ni = (bc_ == Boundary::Periodic) ? n_[axis] - 1 : 0;
    } else if (ni >= n_[axis]) {
      ni = (bc_ == Boundary::Periodic) ? 0 : n_[axis] - 1;
    }
    return idx + (static_cast<std::ptrdiff_t>(ni) - i) * static_cast<std::ptrdiff_t>(stride_[axis]);
  }

  void check_axis(int axis) const;
  bool operator==(const StructuredGrid& o) const {
    return dim_ == o.dim_ && n_ == o.n_ && h_ == o.h_ && bc_ == o.bc_;
  }

 private:
  int dim_ = 0;
  std::array<int, 3> n_{1, 1, 1};
  std::array<double, 3> h_{1.0, 1.0, 1.0};
  std::array<std::size_t, 3> stride_{1, 1, 1};
  std::size_t cells_ = 0;
  Boundary bc_ = Boundary::Periodic;
};

struct ScalarField {
  StructuredGrid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const StructuredGrid& g, double fill = 0.0) : grid(g), values(g.cells(), fill) {}
  ScalarField(const StructuredGrid& g, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

/// One component per spatial dimension.
struct VectorField {
  StructuredGrid grid;
  std::vector<std::vector<double>> comp;

  VectorField() = default;
  explicit VectorField(const StructuredGrid& g, double fill = 0.0)
      : grid(g), comp(static_cast<std::size_t>(g.dim()), std::vector<double>(g.cells(), fill)) {}
};

/// Face values: faces[axis][k] lives on the face between cell k and its +1
/// neighbor along axis.
struct FaceField {
  StructuredGrid grid;
  std::array<std::vector<double>, 3> faces;
};

ScalarField dx_plus(const ScalarField& f, int axis);
ScalarField dx_minus(const ScalarField& f, int axis);
ScalarField dx_central(const ScalarField& f, int axis);
/// Transpose of dx_central under the plain Euclidean pairing. Equals
/// -dx_central on periodic grids.
ScalarField dx_central_transpose(const ScalarField& f, int axis);
/// ((D+ f)^2 + (D- f)^2) / 2 along one axis.
ScalarField grad_sq_avg(const ScalarField& f, int axis);
/// grad_sq_avg summed over all axes.
ScalarField grad_sq_avg_sum(const ScalarField& f);
/// Compact second difference D+ D- summed over axes.
ScalarField laplacian(const ScalarField& f);

/// kappa [c_i (1 - c_i) + c_{i+1} (1 - c_{i+1})] / 2 on every face.
/// Throws std::domain_error if any c is outside (0, 1).
FaceField mobility_face(const ScalarField& c, double kappa);

/// Conservative flux difference sum_axes D (M D f).
ScalarField div_m_grad(const FaceField& mobility, const ScalarField& f);

/// Fixed-order pairwise summation; identical result for any caller.
double pairwise_sum(std::span<const double> v);

/// sum_i f_i g_i times the cell volume.
double inner(const ScalarField& f, const ScalarField& g);
double integral(const ScalarField& f);

/// |-sum phi [D(M D) psi] - rhs_factor * sum_faces M [D+ phi][D+ psi]|.
/// The identity balances with rhs_factor = 1.
double sbp_identity_residual(const ScalarField& phi, const ScalarField& psi, const FaceField& mobility,
                             double rhs_factor = 1.0);

}  // namespace nipf::fd
