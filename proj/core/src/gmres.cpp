#include <algorithm>
#include <cmath>
#include <vector>

#include "nipf/nks.hpp"

namespace nipf::nks {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void true_residual(const LinearOperator& A, std::span<const double> b, std::span<const double> x,
                   std::vector<double>& r) {
  A(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
}

}  // namespace

GmresResult gmres(const LinearOperator& A, const LinearOperator& precond, std::span<const double> b,
                  std::span<double> x, const GmresOptions& opt) {
  const std::size_t n = b.size();
  const int m = std::max(1, opt.restart);
  const bool left = precond && opt.side == PreconditionSide::Left;
  const bool right = precond && opt.side == PreconditionSide::Right;

  GmresResult res;
  const double target = std::max(opt.rel_tol * norm2(b), opt.abs_tol);
  std::vector<double> r(n), tmp(n), w(n);
  true_residual(A, b, x, r);
  double beta_true = norm2(r);
  res.residual_norm = beta_true;
  if (beta_true <= target) {
    res.converged = true;
    return res;
  }

  std::vector<std::vector<double>> V(m + 1, std::vector<double>(n));
  std::vector<std::vector<double>> H(m + 1, std::vector<double>(m, 0.0));
  std::vector<double> cs(m), sn(m), g(m + 1);

  while (res.iterations < opt.max_iterations) {
    if (left) {
      precond(r, V[0]);
    } else {
      V[0] = r;
    }
    const double beta = norm2(V[0]);
    if (beta == 0.0) break;
    for (auto& v : V[0]) v /= beta;
    // Left preconditioning monitors ||P r||; rescale the target to it.
    const double inner_target = left ? target * beta / beta_true : target;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;

    int j = 0;
    for (; j < m && res.iterations < opt.max_iterations; ++j) {
      if (right) {
        precond(V[j], tmp);
        A(tmp, w);
      } else if (left) {
        A(V[j], tmp);
        precond(tmp, w);
      } else {
        A(V[j], w);
      }
      for (int i = 0; i <= j; ++i) {
        H[i][j] = dot(w, V[i]);
        for (std::size_t q = 0; q < n; ++q) w[q] -= H[i][j] * V[i][q];
      }
      H[j + 1][j] = norm2(w);
      const bool breakdown = H[j + 1][j] <= 1e-14 * std::abs(H[0][0]) + 1e-300;
      if (!breakdown)
        for (std::size_t q = 0; q < n; ++q) V[j + 1][q] = w[q] / H[j + 1][j];
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H[i][j] + sn[i] * H[i + 1][j];
        H[i + 1][j] = -sn[i] * H[i][j] + cs[i] * H[i + 1][j];
        H[i][j] = t;
      }
      const double denom = std::hypot(H[j][j], H[j + 1][j]);
      cs[j] = H[j][j] / denom;
      sn[j] = H[j + 1][j] / denom;
      H[j][j] = denom;
      H[j + 1][j] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      ++res.iterations;
      if (std::abs(g[j + 1]) <= inner_target || breakdown) {
        ++j;
        break;
      }
    }

    // Back substitution for the j x j triangular system.
    std::vector<double> y(j);
    for (int i = j - 1; i >= 0; --i) {
      double s = g[i];
      for (int k = i + 1; k < j; ++k) s -= H[i][k] * y[k];
      y[i] = s / H[i][i];
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int i = 0; i < j; ++i)
      for (std::size_t q = 0; q < n; ++q) w[q] += y[i] * V[i][q];
    if (right) {
      precond(w, tmp);
      for (std::size_t q = 0; q < n; ++q) x[q] += tmp[q];
    } else {
      for (std::size_t q = 0; q < n; ++q) x[q] += w[q];
    }

    true_residual(A, b, x, r);
    beta_true = norm2(r);
    res.residual_norm = beta_true;
    if (beta_true <= target) {
      res.converged = true;
      return res;
    }
  }
  return res;
}

}  // namespace nipf::nks
