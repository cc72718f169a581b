#include <algorithm>
#include <cmath>
#include <string>

#include "nipf/nks.hpp"

namespace nipf::nks {

using Triplet = Eigen::Triplet<double, int>;

// Row-wise IKJ elimination. Row i is expanded into a dense work vector with a
// sorted linked list of its occupied columns; the level of a fill entry is
// lev(i,k) + lev(k,j) + 1.
IluFactorization::IluFactorization(const SparseMatrix& a_in, int fill_level)
    : n_(static_cast<int>(a_in.rows())), level_(fill_level) {
  if (a_in.rows() != a_in.cols()) throw std::invalid_argument("IluFactorization: matrix must be square");
  SparseMatrix a = a_in;
  a.makeCompressed();
  const bool complete = fill_level < 0;
  const int n = n_;

  std::vector<double> w(n, 0.0);
  std::vector<int> lev(n, -1);
  std::vector<int> next(n + 1, n);
  std::vector<int> levels;
  ptr_.assign(1, 0);
  diag_.assign(n, -1);
  col_.reserve(a.nonZeros() * 2);
  val_.reserve(a.nonZeros() * 2);
  levels.reserve(a.nonZeros() * 2);

  const int* outer = a.outerIndexPtr();
  const int* inner = a.innerIndexPtr();
  const double* vals = a.valuePtr();

  for (int i = 0; i < n; ++i) {
    // Load row i (plus a structural diagonal) into the list.
    int head = n;
    int tail = -1;
    bool has_diag = false;
    auto append = [&](int j, double v) {
      w[j] = v;
      lev[j] = 0;
      if (tail < 0) head = j;
      else next[tail] = j;
      next[j] = n;
      tail = j;
    };
    for (int p = outer[i]; p < outer[i + 1]; ++p) {
      const int j = inner[p];
      if (!has_diag && j > i) {
        append(i, 0.0);
        has_diag = true;
      }
      if (j == i) has_diag = true;
      append(j, vals[p]);
    }
    if (!has_diag) append(i, 0.0);

    for (int k = head; k < i; k = next[k]) {
      const double pivot = val_[diag_[k]];
      const double factor = w[k] / pivot;
      w[k] = factor;
      const int lk = lev[k];
      int pos = k;
      for (int q = diag_[k] + 1; q < ptr_[k + 1]; ++q) {
        const int j = col_[q];
        if (lev[j] >= 0) {
          w[j] -= factor * val_[q];
          if (!complete) lev[j] = std::min(lev[j], lk + levels[q] + 1);
          continue;
        }
        const int nl = complete ? 0 : lk + levels[q] + 1;
        if (!complete && nl > fill_level) continue;
        while (next[pos] < j) pos = next[pos];
        next[j] = next[pos];
        next[pos] = j;
        w[j] = -factor * val_[q];
        lev[j] = nl;
        pos = j;
      }
    }

    for (int j = head; j < n; j = next[j]) {
      if (j == i) {
        if (w[j] == 0.0 || !std::isfinite(w[j]))
          throw ZeroPivot("zero pivot in row " + std::to_string(i));
        diag_[i] = static_cast<int>(col_.size());
      }
      col_.push_back(j);
      val_.push_back(w[j]);
      levels.push_back(lev[j]);
      w[j] = 0.0;
      lev[j] = -1;
    }
    ptr_.push_back(static_cast<int>(col_.size()));
  }
}

void IluFactorization::solve(std::span<const double> b, std::span<double> x) const {
  const int n = n_;
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int q = ptr_[i]; q < diag_[i]; ++q) s -= val_[q] * x[col_[q]];
    x[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int q = diag_[i] + 1; q < ptr_[i + 1]; ++q) s -= val_[q] * x[col_[q]];
    x[i] = s / val_[diag_[i]];
  }
}

SparseMatrix IluFactorization::lower() const {
  std::vector<Triplet> t;
  for (int i = 0; i < n_; ++i) {
    for (int q = ptr_[i]; q < diag_[i]; ++q) t.emplace_back(i, col_[q], val_[q]);
    t.emplace_back(i, i, 1.0);
  }
  SparseMatrix L(n_, n_);
  L.setFromTriplets(t.begin(), t.end());
  return L;
}

SparseMatrix IluFactorization::upper() const {
  std::vector<Triplet> t;
  for (int i = 0; i < n_; ++i)
    for (int q = diag_[i]; q < ptr_[i + 1]; ++q) t.emplace_back(i, col_[q], val_[q]);
  SparseMatrix U(n_, n_);
  U.setFromTriplets(t.begin(), t.end());
  return U;
}

}  // namespace nipf::nks
