#include <algorithm>
#include <array>
#include <iostream>
#include <thread>

#include "nipf/nks.hpp"

namespace nipf::nks {

std::string to_string(SchwarzKind k) {
  switch (k) {
    case SchwarzKind::ClassicalAS: return "AS";
    case SchwarzKind::LeftRAS: return "left-RAS";
    case SchwarzKind::RightRAS: return "right-RAS";
  }
  return "?";
}

SchwarzKind schwarz_kind_from_string(const std::string& s) {
  if (s == "AS" || s == "as" || s == "classical") return SchwarzKind::ClassicalAS;
  if (s == "left-RAS" || s == "left_ras" || s == "lras") return SchwarzKind::LeftRAS;
  if (s == "right-RAS" || s == "right_ras" || s == "rras") return SchwarzKind::RightRAS;
  throw std::invalid_argument("unknown Schwarz variant '" + s + "'");
}

void parallel_for(int n, int workers, const std::function<void(int)>& body) {
  const int w = std::max(1, std::min(workers, n));
  if (w == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(w);
  threads.reserve(w);
  for (int t = 0; t < w; ++t) {
    threads.emplace_back([&, t] {
      try {
        for (int i = t; i < n; i += w) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

std::vector<int> prime_factors(int n) {
  std::vector<int> f;
  for (int p = 2; p * p <= n; ++p)
    while (n % p == 0) {
      f.push_back(p);
      n /= p;
    }
  if (n > 1) f.push_back(n);
  std::sort(f.rbegin(), f.rend());
  return f;
}

}  // namespace

std::vector<Subdomain> partition(const fd::StructuredGrid& g, int nf, int count, int overlap) {
  if (count < 1) throw std::invalid_argument("partition: need at least one subdomain");
  if (overlap < 0) throw std::invalid_argument("partition: overlap must be non-negative");
  const int d = g.dim();
  std::array<int, 3> parts{1, 1, 1};
  for (int p : prime_factors(count)) {
    int best = -1;
    double best_len = 0.0;
    for (int a = 0; a < d; ++a) {
      if (parts[a] * p > g.n(a)) continue;
      const double len = static_cast<double>(g.n(a)) / parts[a];
      if (len > best_len) {
        best_len = len;
        best = a;
      }
    }
    if (best < 0) throw std::invalid_argument("partition: too many subdomains for the grid");
    parts[best] *= p;
  }

  auto bound = [&](int a, int b) { return static_cast<int>(static_cast<long long>(b) * g.n(a) / parts[a]); };
  std::vector<Subdomain> subs;
  subs.reserve(count);
  for (int bz = 0; bz < parts[2]; ++bz) {
    for (int by = 0; by < parts[1]; ++by) {
      for (int bx = 0; bx < parts[0]; ++bx) {
        const std::array<int, 3> b{bx, by, bz};
        std::array<int, 3> lo{0, 0, 0}, hi{1, 1, 1}, olo{0, 0, 0}, ohi{1, 1, 1};
        for (int a = 0; a < d; ++a) {
          lo[a] = bound(a, b[a]);
          hi[a] = bound(a, b[a] + 1);
          olo[a] = std::max(0, lo[a] - overlap);
          ohi[a] = std::min(g.n(a), hi[a] + overlap);
        }
        Subdomain s;
        for (int k = olo[2]; k < ohi[2]; ++k)
          for (int j = olo[1]; j < ohi[1]; ++j)
            for (int i = olo[0]; i < ohi[0]; ++i) {
              const bool own = i >= lo[0] && i < hi[0] && j >= lo[1] && j < hi[1] && k >= lo[2] && k < hi[2];
              const int cell = static_cast<int>(g.index(i, j, k));
              for (int f = 0; f < nf; ++f) {
                s.rows.push_back(cell * nf + f);
                s.owned.push_back(own ? 1 : 0);
              }
            }
        subs.push_back(std::move(s));
      }
    }
  }
  return subs;
}

std::vector<Subdomain> partition_rows(int n, int block, int count, int overlap) {
  if (block < 1 || n % block != 0) throw std::invalid_argument("partition_rows: n must be a multiple of block");
  const int cells = n / block;
  if (count < 1 || count > cells) throw std::invalid_argument("partition_rows: bad subdomain count");
  std::vector<Subdomain> subs;
  for (int b = 0; b < count; ++b) {
    const int lo = static_cast<int>(static_cast<long long>(b) * cells / count);
    const int hi = static_cast<int>(static_cast<long long>(b + 1) * cells / count);
    Subdomain s;
    for (int c = std::max(0, lo - overlap); c < std::min(cells, hi + overlap); ++c)
      for (int f = 0; f < block; ++f) {
        s.rows.push_back(c * block + f);
        s.owned.push_back(c >= lo && c < hi ? 1 : 0);
      }
    subs.push_back(std::move(s));
  }
  return subs;
}

SchwarzPreconditioner::SchwarzPreconditioner(SchwarzConfig cfg, std::vector<Subdomain> subdomains)
    : cfg_(cfg), subs_(std::move(subdomains)) {
  if (subs_.empty()) throw std::invalid_argument("SchwarzPreconditioner: no subdomains");
}

namespace {

SparseMatrix extract(const SparseMatrix& J, const std::vector<int>& rows) {
  std::vector<int> local(static_cast<std::size_t>(J.cols()), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) local[rows[i]] = static_cast<int>(i);
  std::vector<Eigen::Triplet<double, int>> t;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (SparseMatrix::InnerIterator it(J, rows[i]); it; ++it) {
      const int j = local[it.col()];
      if (j >= 0) t.emplace_back(static_cast<int>(i), j, it.value());
    }
  SparseMatrix A(static_cast<int>(rows.size()), static_cast<int>(rows.size()));
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

}  // namespace

void SchwarzPreconditioner::setup(const SparseMatrix& J) {
  if (cfg_.reuse && has_factors()) return;
  const int nsub = static_cast<int>(subs_.size());
  std::vector<IluFactorization> factors(nsub);
  std::vector<char> fell_back(nsub, 0);
  const int level = cfg_.use_lu ? IluFactorization::kComplete : cfg_.fill_level;
  parallel_for(nsub, cfg_.workers, [&](int s) {
    const auto A = extract(J, subs_[s].rows);
    try {
      factors[s] = IluFactorization(A, level);
    } catch (const ZeroPivot&) {
      if (level == IluFactorization::kComplete) throw;
      factors[s] = IluFactorization(A, IluFactorization::kComplete);
      fell_back[s] = 1;
    }
  });
  for (int s = 0; s < nsub; ++s)
    if (fell_back[s]) {
      ++fallbacks_;
      std::cerr << "[nks] zero pivot in ILU(" << level << ") on subdomain " << s << ", using LU\n";
    }
  factors_ = std::move(factors);
  ++factorizations_;

  coarse_ready_ = false;
  if (cfg_.coarse_space && !groups_.empty()) {
    const int k = static_cast<int>(groups_.size());
    std::vector<int> group_of(static_cast<std::size_t>(J.cols()), -1);
    for (int a = 0; a < k; ++a)
      for (int i : groups_[a]) group_of[i] = a;
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(k, k);
    for (int a = 0; a < k; ++a)
      for (int i : groups_[a])
        for (SparseMatrix::InnerIterator it(J, i); it; ++it)
          if (group_of[it.col()] >= 0) E(a, group_of[it.col()]) += it.value();
    // Pseudo-inverse: with zero elastic stiffness the coarse block vanishes.
    coarse_pinv_ = E.completeOrthogonalDecomposition().pseudoInverse();
    coarse_J_ = J;
    coarse_ready_ = true;
  }
}

void SchwarzPreconditioner::apply(std::span<const double> r_in, std::span<double> z) const {
  if (!has_factors()) throw std::logic_error("SchwarzPreconditioner::apply before setup");
  // Coarse solve first, then the subdomain sweep on what it leaves.
  std::vector<double> zc_full, r_work;
  std::span<const double> r = r_in;
  if (coarse_ready_) {
    const int k = static_cast<int>(groups_.size());
    Eigen::VectorXd rc = Eigen::VectorXd::Zero(k);
    for (int a = 0; a < k; ++a)
      for (int i : groups_[a]) rc[a] += r_in[i];
    const Eigen::VectorXd zc = coarse_pinv_ * rc;
    zc_full.assign(r_in.size(), 0.0);
    for (int a = 0; a < k; ++a)
      for (int i : groups_[a]) zc_full[i] = zc[a];
    Eigen::Map<const Eigen::VectorXd> zv(zc_full.data(), static_cast<Eigen::Index>(zc_full.size()));
    Eigen::Map<const Eigen::VectorXd> rv(r_in.data(), static_cast<Eigen::Index>(r_in.size()));
    const Eigen::VectorXd rr = rv - coarse_J_ * zv;
    r_work.assign(rr.data(), rr.data() + rr.size());
    r = r_work;
  }
  const int nsub = static_cast<int>(subs_.size());
  std::vector<std::vector<double>> local(nsub);
  parallel_for(nsub, cfg_.workers, [&](int s) {
    const auto& sub = subs_[s];
    std::vector<double> rl(sub.rows.size());
    for (std::size_t i = 0; i < rl.size(); ++i)
      rl[i] = (cfg_.kind == SchwarzKind::RightRAS && !sub.owned[i]) ? 0.0 : r[sub.rows[i]];
    local[s].resize(rl.size());
    factors_[s].solve(rl, local[s]);
  });
  std::fill(z.begin(), z.end(), 0.0);
  for (int s = 0; s < nsub; ++s) {
    const auto& sub = subs_[s];
    for (std::size_t i = 0; i < sub.rows.size(); ++i) {
      if (cfg_.kind == SchwarzKind::LeftRAS && !sub.owned[i]) continue;
      z[sub.rows[i]] += local[s][i];
    }
  }
  for (std::size_t i = 0; i < zc_full.size(); ++i) z[i] += zc_full[i];
}

}  // namespace nipf::nks
