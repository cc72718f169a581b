#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nipf/nks.hpp"

namespace nipf::nks {

namespace {

struct Trial {
  bool ok = false;
  std::vector<double> x;
  std::vector<double> f;
  double norm = 0.0;
};

Trial evaluate(const NonlinearProblem& problem, std::vector<double> x) {
  Trial t;
  try {
    t.f = problem.residual(x);
  } catch (const std::domain_error&) {
    return t;
  }
  t.norm = norm2(t.f);
  t.ok = std::isfinite(t.norm);
  t.x = std::move(x);
  return t;
}

}  // namespace

SolveReport newton_solve(const NonlinearProblem& problem, std::vector<double>& x, const NewtonConfig& cfg,
                         SchwarzPreconditioner& pc) {
  SolveReport rep;
  auto fail = [&](std::string why) {
    rep.reason = std::move(why);
    pc.invalidate();
    if (rep.newton_iterations > 0)
      rep.gmres_average = static_cast<double>(rep.gmres_iterations) / rep.newton_iterations;
    return rep;
  };

  Trial cur = evaluate(problem, x);
  if (!cur.ok) return fail("inadmissible initial iterate");
  rep.initial_residual = cur.norm;
  rep.final_residual = cur.norm;
  const double target = std::max(cfg.eps_rel * cur.norm, cfg.eps_abs);

  GmresOptions gopt;
  gopt.restart = pc.config().gmres_restart;
  gopt.max_iterations = pc.config().gmres_max_iterations;
  gopt.rel_tol = cfg.xi_rel;
  // Never let the linear floor sit above the nonlinear target, else dx = 0.
  gopt.abs_tol = std::min(cfg.xi_abs, 0.1 * target);
  gopt.side = pc.config().kind == SchwarzKind::RightRAS ? PreconditionSide::Right : PreconditionSide::Left;

  while (rep.final_residual > target) {
    if (rep.newton_iterations >= cfg.max_iterations) return fail("Newton iteration limit reached");

    SparseMatrix J;
    try {
      J = problem.jacobian(x);
      pc.setup(J);
    } catch (const std::domain_error& e) {
      return fail(std::string("Jacobian evaluation failed: ") + e.what());
    } catch (const ZeroPivot& e) {
      return fail(std::string("subdomain factorization failed: ") + e.what());
    }
    const LinearOperator A = [&J](std::span<const double> v, std::span<double> out) {
      Eigen::Map<const Eigen::VectorXd> vin(v.data(), static_cast<Eigen::Index>(v.size()));
      Eigen::Map<Eigen::VectorXd> vout(out.data(), static_cast<Eigen::Index>(out.size()));
      vout.noalias() = J * vin;
    };
    const LinearOperator M = [&pc](std::span<const double> v, std::span<double> out) { pc.apply(v, out); };

    std::vector<double> b(cur.f.size());
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = -cur.f[i];
    std::vector<double> dx(b.size(), 0.0);
    auto lin = gmres(A, M, b, dx, gopt);
    rep.gmres_iterations += lin.iterations;
    if (!lin.converged && pc.config().reuse && pc.factorization_count() > 0) {
      // Stale factors: refactor once at the current Jacobian.
      pc.invalidate();
      pc.setup(J);
      std::fill(dx.begin(), dx.end(), 0.0);
      lin = gmres(A, M, b, dx, gopt);
      rep.gmres_iterations += lin.iterations;
    }
    if (problem.project_direction) problem.project_direction(dx);

    double lambda = cfg.ls_initial;
    Trial next;
    for (;;) {
      std::vector<double> xt(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) xt[i] = x[i] + lambda * dx[i];
      next = evaluate(problem, std::move(xt));
      const double bound = (1.0 - 2.0 * cfg.ls_sufficient_decrease * lambda) * cur.norm * cur.norm;
      if (next.ok && next.norm * next.norm <= bound) break;
      lambda *= cfg.ls_contraction;
      if (lambda < cfg.ls_min) {
        ++rep.newton_iterations;
        return fail(lin.converged ? "line search failed" : "line search failed after unconverged GMRES");
      }
    }
    x = next.x;
    cur = std::move(next);
    rep.final_residual = cur.norm;
    ++rep.newton_iterations;
  }
  rep.converged = true;
  if (rep.newton_iterations > 0)
    rep.gmres_average = static_cast<double>(rep.gmres_iterations) / rep.newton_iterations;
  return rep;
}

}  // namespace nipf::nks
