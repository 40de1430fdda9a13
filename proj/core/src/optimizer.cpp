#include "gzi/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Cholesky>

namespace gzi {

Vector6 project(const Vector6& x, const Vector6& lower, const Vector6& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

double projected_gradient_norm(const Vector6& x, const Vector6& g, const Vector6& lower, const Vector6& upper) {
  return (x - project(x - g, lower, upper)).cwiseAbs().maxCoeff();
}

namespace {

// Solves A d = -g on the free block; false if A is not positive definite there.
bool newton_block(const Matrix6& a, const Vector6& g, const std::array<bool, 6>& free, Vector6& d) {
  int nf = 0;
  std::array<int, 6> idx{};
  for (int i = 0; i < 6; ++i)
    if (free[i]) idx[nf++] = i;
  if (nf == 0) return true;
  Eigen::MatrixXd sub(nf, nf);
  Eigen::VectorXd rhs(nf);
  for (int r = 0; r < nf; ++r) {
    rhs[r] = -g[idx[r]];
    for (int c = 0; c < nf; ++c) sub(r, c) = a(idx[r], idx[c]);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sub);
  if (llt.info() != Eigen::Success) return false;
  const Eigen::VectorXd sol = llt.solve(rhs);
  if (!sol.allFinite()) return false;
  for (int r = 0; r < nf; ++r) d[idx[r]] = sol[r];
  return true;
}

}  // namespace

NewtonResult projected_newton(const BoxProblem& problem, const Vector6& start, const NewtonOptions& options) {
  const Vector6& lo = problem.lower;
  const Vector6& hi = problem.upper;
  NewtonResult res;
  res.x = project(start, lo, hi);
  Matrix6 hess, model;
  Vector6 g;
  double f = problem.evaluate(res.x, g, hess, model);

  for (res.iterations = 0; res.iterations < options.maxIterations; ++res.iterations) {
    res.projectedGradient = projected_gradient_norm(res.x, g, lo, hi);
    if (!std::isfinite(f) || res.projectedGradient <= options.tol * (1.0 + std::abs(f))) {
      res.converged = std::isfinite(f);
      break;
    }
    const double eps = std::min(options.activeEps, res.projectedGradient);
    std::array<bool, 6> free{};
    for (int i = 0; i < 6; ++i) {
      const bool atLower = res.x[i] - lo[i] <= eps && g[i] > 0.0;
      const bool atUpper = hi[i] - res.x[i] <= eps && g[i] < 0.0;
      free[i] = !(atLower || atUpper);
    }

    Vector6 d = Vector6::Zero();
    bool ok = newton_block(hess, g, free, d);
    if (ok) {
      double slope = 0.0;
      for (int i = 0; i < 6; ++i)
        if (free[i]) slope += g[i] * d[i];
      ok = slope < 0.0;
    }
    if (!ok) {
      const double scale = std::max(model.diagonal().cwiseAbs().maxCoeff(), 1e-300);
      for (double tau = 1e-10 * scale; !ok && tau < 1e10 * scale; tau *= 100.0) {
        d.setZero();
        ok = newton_block(model + tau * Matrix6::Identity(), g, free, d);
      }
      if (!ok) {
        for (int i = 0; i < 6; ++i)
          if (free[i]) d[i] = -g[i] / scale;
      }
    }
    for (int i = 0; i < 6; ++i) {
      if (free[i]) continue;
      const double h = model(i, i) > 0.0 ? model(i, i) : std::max(std::abs(hess(i, i)), 1.0);
      d[i] = -g[i] / h;
    }

    // Armijo rule along the projection arc, with slack for rounding in f.
    const double slack = 1e-14 * (1.0 + std::abs(f));
    double step = 1.0;
    bool accepted = false;
    Vector6 xn;
    double fn = f;
    for (int k = 0; k < 60; ++k, step *= 0.5) {
      xn = project(res.x + step * d, lo, hi);
      fn = problem.value(xn);
      double predicted = 0.0;
      for (int i = 0; i < 6; ++i)
        predicted += free[i] ? -step * g[i] * d[i] : g[i] * (res.x[i] - xn[i]);
      if (std::isfinite(fn) && f - fn >= options.armijo * predicted - slack) {
        accepted = true;
        break;
      }
    }
    if (!accepted || xn == res.x) break;
    res.x = xn;
    f = problem.evaluate(res.x, g, hess, model);
  }
  res.value = f;
  res.grad = g;
  res.projectedGradient = projected_gradient_norm(res.x, g, lo, hi);
  if (!res.converged) res.converged = res.projectedGradient <= options.tol * (1.0 + std::abs(f));
  return res;
}

}  // namespace gzi
