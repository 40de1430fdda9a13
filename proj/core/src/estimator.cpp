#include "gzi/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "gzi/error.hpp"
#include "gzi/optimizer.hpp"
#include "gzi/parallel.hpp"
#include "gzi/rng.hpp"

namespace gzi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Estimation coordinates x = (phi, gamma, lambda, beta, eta, rho).
Upsilon upsilon_of_x(const Vector6& x) { return {x[0], x[1], x[2], x[3], x[0] + x[4], x[5]}; }

double sse_x(const SampleSet& s, const Vector6& x) {
  const double phi = x[0], gamma = x[1], lambda = x[2], beta = x[3], eta = x[4], rho = x[5];
  double f = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double t = s.t[i], m = s.m[i];
    const double e = std::exp(-rho * t);
    const double ind = m == 0.0 ? 1.0 : 0.0;
    const double w = std::exp(-(eta + phi * -std::expm1(-rho * t) + gamma * ind * e + lambda * t + m * beta * e));
    const double r = s.e[i] - w;
    f += r * r;
  }
  return f;
}

// Value, gradient, Hessian and Gauss-Newton matrix in x coordinates. The
// Hessian of varpi is varpi (delta delta^T - H) in both coordinate systems.
double evaluate_x(const SampleSet& s, const Vector6& x, Vector6& grad, Matrix6& hess, Matrix6& model) {
  const double phi = x[0], gamma = x[1], lambda = x[2], beta = x[3], eta = x[4], rho = x[5];
  double f = 0.0;
  std::array<double, 6> g{};
  std::array<double, 21> outer{};  // weighted by 2w(w - r)
  std::array<double, 21> gn{};     // weighted by 2w^2
  double h05 = 0.0, h15 = 0.0, h35 = 0.0, h55 = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double t = s.t[i], m = s.m[i];
    const double e = std::exp(-rho * t);
    const double oneMinusE = -std::expm1(-rho * t);
    const double ind = m == 0.0 ? 1.0 : 0.0;
    const double c = phi - ind * gamma - m * beta;
    const double w = std::exp(-(eta + phi * oneMinusE + gamma * ind * e + lambda * t + m * beta * e));
    const double r = s.e[i] - w;
    f += r * r;
    const double te = t * e;
    const double d[6] = {oneMinusE, ind * e, t, m * e, 1.0, te * c};
    const double rw2 = 2.0 * r * w;
    const double ww2 = 2.0 * w * w;
    const double full = ww2 - rw2;
    int k = 0;
    for (int a = 0; a < 6; ++a) {
      g[a] += rw2 * d[a];
      for (int b = a; b < 6; ++b, ++k) {
        const double p = d[a] * d[b];
        outer[k] += full * p;
        gn[k] += ww2 * p;
      }
    }
    h05 += rw2 * te;
    h15 -= rw2 * ind * te;
    h35 -= rw2 * m * te;
    h55 -= rw2 * t * te * c;
  }
  int k = 0;
  for (int a = 0; a < 6; ++a) {
    grad[a] = g[a];
    for (int b = a; b < 6; ++b, ++k) {
      hess(a, b) = hess(b, a) = outer[k];
      model(a, b) = model(b, a) = gn[k];
    }
  }
  hess(0, 5) += h05;
  hess(5, 0) += h05;
  hess(1, 5) += h15;
  hess(5, 1) += h15;
  hess(3, 5) += h35;
  hess(5, 3) += h35;
  hess(5, 5) += h55;
  return f;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return kNaN;
  const auto k = static_cast<std::size_t>(q * static_cast<double>(v.size() - 1));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

// Scales of the start box: rates by 1/median dt, beta by 1/median positive m.
Vector6 start_scales(const SampleSet& s) {
  std::vector<double> mPos;
  for (double m : s.m)
    if (m > 0.0) mPos.push_back(m);
  const double tMed = quantile(s.t, 0.5);
  const double mMed = mPos.empty() ? 1.0 : quantile(mPos, 0.5);
  const double rate = tMed > 0.0 ? 1.0 / tMed : 1.0;
  Vector6 scale;
  scale << 1.0, 1.0, rate, 1.0 / std::max(mMed, 1.0), 1.0, rate;
  return scale;
}

// Rough moments: short-gap jump frequencies give eta + gamma and eta + m beta,
// the decay of the frequency over long gaps gives lambda.
Vector6 moment_start(const SampleSet& s, const Vector6& scale, double upper) {
  std::vector<double> t0, tPos;
  for (std::size_t i = 0; i < s.size(); ++i) (s.m[i] == 0.0 ? t0 : tPos).push_back(s.t[i]);
  auto freq = [&](bool zeroGroup, double tLo, double tHi) {
    double hits = 0.0, n = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if ((s.m[i] == 0.0) != zeroGroup || s.t[i] < tLo || s.t[i] > tHi) continue;
      hits += s.e[i];
      n += 1.0;
    }
    return n > 0.0 ? std::clamp(hits / n, 1e-3, 0.999) : 0.5;
  };
  const double inf = std::numeric_limits<double>::infinity();
  const double p0 = t0.empty() ? 0.5 : freq(true, 0.0, quantile(t0, 0.2));
  const double c0 = -std::log(p0);
  const double eta = 0.5 * c0, gamma = 0.5 * c0;
  double lambda = 0.1 * scale[2];
  if (!t0.empty()) {
    const double tHi = quantile(t0, 0.8);
    const double pHi = freq(true, tHi, inf);
    if (tHi > 0.0) lambda = std::max(1e-3 * scale[2], (-std::log(pHi) - eta) / tHi);
  }
  double beta = scale[3];
  if (!tPos.empty()) {
    const double pPos = freq(false, 0.0, quantile(tPos, 0.2));
    beta = std::max(1e-3 * scale[3], (-std::log(pPos) - eta) * scale[3]);
  }
  Vector6 x;
  x << 0.5, gamma, lambda, beta, eta, scale[5];
  return x.cwiseMax(Vector6::Constant(1e-4)).cwiseMin(Vector6::Constant(upper));
}

FitDiagnostics sample_diagnostics(const std::vector<JumpSample>& samples, std::size_t cap) {
  FitDiagnostics d;
  double up = 0.0, spread = 0.0;
  for (const auto& s : samples) {
    if (!s.usable) continue;
    if (cap && d.nUsable == cap) break;
    ++d.nUsable;
    up += s.askMove;
    spread += s.spread;
  }
  d.meanUpJump = d.nUsable ? up / static_cast<double>(d.nUsable) : kNaN;
  d.meanSpread = d.nUsable ? spread / static_cast<double>(d.nUsable) : kNaN;
  return d;
}

}  // namespace

SampleSet usable_samples(const std::vector<JumpSample>& samples, std::size_t cap) {
  SampleSet out;
  for (const auto& s : samples) {
    if (!s.usable) continue;
    if (cap && out.size() == cap) break;
    out.push(s.mShares, s.dt, s.e);
  }
  return out;
}

double sse(const SampleSet& samples, const Theta& theta) {
  if (samples.size() == 0) throw Error("no usable samples");
  validate(theta);
  double f = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double r = samples.e[i] - varpi(samples.m[i], samples.t[i], theta);
    f += r * r;
  }
  return f;
}

double sse(const std::vector<JumpSample>& samples, const Theta& theta) { return sse(usable_samples(samples), theta); }

SseDerivatives sse_derivatives(const SampleSet& samples, const Upsilon& u) {
  SseDerivatives out;
  out.grad.setZero();
  out.hess.setZero();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double w = varpi_u(samples.m[i], samples.t[i], u);
    const double r = samples.e[i] - w;
    const Vector6 d = grad_delta(samples.m[i], samples.t[i], u);
    const Matrix6 h = hessian_h(samples.m[i], samples.t[i], u);
    out.value += r * r;
    out.grad += 2.0 * r * w * d;
    out.hess += 2.0 * w * w * d * d.transpose() - 2.0 * r * w * (d * d.transpose() - h);
  }
  return out;
}

std::string to_string(FitStatus s) {
  switch (s) {
    case FitStatus::Ok: return "ok";
    case FitStatus::Boundary: return "n/a";
    case FitStatus::Error: return "err";
  }
  return "err";
}

Matrix6 upsilon_jacobian(const Upsilon& u, bool dropKappaRho) {
  Matrix6 j = Matrix6::Identity();
  j(0, 0) = u.rho;
  j(0, 5) = dropKappaRho ? 0.0 : u.phi;
  j(4, 0) = -1.0;
  j(4, 4) = 1.0;
  return j;
}

Covariance covariance(const SampleSet& samples, const Upsilon& uHat, bool dropKappaRho, double conditionLimit) {
  Covariance c;
  c.mInverse.setZero();
  c.a.setZero();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double w = varpi_u(samples.m[i], samples.t[i], uHat);
    const Vector6 d = grad_delta(samples.m[i], samples.t[i], uHat);
    const Matrix6 dd = w * w * d * d.transpose();
    c.mInverse += dd;
    c.a += w * (1.0 - w) * dd;
  }
  c.m.setZero();
  c.covUpsilon.setZero();
  c.covTheta.setZero();
  c.condition = std::numeric_limits<double>::infinity();
  const Vector6 diag = c.mInverse.diagonal();
  if ((diag.array() <= 0.0).any() || !c.mInverse.allFinite()) return c;
  const Vector6 inv = diag.cwiseSqrt().cwiseInverse();
  const Matrix6 scaled = inv.asDiagonal() * c.mInverse * inv.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix6> eig(scaled);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (lo > 0.0) c.condition = hi / lo;
  if (!(c.condition <= conditionLimit)) return c;
  // Invert through the well-scaled matrix.
  const Matrix6 scaledInv = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
                            eig.eigenvectors().transpose();
  c.m = inv.asDiagonal() * scaledInv * inv.asDiagonal();
  c.covUpsilon = c.m * c.a * c.m;
  c.covUpsilon = 0.5 * (c.covUpsilon + c.covUpsilon.transpose()).eval();
  const Matrix6 j = upsilon_jacobian(uHat, dropKappaRho);
  c.covTheta = j * c.covUpsilon * j.transpose();
  c.covTheta = 0.5 * (c.covTheta + c.covTheta.transpose()).eval();
  c.ok = c.covTheta.allFinite();
  return c;
}

std::string significance_stars(double estimate, double se) {
  if (!(se > 0.0) || !std::isfinite(estimate)) return "";
  const double p = std::erfc(std::abs(estimate) / se / std::sqrt(2.0));
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

namespace {

FitReport fit_impl(const SampleSet& s, FitDiagnostics diag, const FitOptions& o) {
  if (s.size() == 0) throw Error("no usable samples");
  if (!(o.upper > 0.0) || o.starts < 1 || !(o.tol > 0.0)) throw ConfigError("invalid fit options");
  FitReport rep;
  for (auto v : s.e) diag.sumE += v;
  diag.nUsable = s.size();
  rep.degenerate = diag.sumE == 0 || diag.sumE == s.size();

  BoxProblem problem;
  problem.value = [&](const Vector6& x) { return sse_x(s, x); };
  problem.evaluate = [&](const Vector6& x, Vector6& g, Matrix6& h, Matrix6& m) { return evaluate_x(s, x, g, h, m); };
  problem.lower = Vector6::Zero();
  problem.upper = Vector6::Constant(o.upper);

  const Vector6 scale = start_scales(s);
  std::vector<Vector6> starts;
  starts.push_back(moment_start(s, scale, o.upper));
  Rng rng(o.seed, 0x5EED);
  while (static_cast<int>(starts.size()) < o.starts) {
    Vector6 x;
    for (int i = 0; i < 6; ++i) x[i] = std::min(o.upper, scale[i] * std::exp(std::log(1e-2) + rng.uniform() * std::log(1e3)));
    starts.push_back(x);
  }

  NewtonOptions no;
  no.tol = o.tol;
  no.maxIterations = o.maxIterations;
  std::vector<NewtonResult> results(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) { results[i] = projected_newton(problem, starts[i], no); }, o.threads);

  std::size_t best = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    diag.solverIterations += results[i].iterations;
    diag.startsConverged += results[i].converged ? 1 : 0;
    if (results[i].value < results[best].value) best = i;
  }
  diag.startsTried = static_cast<int>(results.size());
  NewtonResult r = results[best];
  if (rep.degenerate) {
    // S is strictly monotone in eta when all E agree (decreasing for E = 0,
    // increasing for E = 1), so the minimum over the box has eta on a bound.
    // Vanishing gradients can stop the solver short of it.
    r.x[4] = diag.sumE == 0 ? o.upper : 0.0;
    r.value = sse_x(s, r.x);
  }
  diag.sse = r.value;
  diag.projectedGradient = r.projectedGradient;
  diag.conditionNumber = kNaN;

  rep.upsilon = upsilon_of_x(r.x);
  rep.theta = {r.x[0] * r.x[5], r.x[1], r.x[2], r.x[3], r.x[4], r.x[5]};
  rep.se.fill(kNaN);
  rep.stars.fill("");

  bool boundary = false;
  for (int i = 0; i < 6; ++i)
    boundary = boundary || r.x[i] <= o.boundaryTol || r.x[i] >= o.upper * (1.0 - o.boundaryTol);

  if (rep.degenerate) {
    rep.status = FitStatus::Boundary;
  } else if (diag.startsConverged == 0) {
    rep.status = FitStatus::Error;
  } else if (boundary) {
    rep.status = FitStatus::Boundary;
  } else {
    const Covariance c = covariance(s, rep.upsilon, o.dropKappaRho, o.conditionLimit);
    diag.conditionNumber = c.condition;
    if (!c.ok) {
      rep.status = FitStatus::Error;
    } else {
      rep.status = FitStatus::Ok;
      rep.cov = c.covTheta;
      const Vector6 est = to_vector(rep.theta);
      for (int i = 0; i < 6; ++i) {
        rep.se[i] = std::sqrt(std::max(0.0, c.covTheta(i, i)));
        rep.stars[i] = significance_stars(est[i], rep.se[i]);
      }
    }
  }
  rep.diagnostics = diag;
  return rep;
}

}  // namespace

FitReport fit(const SampleSet& samples, const FitOptions& options) {
  FitDiagnostics d;
  d.meanUpJump = kNaN;
  d.meanSpread = kNaN;
  if (options.maxUsable && samples.size() > options.maxUsable) {
    SampleSet head;
    for (std::size_t i = 0; i < options.maxUsable; ++i) head.push(samples.m[i], samples.t[i], samples.e[i]);
    return fit_impl(head, d, options);
  }
  return fit_impl(samples, d, options);
}

FitReport fit(const std::vector<JumpSample>& samples, const FitOptions& options) {
  return fit_impl(usable_samples(samples, options.maxUsable), sample_diagnostics(samples, options.maxUsable), options);
}

PkBins predicted_pk_curve(const std::vector<JumpSample>& samples, const Theta& theta, const PkOptions& options) {
  return bin_pk(samples, theta, options);
}

}  // namespace gzi
