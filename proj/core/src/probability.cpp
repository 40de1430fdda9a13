#include "gzi/probability.hpp"

#include <cmath>

#include "gzi/error.hpp"

namespace gzi {

double decay_integral(double rho, double t) {
  const double x = rho * t;
  if (std::abs(x) < 1e-8) return t * (1.0 - 0.5 * x);
  return -std::expm1(-x) / rho;
}

double omega(long m, double t, double kappa, double rho) {
  if (!(rho > 0.0)) throw DomainError("omega needs a positive cancellation rate");
  if (!(t >= 0.0) || m < 0 || kappa < 0.0) throw DomainError("omega needs t >= 0, m >= 0, kappa >= 0");
  const double oneMinusD = -std::expm1(-rho * t);
  const double poissonPart = std::exp(-kappa * decay_integral(rho, t));
  if (m == 0) return poissonPart;
  return poissonPart * std::pow(oneMinusD, static_cast<double>(m));
}

double omega(int a, int b, double t, long m, const QuoteRateFn& kappa, const QuoteRateFn& rho) {
  return omega(m, t, kappa(a + 1, a, b), rho(a + 1, a, b));
}

double varpi(double m, double t, const Theta& th) {
  const double e = std::exp(-th.rho * t);
  const double ind = m == 0.0 ? 1.0 : 0.0;
  const double expo = th.kappa * decay_integral(th.rho, t) + th.gamma * ind * e + th.lambda * t +
                      m * th.beta * e + th.eta;
  return std::exp(-expo);
}

double varpi_u(double m, double t, const Upsilon& u) {
  const double e = std::exp(-u.rho * t);
  const double ind = m == 0.0 ? 1.0 : 0.0;
  // zeta - phi*e = eta + phi*(1-e); the second form avoids cancellation.
  const double expo =
      (u.zeta - u.phi) + u.phi * -std::expm1(-u.rho * t) + u.gamma * ind * e + u.lambda * t + m * u.beta * e;
  return std::exp(-expo);
}

Vector6 grad_delta(double m, double t, const Upsilon& u) {
  const double e = std::exp(-u.rho * t);
  const double ind = m == 0.0 ? 1.0 : 0.0;
  Vector6 d;
  d << -e, ind * e, t, m * e, 1.0, t * e * (u.phi - ind * u.gamma - m * u.beta);
  return d;
}

Matrix6 hessian_h(double m, double t, const Upsilon& u) {
  const double te = t * std::exp(-u.rho * t);
  const double ind = m == 0.0 ? 1.0 : 0.0;
  Matrix6 h = Matrix6::Zero();
  h(0, 5) = h(5, 0) = te;
  h(1, 5) = h(5, 1) = -ind * te;
  h(3, 5) = h(5, 3) = -m * te;
  h(5, 5) = -t * te * (u.phi - ind * u.gamma - m * u.beta);
  return h;
}

Matrix6 varpi_hessian(double m, double t, const Upsilon& u) {
  const Vector6 d = grad_delta(m, t, u);
  return varpi_u(m, t, u) * (d * d.transpose() - hessian_h(m, t, u));
}

Vector6 to_vector(const Upsilon& u) {
  Vector6 v;
  v << u.phi, u.gamma, u.lambda, u.beta, u.zeta, u.rho;
  return v;
}

Upsilon upsilon_from(const Vector6& v) { return {v[0], v[1], v[2], v[3], v[4], v[5]}; }

Vector6 to_vector(const Theta& t) {
  Vector6 v;
  v << t.kappa, t.gamma, t.lambda, t.beta, t.eta, t.rho;
  return v;
}

Theta theta_from(const Vector6& v) { return {v[0], v[1], v[2], v[3], v[4], v[5]}; }

}  // namespace gzi
