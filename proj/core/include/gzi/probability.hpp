#pragma once

#include <functional>

#include <Eigen/Core>

#include "gzi/types.hpp"

namespace gzi {

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

/// Quote-dependent rate r(p, a, b) of a classical ZI model.
using QuoteRateFn = std::function<double(int p, int a, int b)>;

/// P(no order at the tick above the ask after t seconds) for an
/// immigration-death level with m initial orders, immigration kappa and
/// per-order death rho: e^{-(kappa/rho)(1-d)} (1-d)^m with d = e^{-rho t}.
/// Throws DomainError if rho <= 0, t < 0 or m < 0.
double omega(long m, double t, double kappa, double rho);

/// Same, with kappa and rho read at tick a+1 of the quotes (a, b).
double omega(int a, int b, double t, long m, const QuoteRateFn& kappa, const QuoteRateFn& rho);

/// (1 - e^{-rho t}) / rho, continuous at rho = 0.
double decay_integral(double rho, double t);

/// Jump probability of the generalized model for displayed size m (shares)
/// after t seconds.
double varpi(double m, double t, const Theta& theta);

/// The same probability written in the estimation coordinates.
double varpi_u(double m, double t, const Upsilon& u);

/// delta(m, t; u) with grad_u varpi = -delta * varpi. Component order is
/// (phi, gamma, lambda, beta, zeta, rho).
Vector6 grad_delta(double m, double t, const Upsilon& u);

/// H = d delta / d upsilon (symmetric). The second derivative of varpi is
/// varpi * (delta delta^T - H).
Matrix6 hessian_h(double m, double t, const Upsilon& u);

/// Second derivative of varpi_u with respect to upsilon.
Matrix6 varpi_hessian(double m, double t, const Upsilon& u);

Vector6 to_vector(const Upsilon& u);
Upsilon upsilon_from(const Vector6& v);
Vector6 to_vector(const Theta& t);
Theta theta_from(const Vector6& v);

}  // namespace gzi
