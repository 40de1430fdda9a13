#pragma once

#include <functional>

#include "gzi/probability.hpp"

namespace gzi {

/// Smooth objective on a box in R^6.
struct BoxProblem {
  /// Objective value only (used by the line search).
  std::function<double(const Vector6& x)> value;
  /// Value, gradient, exact Hessian and a positive semidefinite model
  /// Hessian used when the exact one is not positive definite.
  std::function<double(const Vector6& x, Vector6& grad, Matrix6& hess, Matrix6& model)> evaluate;
  Vector6 lower = Vector6::Zero();
  Vector6 upper = Vector6::Constant(1e4);
};

struct NewtonOptions {
  double tol = 1e-8;       ///< stop when |x - P(x - g)|_inf <= tol (1 + |f|)
  int maxIterations = 200;
  double armijo = 1e-4;
  double activeEps = 1e-3; ///< cap of the epsilon-active set width
};

struct NewtonResult {
  Vector6 x;
  double value = 0.0;
  Vector6 grad;
  double projectedGradient = 0.0;
  int iterations = 0;
  bool converged = false;
};

Vector6 project(const Vector6& x, const Vector6& lower, const Vector6& upper);
double projected_gradient_norm(const Vector6& x, const Vector6& g, const Vector6& lower, const Vector6& upper);

/// Projected Newton method with an epsilon-active set and an Armijo search
/// along the projection arc (Bertsekas 1982). Free variables take a Newton
/// step on the exact Hessian when it is positive definite there, otherwise on
/// the damped model Hessian; active variables take a diagonally scaled
/// gradient step.
NewtonResult projected_newton(const BoxProblem& problem, const Vector6& start, const NewtonOptions& options = {});

}  // namespace gzi
