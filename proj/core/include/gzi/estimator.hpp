#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gzi/empirical.hpp"
#include "gzi/probability.hpp"
#include "gzi/types.hpp"

namespace gzi {

/// Usable samples in column form (m in shares, t in seconds, e in {0,1}).
struct SampleSet {
  std::vector<double> m;
  std::vector<double> t;
  std::vector<std::uint8_t> e;

  std::size_t size() const noexcept { return t.size(); }
  void push(double mShares, double dt, bool hit) {
    m.push_back(mShares);
    t.push_back(dt);
    e.push_back(hit ? 1 : 0);
  }
};

/// The first `cap` usable samples (all of them when cap is 0).
SampleSet usable_samples(const std::vector<JumpSample>& samples, std::size_t cap = 0);

/// Sum of squared residuals over usable samples. Throws Error when there are none.
double sse(const std::vector<JumpSample>& samples, const Theta& theta);
double sse(const SampleSet& samples, const Theta& theta);

/// Gradient and Hessian of the sum of squares with respect to upsilon.
struct SseDerivatives {
  double value = 0.0;
  Vector6 grad;
  Matrix6 hess;
};
SseDerivatives sse_derivatives(const SampleSet& samples, const Upsilon& u);

enum class FitStatus { Ok, Boundary, Error };
std::string to_string(FitStatus s);

struct FitDiagnostics {
  std::size_t sumE = 0;
  std::size_t nUsable = 0;
  double meanUpJump = 0.0;  ///< NaN when the samples carry no quote moves
  double meanSpread = 0.0;  ///< NaN when the samples carry no spreads
  double sse = 0.0;
  double projectedGradient = 0.0;
  double conditionNumber = 0.0;  ///< of the scaled outer-product matrix, NaN if not computed
  int solverIterations = 0;
  int startsTried = 0;
  int startsConverged = 0;
};

struct FitReport {
  Theta theta;
  Upsilon upsilon;
  std::array<double, 6> se{};  ///< NaN unless status is Ok
  std::array<std::string, 6> stars;
  Matrix6 cov = Matrix6::Zero();
  FitStatus status = FitStatus::Error;
  bool degenerate = false;  ///< all E equal
  FitDiagnostics diagnostics;
};

struct FitOptions {
  double upper = 1e4;
  int starts = 16;
  double tol = 1e-8;
  int maxIterations = 200;
  std::uint64_t seed = 1;
  std::size_t maxUsable = 0;     ///< 0 keeps every usable sample
  bool dropKappaRho = false;    ///< drop d kappa / d rho from the delta method
  double conditionLimit = 1e12;
  double boundaryTol = 1e-9;
  unsigned threads = 1;          ///< workers for the multi-start loop
};

/// Multi-start least-squares fit over the box [0, upper] in the coordinates
/// (phi, gamma, lambda, beta, eta, rho), which keeps zeta >= phi.
FitReport fit(const std::vector<JumpSample>& samples, const FitOptions& options = {});
FitReport fit(const SampleSet& samples, const FitOptions& options = {});

struct Covariance {
  Matrix6 mInverse;  ///< sum of varpi^2 delta delta^T
  Matrix6 m;
  Matrix6 a;
  Matrix6 covUpsilon;
  Matrix6 covTheta;
  double condition = 0.0;  ///< of mInverse after unit-diagonal scaling
  bool ok = false;
};

/// Jacobian of upsilon -> theta. With `dropKappaRho` set, the kappa/rho entry is 0.
Matrix6 upsilon_jacobian(const Upsilon& u, bool dropKappaRho = false);

Covariance covariance(const SampleSet& samples, const Upsilon& upsilonHat, bool dropKappaRho = false,
                      double conditionLimit = 1e12);

/// "", "*", "**", "***" from a two-sided normal test of estimate / se.
std::string significance_stars(double estimate, double se);

PkBins predicted_pk_curve(const std::vector<JumpSample>& samples, const Theta& theta, const PkOptions& options = {});

/// JSON object with estimates, errors, covariance, status and diagnostics.
std::string fit_report_json(const FitReport& report);
/// Text block: `kappa=0.79(0.05)***` per parameter, `SumE/n=...`, averages.
std::string fit_report_text(const FitReport& report, const std::string& title = "");

}  // namespace gzi
