#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gzi/estimator.hpp"
#include "gzi/model_spec.hpp"
#include "gzi/types.hpp"

namespace gzi {

struct McResult {
  double estimate = 0.0;
  double se = 0.0;  ///< sample standard deviation / sqrt(reps)
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
};

/// P(X_t = 0) for an immigration-death process started at m0, simulated event
/// by event with exponential clocks. Throws DomainError if rho <= 0.
McResult mc_immigration_death(long m0, double kappa, double rho, double t, std::uint64_t reps, std::uint64_t seed);

/// P(M = 0) for the order count one tick above the ask, summing its five
/// sources drawn exactly: survivors of the m / mu displayed orders after
/// alpha thinning and rho cancellation (binomial), surviving short-term
/// arrivals, long-term arrivals (cancelled at varrho when given), surviving
/// gamma injections (m = 0 only) and the eta injection at the up-jump.
/// theta.beta is ignored; the thinning comes from alpha and mu.
McResult mc_gzi_components(double m, double t, const Theta& theta, double mu, double alpha, std::uint64_t reps,
                           std::uint64_t seed, std::optional<double> varrho = std::nullopt);

/// |exact binomial probability - varpi| for the displayed-order part, in
/// closed form (beta = (1 - alpha) / mu).
double binomial_poisson_gap(double m, double t, const Theta& theta, double mu, double alpha);

/// Joint law of (m, dt) for synthetic samples: m = 0 with probability
/// zeroShare, else m = lotSize * (1 + Poisson(extraLots)); dt lognormal.
struct SyntheticDesign {
  double zeroShare = 0.35;
  double lotSize = 100.0;
  double extraLots = 2.0;
  double dtMedian = 0.5;
  double dtLogSd = 1.0;
};

/// n usable samples with E ~ Bernoulli(varpi(m, dt; theta)).
SampleSet synthetic_samples(const Theta& theta, std::size_t n, const SyntheticDesign& design, std::uint64_t seed);

enum class RecoveryMode { Synthetic, Engine };

struct RecoveryOptions {
  RecoveryMode mode = RecoveryMode::Synthetic;
  SyntheticDesign design;
  FitOptions fit;
  /// Engine mode: order flow whose implied parameters are theta0 (kappa,
  /// gamma, lambda, eta, rho and beta = (1 - alpha) / mu are overwritten).
  GziParams engine;
  int ticks = 200;
  std::uint64_t events = 2'000'000;
  std::uint64_t burnIn = 10'000;
  double level = 0.95;
  unsigned threads = 0;  ///< replication workers (0 = default)
};

struct RecoveryRep {
  std::uint64_t seed = 0;
  std::size_t nUsable = 0;
  FitStatus status = FitStatus::Error;
  Theta estimate;
  std::array<double, 6> se{};
  std::array<bool, 6> covered{};
};

struct RecoveryResult {
  Theta theta0;
  std::size_t nSamples = 0;
  std::vector<RecoveryRep> reps;
  std::array<double, 6> bias{};
  std::array<double, 6> rmse{};
  std::array<double, 6> medianAbsError{};
  std::array<double, 6> coverage{};  ///< over replications with status ok
  int ok = 0;
  int boundary = 0;
  int error = 0;
};

/// Fits `reps` independent replications at theta0 and aggregates bias,
/// RMSE, median absolute error and confidence-interval coverage. Fit
/// failures are counted, never thrown.
RecoveryResult recovery_study(const Theta& theta0, std::size_t nSamples, int reps, std::uint64_t seed,
                              const RecoveryOptions& options = {});

/// `rep,seed,n,status,<param>,<param>_se,<param>_hit...`
void write_recovery_csv(std::ostream& out, const RecoveryResult& r);
std::string recovery_json(const RecoveryResult& r);

/// One line of a validation suite.
struct OracleCheck {
  std::string label;
  double observed = 0.0;   ///< Monte-Carlo estimate or measured error
  double expected = 0.0;   ///< closed form, or 0 for error checks
  double se = 0.0;
  double tolerance = 0.0;  ///< allowed |observed - expected|
  bool pass = false;
};

/// Immigration-death oracle against the closed form on the grid
/// m in {0,1,5}, kappa in {0.5,2}, rho in {0.5,1}, t in {0.2,1}; 4 se.
std::vector<OracleCheck> prop2_suite(std::uint64_t reps, std::uint64_t seed, unsigned threads = 0);

/// Component oracle against varpi on 8 points (4 se plus the binomial gap),
/// plus gap <= 0.01 checks for the points in the small-survival regime.
std::vector<OracleCheck> component_suite(std::uint64_t reps, std::uint64_t seed, unsigned threads = 0);

/// Analytic gradient (tolerance 1e-5) and Hessian (1e-4) of varpi_u against
/// central differences at `points` random points, relative max-norm error.
std::vector<OracleCheck> derivative_suite(int points, std::uint64_t seed);

/// Formats checks as `label observed expected se tolerance PASS|FAIL` lines.
std::string format_checks(const std::vector<OracleCheck>& checks);

/// Simulates a GZI model and returns its askOnly jump samples.
std::vector<JumpSample> engine_samples(const ModelSpec& spec, std::uint64_t events, std::uint64_t burnIn,
                                       std::uint64_t seed);

}  // namespace gzi
