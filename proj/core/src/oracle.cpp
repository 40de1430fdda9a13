#include "gzi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include <boost/math/special_functions/erf.hpp>

#include "json.hpp"

#include "gzi/engine.hpp"
#include "gzi/error.hpp"
#include "gzi/format.hpp"
#include "gzi/l1.hpp"
#include "gzi/parallel.hpp"
#include "gzi/probability.hpp"
#include "gzi/rng.hpp"

namespace gzi {

namespace {

constexpr const char* kNames[6] = {"kappa", "gamma", "lambda", "beta", "eta", "rho"};

McResult bernoulli_result(std::uint64_t zeros, std::uint64_t reps, std::uint64_t seed) {
  McResult r;
  r.reps = reps;
  r.seed = seed;
  const double n = static_cast<double>(reps);
  r.estimate = static_cast<double>(zeros) / n;
  r.se = std::sqrt(r.estimate * (1.0 - r.estimate) / (n - 1.0));
  return r;
}

void check_reps(std::uint64_t reps) {
  if (reps < 1000) throw ConfigError("Monte-Carlo oracles need at least 1000 replications");
}

// True when no order arriving at `rate` on [0, t] outlives its exponential
// clock of `death` (death 0 = never cancelled).
bool no_survivor(double rate, double death, double t, Rng& rng) {
  if (rate <= 0.0) return true;
  for (double s = rng.exponential(rate); s < t; s += rng.exponential(rate)) {
    if (death <= 0.0 || rng.exponential(death) > t - s) return false;
  }
  return true;
}

}  // namespace

McResult mc_immigration_death(long m0, double kappa, double rho, double t, std::uint64_t reps, std::uint64_t seed) {
  if (!(rho > 0.0)) throw DomainError("immigration-death oracle needs rho > 0");
  if (m0 < 0 || kappa < 0.0 || !(t >= 0.0)) throw DomainError("immigration-death oracle needs m0, kappa, t >= 0");
  check_reps(reps);
  Rng rng(seed);
  std::uint64_t zeros = 0;
  for (std::uint64_t r = 0; r < reps; ++r) {
    long x = m0;
    double s = 0.0;
    for (;;) {
      const double rate = kappa + rho * static_cast<double>(x);
      if (rate <= 0.0) break;
      s += rng.exponential(rate);
      if (s > t) break;
      if (rng.uniform() * rate < kappa)
        ++x;
      else
        --x;
    }
    zeros += x == 0 ? 1 : 0;
  }
  return bernoulli_result(zeros, reps, seed);
}

McResult mc_gzi_components(double m, double t, const Theta& th, double mu, double alpha, std::uint64_t reps,
                           std::uint64_t seed, std::optional<double> varrho) {
  validate(th);
  if (!(mu > 0.0) || alpha < 0.0 || alpha > 1.0 || m < 0.0 || !(t >= 0.0))
    throw DomainError("component oracle needs mu > 0, alpha in [0,1], m >= 0, t >= 0");
  check_reps(reps);
  const auto orders = static_cast<long>(std::llround(m / mu));
  const double survive = (1.0 - alpha) * std::exp(-th.rho * t);
  const double longDeath = varrho.value_or(0.0);
  Rng rng(seed);
  std::uint64_t zeros = 0;
  for (std::uint64_t r = 0; r < reps; ++r) {
    bool empty = true;
    if (th.eta > 0.0) empty = std::poisson_distribution<long>(th.eta)(rng) == 0;
    if (empty && orders > 0) empty = std::binomial_distribution<long>(orders, survive)(rng) == 0;
    if (empty && m == 0.0 && th.gamma > 0.0) {
      const long injected = std::poisson_distribution<long>(th.gamma)(rng);
      for (long k = 0; k < injected && empty; ++k) empty = th.rho > 0.0 && rng.exponential(th.rho) <= t;
    }
    if (empty) empty = no_survivor(th.kappa, th.rho, t, rng);
    if (empty) empty = no_survivor(th.lambda, longDeath, t, rng);
    zeros += empty ? 1 : 0;
  }
  return bernoulli_result(zeros, reps, seed);
}

double binomial_poisson_gap(double m, double t, const Theta& th, double mu, double alpha) {
  const double orders = std::round(m / mu);
  const double q = (1.0 - alpha) * std::exp(-th.rho * t);
  Theta poisson = th;
  poisson.beta = (1.0 - alpha) / mu;
  const double approx = varpi(m, t, poisson);
  // Replace the Poisson zero-probability e^{-orders q} with the binomial one.
  const double exact = approx * std::exp(orders * (std::log1p(-q) + q));
  return std::abs(exact - approx);
}

SampleSet synthetic_samples(const Theta& theta, std::size_t n, const SyntheticDesign& d, std::uint64_t seed) {
  validate(theta);
  if (!(d.dtMedian > 0.0) || d.dtLogSd < 0.0 || d.zeroShare < 0.0 || d.zeroShare > 1.0 || !(d.lotSize > 0.0))
    throw ConfigError("invalid synthetic design");
  Rng rng(seed);
  std::normal_distribution<double> gauss(std::log(d.dtMedian), d.dtLogSd);
  std::poisson_distribution<long> lots(d.extraLots > 0.0 ? d.extraLots : 1.0);
  SampleSet s;
  s.m.reserve(n);
  s.t.reserve(n);
  s.e.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double m = 0.0;
    if (rng.uniform() >= d.zeroShare) m = d.lotSize * (1.0 + (d.extraLots > 0.0 ? static_cast<double>(lots(rng)) : 0.0));
    const double dt = std::exp(gauss(rng));
    s.push(m, dt, rng.uniform() < varpi(m, dt, theta));
  }
  return s;
}

std::vector<JumpSample> engine_samples(const ModelSpec& spec, std::uint64_t events, std::uint64_t burnIn,
                                       std::uint64_t seed) {
  SimOptions opt;
  opt.burnIn = burnIn;
  const SimTrace trace = simulate(spec, StopRule{events, 0.0}, seed, RecordMode::L1, opt);
  return extract_jumps(trace.records, JumpMode::AskOnly);
}

RecoveryResult recovery_study(const Theta& theta0, std::size_t nSamples, int reps, std::uint64_t seed,
                              const RecoveryOptions& o) {
  validate(theta0);
  if (reps < 1 || nSamples == 0) throw ConfigError("recovery study needs reps >= 1 and n >= 1");
  if (!(o.level > 0.0 && o.level < 1.0)) throw ConfigError("confidence level must lie in (0, 1)");
  const double z = std::sqrt(2.0) * boost::math::erf_inv(o.level);

  std::optional<ModelSpec> spec;
  if (o.mode == RecoveryMode::Engine) {
    GziParams p = o.engine;
    p.kappa = theta0.kappa;
    p.gamma = theta0.gamma;
    p.lambda = theta0.lambda;
    p.eta = theta0.eta;
    p.rho = theta0.rho;
    p.alpha = 1.0 - theta0.beta * p.mu;
    if (p.alpha < 0.0 || p.alpha > 1.0) throw ConfigError("beta * mu must lie in [0, 1] for engine recovery");
    spec = ModelSpec::gzi_model(o.ticks, p);
  }

  RecoveryResult res;
  res.theta0 = theta0;
  res.nSamples = nSamples;
  res.reps.resize(static_cast<std::size_t>(reps));
  const Vector6 truth = to_vector(theta0);

  parallel_for(
      res.reps.size(),
      [&](std::size_t i) {
        RecoveryRep& rep = res.reps[i];
        rep.seed = mix64(seed ^ mix64(i + 1));
        rep.se.fill(std::numeric_limits<double>::quiet_NaN());
        try {
          FitOptions fo = o.fit;
          fo.threads = 1;
          FitReport fr;
          if (spec) {
            fo.maxUsable = nSamples;
            fr = fit(engine_samples(*spec, o.events, o.burnIn, rep.seed), fo);
          } else {
            fr = fit(synthetic_samples(theta0, nSamples, o.design, rep.seed), fo);
          }
          rep.nUsable = fr.diagnostics.nUsable;
          rep.status = fr.status;
          rep.estimate = fr.theta;
          rep.se = fr.se;
          const Vector6 est = to_vector(fr.theta);
          for (int k = 0; k < 6; ++k)
            rep.covered[k] = fr.status == FitStatus::Ok && std::abs(est[k] - truth[k]) <= z * fr.se[k];
        } catch (const std::exception&) {
          rep.status = FitStatus::Error;
        }
      },
      o.threads);

  std::array<std::vector<double>, 6> absErr;
  std::array<double, 6> sum{}, sumSq{}, hits{};
  int counted = 0;
  for (const auto& rep : res.reps) {
    res.ok += rep.status == FitStatus::Ok;
    res.boundary += rep.status == FitStatus::Boundary;
    res.error += rep.status == FitStatus::Error;
    if (rep.nUsable == 0) continue;
    ++counted;
    const Vector6 est = to_vector(rep.estimate);
    for (int k = 0; k < 6; ++k) {
      const double err = est[k] - truth[k];
      sum[k] += err;
      sumSq[k] += err * err;
      absErr[k].push_back(std::abs(err));
      hits[k] += rep.covered[k] ? 1.0 : 0.0;
    }
  }
  for (int k = 0; k < 6; ++k) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    res.bias[k] = counted ? sum[k] / counted : nan;
    res.rmse[k] = counted ? std::sqrt(sumSq[k] / counted) : nan;
    res.coverage[k] = res.ok ? hits[k] / res.ok : nan;
    auto& v = absErr[k];
    if (v.empty()) {
      res.medianAbsError[k] = nan;
    } else {
      std::sort(v.begin(), v.end());
      const std::size_t h = v.size() / 2;
      res.medianAbsError[k] = v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
    }
  }
  return res;
}

void write_recovery_csv(std::ostream& out, const RecoveryResult& r) {
  out << "rep,seed,n,status";
  for (const char* name : kNames) out << ',' << name << ',' << name << "_se," << name << "_hit";
  out << '\n';
  for (std::size_t i = 0; i < r.reps.size(); ++i) {
    const auto& rep = r.reps[i];
    out << i << ',' << rep.seed << ',' << rep.nUsable << ',' << to_string(rep.status);
    const Vector6 est = to_vector(rep.estimate);
    for (int k = 0; k < 6; ++k) {
      out << ',' << format_double(est[k]) << ',' << (std::isfinite(rep.se[k]) ? format_double(rep.se[k]) : "") << ','
          << (rep.covered[k] ? 1 : 0);
    }
    out << '\n';
  }
}

std::string recovery_json(const RecoveryResult& r) {
  auto num = [](double v) -> nlohmann::ordered_json {
    if (!std::isfinite(v)) return nullptr;
    return v;
  };
  nlohmann::ordered_json j;
  j["n_samples"] = r.nSamples;
  j["reps"] = r.reps.size();
  j["ok"] = r.ok;
  j["boundary"] = r.boundary;
  j["error"] = r.error;
  const Vector6 truth = to_vector(r.theta0);
  for (int k = 0; k < 6; ++k) {
    j["parameters"][kNames[k]] = {{"true", num(truth[k])},
                                  {"bias", num(r.bias[k])},
                                  {"rmse", num(r.rmse[k])},
                                  {"median_abs_error", num(r.medianAbsError[k])},
                                  {"coverage", num(r.coverage[k])}};
  }
  return j.dump(2) + "\n";
}

}  // namespace gzi

namespace gzi {

namespace {

std::string fmt(double v) { return format_double(v); }

// Binomial standard error at the closed-form probability; unlike the sample
// version it does not vanish when a rare event is never observed.
double null_se(double p, std::uint64_t reps) { return std::sqrt(p * (1.0 - p) / static_cast<double>(reps)); }

}  // namespace

std::vector<OracleCheck> prop2_suite(std::uint64_t reps, std::uint64_t seed, unsigned threads) {
  struct Point {
    long m;
    double kappa, rho, t;
  };
  std::vector<Point> grid;
  for (long m : {0L, 1L, 5L})
    for (double kappa : {0.5, 2.0})
      for (double rho : {0.5, 1.0})
        for (double t : {0.2, 1.0}) grid.push_back({m, kappa, rho, t});
  std::vector<OracleCheck> out(grid.size());
  parallel_for(
      grid.size(),
      [&](std::size_t i) {
        const Point& p = grid[i];
        const McResult mc = mc_immigration_death(p.m, p.kappa, p.rho, p.t, reps, mix64(seed + i));
        OracleCheck& c = out[i];
        c.label = "prop2 m=" + std::to_string(p.m) + " kappa=" + fmt(p.kappa) + " rho=" + fmt(p.rho) + " t=" + fmt(p.t);
        c.observed = mc.estimate;
        c.expected = omega(p.m, p.t, p.kappa, p.rho);
        c.se = null_se(c.expected, reps);
        c.tolerance = 4.0 * c.se;
        c.pass = std::abs(c.observed - c.expected) <= c.tolerance;
      },
      threads);
  return out;
}

std::vector<OracleCheck> component_suite(std::uint64_t reps, std::uint64_t seed, unsigned threads) {
  struct Point {
    std::string name;
    double m, t;
    Theta theta;
    double mu, alpha;
  };
  const Theta xom{0.79, 0.58, 0.17, 0.024, 0.44, 1.13};
  const Theta msft{20.50, 2.15, 2.98, 0.15, 1.21, 7.99};
  const Theta mid{2.0, 0.5, 0.3, 0.0, 0.2, 1.0};
  const Theta fast{0.5, 1.0, 0.05, 0.0, 0.1, 2.0};
  const std::vector<Point> grid = {
      {"xom", 0.0, 0.5, xom, 1.0, 0.976},    {"xom", 100.0, 0.5, xom, 1.0, 0.976},
      {"xom", 50.0, 2.0, xom, 1.0, 0.976},   {"xom", 0.0, 3.0, xom, 1.0, 0.976},
      {"msft", 5.0, 0.1, msft, 1.0, 0.85},   {"mid", 500.0, 0.3, mid, 100.0, 0.5},
      {"mid", 0.0, 1.0, mid, 100.0, 0.5},    {"fast", 1000.0, 0.05, fast, 10.0, 0.9},
  };
  std::vector<OracleCheck> out(grid.size());
  parallel_for(
      grid.size(),
      [&](std::size_t i) {
        const Point& p = grid[i];
        Theta th = p.theta;
        th.beta = (1.0 - p.alpha) / p.mu;
        const McResult mc = mc_gzi_components(p.m, p.t, th, p.mu, p.alpha, reps, mix64(seed + 1000 + i));
        const double gap = binomial_poisson_gap(p.m, p.t, th, p.mu, p.alpha);
        OracleCheck& c = out[i];
        c.label = "varpi " + p.name + " m=" + fmt(p.m) + " t=" + fmt(p.t) + " mu=" + fmt(p.mu) + " alpha=" + fmt(p.alpha);
        c.observed = mc.estimate;
        c.expected = varpi(p.m, p.t, th);
        c.se = null_se(c.expected, reps);
        c.tolerance = 4.0 * c.se + gap;
        c.pass = std::abs(c.observed - c.expected) <= c.tolerance;
      },
      threads);
  for (const Point& p : grid) {
    Theta th = p.theta;
    th.beta = (1.0 - p.alpha) / p.mu;
    const double orders = p.m / p.mu;
    const double q = (1.0 - p.alpha) * std::exp(-th.rho * p.t);
    if (orders < 50.0 || q > 0.1) continue;
    OracleCheck c;
    c.label = "gap " + p.name + " m/mu=" + fmt(orders) + " q=" + format_fixed(q, 4);
    c.observed = binomial_poisson_gap(p.m, p.t, th, p.mu, p.alpha);
    c.tolerance = 0.01;
    c.pass = c.observed <= c.tolerance;
    out.push_back(c);
  }
  return out;
}

std::vector<OracleCheck> derivative_suite(int points, std::uint64_t seed) {
  Rng rng(seed);
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
  std::vector<OracleCheck> out;
  for (int k = 0; k < points; ++k) {
    const double m = k % 3 == 0 ? 0.0 : std::floor(uni(1.0, 300.0));
    const double t = uni(0.02, 3.0);
    const double phi = uni(0.05, 2.0);
    const Upsilon u{phi, uni(0.05, 2.0), uni(0.01, 1.0), uni(0.001, 0.02), phi + uni(0.05, 1.0), uni(0.1, 3.0)};
    const Vector6 x = to_vector(u);
    auto f = [&](const Vector6& v) { return varpi_u(m, t, upsilon_from(v)); };

    const Vector6 delta = grad_delta(m, t, u);
    const Vector6 grad = -delta * varpi_u(m, t, u);
    // Steps shrink with the sensitivity of the exponent (m beta can be large).
    Vector6 step;
    for (int i = 0; i < 6; ++i) step[i] = std::max(1.0, std::abs(x[i])) / std::max(1.0, std::abs(delta[i]));
    Vector6 fd;
    for (int i = 0; i < 6; ++i) {
      const double h = 1e-5 * step[i];
      Vector6 xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      fd[i] = (f(xp) - f(xm)) / (2.0 * h);
    }
    const double gErr = (fd - grad).cwiseAbs().maxCoeff() / grad.cwiseAbs().maxCoeff();

    const Matrix6 hess = varpi_hessian(m, t, u);
    Matrix6 fdh;
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        const double hi = 1e-4 * step[i];
        const double hj = 1e-4 * step[j];
        Vector6 pp = x, pm = x, mp = x, mm = x;
        pp[i] += hi, pp[j] += hj;
        pm[i] += hi, pm[j] -= hj;
        mp[i] -= hi, mp[j] += hj;
        mm[i] -= hi, mm[j] -= hj;
        fdh(i, j) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * hi * hj);
      }
    }
    const double hErr = (fdh - hess).cwiseAbs().maxCoeff() / hess.cwiseAbs().maxCoeff();

    const std::string where = " m=" + fmt(m) + " t=" + format_fixed(t, 4);
    out.push_back({"gradient" + where, gErr, 0.0, 0.0, 1e-5, gErr <= 1e-5});
    out.push_back({"hessian" + where, hErr, 0.0, 0.0, 1e-4, hErr <= 1e-4});
  }
  return out;
}

std::string format_checks(const std::vector<OracleCheck>& checks) {
  std::string s;
  for (const auto& c : checks) {
    s += c.label + " observed=" + fmt(c.observed) + " expected=" + fmt(c.expected) + " se=" + fmt(c.se) +
         " tol=" + fmt(c.tolerance) + (c.pass ? " PASS" : " FAIL") + "\n";
  }
  return s;
}

}  // namespace gzi
