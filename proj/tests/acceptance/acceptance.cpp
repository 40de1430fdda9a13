// Acceptance criteria. Usage: acceptance [criterion...]; no argument runs all.
// Prints one [PASS]/[FAIL] line per criterion and exits non-zero on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gzi/empirical.hpp"
#include "gzi/estimator.hpp"
#include "gzi/l1.hpp"
#include "gzi/oracle.hpp"
#include "gzi/probability.hpp"
#include "gzi/rng.hpp"

#ifdef GZI_HAVE_CLI
#include "cli.hpp"
#endif

using namespace gzi;

namespace {

const Theta kXom{0.79, 0.58, 0.17, 0.024, 0.44, 1.13};
const char* kNames[] = {"kappa", "gamma", "lambda", "beta", "eta", "rho"};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

void info(const std::string& line) { std::cout << "  " << line << "\n"; }

Outcome suite_outcome(const std::vector<OracleCheck>& checks) {
  int failed = 0;
  double worst = 0.0;
  for (const auto& c : checks) {
    failed += c.pass ? 0 : 1;
    if (c.tolerance > 0.0) worst = std::max(worst, std::abs(c.observed - c.expected) / c.tolerance);
    if (!c.pass) info("failed: " + c.label);
  }
  return {failed == 0, std::to_string(checks.size() - failed) + "/" + std::to_string(checks.size()) +
                           " checks, worst |error|/tolerance " + fmt("%.3g", worst)};
}

Outcome criterion1() { return suite_outcome(prop2_suite(100000, 20240101)); }

Outcome criterion2() { return suite_outcome(component_suite(100000, 20240102)); }

Outcome criterion3() {
  const auto checks = derivative_suite(20, 20240103);
  Outcome o = suite_outcome(checks);

  // The printed form -varpi (H' + delta delta^T), where H' flips the sign of
  // the last diagonal entry, for comparison only.
  Rng rng(7);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Upsilon u{0.2 + rng.uniform(), 0.1 + rng.uniform(), 0.05 + 0.3 * rng.uniform(), 0.01 + 0.03 * rng.uniform(),
                    0.0, 0.3 + 1.5 * rng.uniform()};
    Upsilon v = u;
    v.zeta = u.phi + 0.1 + rng.uniform();
    const double m = rng.uniform() < 0.3 ? 0.0 : std::floor(1 + 300 * rng.uniform());
    const double t = 0.05 + 3 * rng.uniform();
    Matrix6 hp = hessian_h(m, t, v);
    hp(5, 5) = -hp(5, 5);
    const Vector6 d = grad_delta(m, t, v);
    const Matrix6 printed = -varpi_u(m, t, v) * (hp + d * d.transpose());
    const Matrix6 exact = varpi_hessian(m, t, v);
    worst = std::max(worst, (printed - exact).cwiseAbs().maxCoeff() / std::max(1e-300, exact.cwiseAbs().maxCoeff()));
  }
  info("informational: relative residual of the printed Hessian form " + fmt("%.3g", worst));
  return o;
}

Outcome criterion4() {
  const SampleSet s = synthetic_samples(kXom, 100000, {}, 20240104);
  const FitReport rep = fit(s);
  const auto d = sse_derivatives(s, rep.upsilon);
  Eigen::SelfAdjointEigenSolver<Matrix6> eig(d.hess);
  const double minEig = eig.eigenvalues().minCoeff();
  const double trace = d.hess.trace();
  info("fit status " + to_string(rep.status) + ", projected gradient " + fmt("%.3g", rep.diagnostics.projectedGradient));
  return {minEig >= -1e-6 * trace,
          "min eigenvalue " + fmt("%.6g", minEig) + ", trace " + fmt("%.6g", trace) + ", ratio " + fmt("%.3g", minEig / trace)};
}

Outcome criterion5() {
  bool pass = true;
  const SampleSet s = synthetic_samples(kXom, 500000, {}, 20240105);
  const FitReport rep = fit(s);
  const Vector6 est = to_vector(rep.theta), truth = to_vector(kXom);
  std::ostringstream d;
  if (rep.status != FitStatus::Ok) {
    pass = false;
    d << "n=5e5 fit status " << to_string(rep.status) << "; ";
  } else {
    double worst = 0.0;
    for (int i = 0; i < 6; ++i) {
      const double z = std::abs(est[i] - truth[i]) / rep.se[i];
      worst = std::max(worst, z);
      info(std::string(kNames[i]) + " " + fmt("%.5f", est[i]) + " se " + fmt("%.5f", rep.se[i]) + " |z| " + fmt("%.2f", z));
    }
    pass = worst <= 3.0;
    d << "n=5e5 max |error|/se " << fmt("%.2f", worst) << "; ";
  }

  const std::vector<std::size_t> ns = {10000, 100000, 500000};
  std::vector<RecoveryResult> studies;
  for (std::size_t n : ns) {
    studies.push_back(recovery_study(kXom, n, 3, 20240106));
    std::string line = "n=" + std::to_string(n) + " median abs error:";
    for (int i = 0; i < 6; ++i) line += " " + fmt("%.4g", studies.back().medianAbsError[i]);
    line += " (ok " + std::to_string(studies.back().ok) + ", n/a " + std::to_string(studies.back().boundary) + ", err " +
            std::to_string(studies.back().error) + ")";
    info(line);
  }
  bool monotone = true;
  for (int i = 0; i < 6; ++i)
    for (std::size_t k = 1; k < studies.size(); ++k)
      if (studies[k].medianAbsError[i] > studies[k - 1].medianAbsError[i]) {
        monotone = false;
        info(std::string("median abs error of ") + kNames[i] + " increases at n=" + std::to_string(ns[k]));
      }
  d << "median abs error non-increasing: " << (monotone ? "yes" : "no");
  return {pass && monotone, d.str()};
}

Outcome criterion6() {
  const RecoveryResult r = recovery_study(kXom, 100000, 50, 20240107);
  bool pass = r.ok > 0;
  std::string d = "ok " + std::to_string(r.ok) + "/50 (n/a " + std::to_string(r.boundary) + ", err " +
                  std::to_string(r.error) + "); coverage";
  for (int i = 0; i < 6; ++i) {
    d += std::string(" ") + kNames[i] + "=" + fmt("%.2f", r.coverage[i]);
    pass = pass && r.coverage[i] >= 0.88 && r.coverage[i] <= 0.99;
  }
  return {pass, d};
}

Outcome criterion7() {
  GziParams g;
  g.theta = 1.0;
  g.kappa = kXom.kappa;
  g.rho = kXom.rho;
  g.lambda = kXom.lambda;
  g.varrho = 0.01;
  g.eta = kXom.eta;
  g.gamma = kXom.gamma;
  g.mu = 1.0;
  g.alpha = 1.0 - kXom.beta * g.mu;
  const ModelSpec spec = ModelSpec::gzi_model(200, g);
  const Theta theta0 = g.theta_params();
  const auto samples = engine_samples(spec, 50'000'000, 10'000, 20240108);

  const PkBins bins = bin_pk(samples, theta0);
  int populated = 0, inside = 0;
  for (const auto& grp : bins.groups)
    for (const auto& b : grp.bins) {
      ++populated;
      const double p = b.predicted;
      const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(b.count));
      if (std::abs(b.freq - p) <= 3.0 * sigma) ++inside;
    }
  const double share = populated ? static_cast<double>(inside) / populated : 0.0;

  const FitReport rep = fit(samples);
  bool fitOk = rep.status == FitStatus::Ok;
  const Vector6 est = to_vector(rep.theta), truth = to_vector(theta0);
  std::string zs;
  for (int i = 0; i < 6; ++i) {
    const double z = std::abs(est[i] - truth[i]) / rep.se[i];
    const double limit = (i == 2 || i == 3) ? 5.0 : 3.0;
    fitOk = fitOk && z <= limit;
    zs += std::string(" ") + kNames[i] + "=" + fmt("%.2f", z);
    info(std::string(kNames[i]) + " " + fmt("%.5f", est[i]) + " se " + fmt("%.5f", rep.se[i]) + " true " +
         fmt("%.5f", truth[i]));
  }
  info("usable samples " + std::to_string(rep.diagnostics.nUsable) + ", fit status " + to_string(rep.status));
  return {share >= 0.95 && fitOk, std::to_string(inside) + "/" + std::to_string(populated) +
                                      " bins within 3 sigma; |error|/se" + zs};
}

Outcome criterion8() {
  // Jump probability constant in (m, t): kappa, gamma, lambda and beta are
  // zero, so their estimates end on the lower bound.
  Theta flat{};
  flat.eta = 0.44;
  flat.rho = 1.13;
  const FitReport boundary = fit(synthetic_samples(flat, 20000, {}, 20240109));

  // Only m = 0 samples: the phi, gamma and eta columns of the design are
  // linearly dependent and beta does not enter at all.
  SyntheticDesign design;
  design.zeroShare = 1.0;
  const FitReport collinear = fit(synthetic_samples(kXom, 20000, design, 20240110));

  const bool pass = boundary.status == FitStatus::Boundary && collinear.status == FitStatus::Error;
  info("collinear condition number " + fmt("%.3g", collinear.diagnostics.conditionNumber));
  return {pass, "boundary problem -> " + to_string(boundary.status) + ", collinear set -> " + to_string(collinear.status)};
}

#ifdef GZI_HAVE_CLI
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion9() {
  namespace fs = std::filesystem;
  const fs::path dir = GZI_TEST_TMP;
  fs::create_directories(dir);
  std::ofstream(dir / "model.cfg") << "variant = gzi\nticks = 150\ntheta = 1\nkappa = 0.79\nrho = 1.13\n"
                                      "lambda = 0.17\nvarrho = 0.01\neta = 0.44\ngamma = 0.58\nalpha = 0.976\nmu = 1\n";
  auto p = [&](const std::string& name, int) { return (dir / name).string(); };

  std::vector<std::string> outputs[2];
  bool codes = true;
  for (int run = 0; run < 2; ++run) {
    const std::vector<std::vector<std::string>> pipeline = {
        {"simulate", "--model", (dir / "model.cfg").string(), "--events", "1000000", "--seed", "9", "-o", p("l1_", run),
         "--books", p("books_", run)},
        {"summarize", "-i", p("l1_", run), "-o", p("summary_", run)},
        {"extract", "-i", p("l1_", run), "-o", p("samples_", run)},
        {"empirical", "-i", p("samples_", run), "-o", p("empirical_", run)},
        {"estimate", "-i", p("samples_", run), "--format", "json", "-o", p("fit_", run)},
        {"plot-data", "-i", p("samples_", run), "--theta", "0.79,0.58,0.17,0.024,0.44,1.13", "-o", p("pk_", run)},
        {"recover", "--n", "5000", "--reps", "3", "--seed", "9", "-o", p("recover_", run)},
        {"validate", "--suite", "all", "--reps", "2000", "--points", "3", "--seed", "9", "-o", p("validate_", run)}};
    for (const auto& args : pipeline) {
      std::ostringstream out, err;
      const int code = cli::run(args, out, err);
      if (code != 0 && code != 3 && code != 4 && !(args[0] == "validate" && code == 1)) {
        codes = false;
        info(args[0] + " exited with " + std::to_string(code) + ": " + err.str());
      }
    }
    for (const char* name : {"l1_", "books_", "summary_", "samples_", "empirical_", "fit_", "pk_", "recover_", "validate_"})
      outputs[run].push_back(slurp(p(name, run)));
  }
  int identical = 0;
  for (std::size_t i = 0; i < outputs[0].size(); ++i) {
    const bool same = !outputs[0][i].empty() && outputs[0][i] == outputs[1][i];
    identical += same ? 1 : 0;
    if (!same) info("output " + std::to_string(i) + " differs or is empty");
  }
  return {codes && identical == static_cast<int>(outputs[0].size()),
          std::to_string(identical) + "/" + std::to_string(outputs[0].size()) + " outputs byte-identical across reruns"};
}
#else
Outcome criterion9() { return {false, "built without the command-line tool"}; }
#endif

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "immigration-death oracle", criterion1},
      {2, "jump-probability component oracle", criterion2},
      {3, "gradient and Hessian identities", criterion3},
      {4, "convexity at the optimum", criterion4},
      {5, "parameter recovery", criterion5},
      {6, "confidence-interval coverage", criterion6},
      {7, "engine end-to-end consistency", criterion7},
      {8, "boundary and error status", criterion8},
      {9, "byte-identical CLI reruns", criterion9},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << c.id << " " << c.title << ": " << o.detail << " ("
              << fmt("%.1f", secs) << " s)" << std::endl;
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
