#include <cmath>
#include <sstream>

#include "json.hpp"

#include "gzi/estimator.hpp"
#include "gzi/format.hpp"

namespace gzi {

namespace {

constexpr const char* kNames[6] = {"kappa", "gamma", "lambda", "beta", "eta", "rho"};

nlohmann::ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

std::string fit_report_json(const FitReport& r) {
  nlohmann::ordered_json j;
  j["status"] = to_string(r.status);
  j["degenerate"] = r.degenerate;
  const Vector6 est = to_vector(r.theta);
  for (int i = 0; i < 6; ++i) {
    j["theta"][kNames[i]] = number(est[i]);
    j["se"][kNames[i]] = number(r.se[i]);
    j["stars"][kNames[i]] = r.stars[i];
  }
  j["upsilon"] = {{"phi", number(r.upsilon.phi)},       {"gamma", number(r.upsilon.gamma)},
                  {"lambda", number(r.upsilon.lambda)}, {"beta", number(r.upsilon.beta)},
                  {"zeta", number(r.upsilon.zeta)},     {"rho", number(r.upsilon.rho)}};
  auto cov = nlohmann::ordered_json::array();
  for (int a = 0; a < 6; ++a) {
    auto row = nlohmann::ordered_json::array();
    for (int b = 0; b < 6; ++b) row.push_back(number(r.cov(a, b)));
    cov.push_back(row);
  }
  j["cov"] = cov;
  const auto& d = r.diagnostics;
  j["diagnostics"] = {{"sum_e", d.sumE},
                      {"n_usable", d.nUsable},
                      {"mean_up_jump", number(d.meanUpJump)},
                      {"mean_spread", number(d.meanSpread)},
                      {"sse", number(d.sse)},
                      {"projected_gradient", number(d.projectedGradient)},
                      {"condition_number", number(d.conditionNumber)},
                      {"solver_iterations", d.solverIterations},
                      {"starts_tried", d.startsTried},
                      {"starts_converged", d.startsConverged}};
  return j.dump(2) + "\n";
}

std::string fit_report_text(const FitReport& r, const std::string& title) {
  std::ostringstream out;
  if (!title.empty()) out << title << '\n';
  const Vector6 est = to_vector(r.theta);
  for (int i = 0; i < 6; ++i) {
    out << kNames[i] << '=' << format_fixed(est[i], 2) << '(';
    if (r.status == FitStatus::Ok)
      out << format_fixed(r.se[i], 2) << ')' << r.stars[i];
    else
      out << to_string(r.status) << ')';
    out << (i % 2 == 0 ? ", " : "\n");
  }
  const auto& d = r.diagnostics;
  out << "SumE/n=" << d.sumE << '/' << d.nUsable << '\n';
  out << "mean_up_jump=" << (std::isfinite(d.meanUpJump) ? format_fixed(d.meanUpJump, 2) : "n/a")
      << ", mean_spread=" << (std::isfinite(d.meanSpread) ? format_fixed(d.meanSpread, 2) : "n/a") << '\n';
  return out.str();
}

}  // namespace gzi
