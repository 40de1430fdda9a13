#include "doctest.h"

#include <cmath>
#include <sstream>

#include "json.hpp"

#include "gzi/error.hpp"
#include "gzi/oracle.hpp"

using namespace gzi;

namespace {

const Theta kXom{0.79, 0.58, 0.17, 0.024, 0.44, 1.13};

bool within(const McResult& r, double expected, double k = 4.0) {
  const double se = std::max(r.se, std::sqrt(expected * (1 - expected) / static_cast<double>(r.reps)));
  return std::abs(r.estimate - expected) <= k * se + 1e-12;
}

}  // namespace

TEST_CASE("immigration-death Monte Carlo edge cases") {
  const auto empty = mc_immigration_death(0, 0.0, 1.0, 2.0, 5000, 1);
  CHECK(empty.estimate == 1.0);
  CHECK(empty.se == 0.0);
  CHECK(empty.reps == 5000);
  const auto death = mc_immigration_death(1, 0.0, 1.0, std::log(2.0), 40000, 2);
  CHECK(within(death, 0.5));
  const auto both = mc_immigration_death(5, 2.0, 1.0, 1.0, 40000, 3);
  CHECK(within(both, omega(5, 1.0, 2.0, 1.0)));
  CHECK_THROWS_AS(mc_immigration_death(1, 1.0, 0.0, 1.0, 5000, 1), DomainError);
  CHECK_THROWS(mc_immigration_death(1, 1.0, 1.0, 1.0, 10, 1));
}

TEST_CASE("Monte Carlo is reproducible in the seed") {
  const auto a = mc_immigration_death(3, 1.0, 0.7, 0.9, 5000, 42);
  const auto b = mc_immigration_death(3, 1.0, 0.7, 0.9, 5000, 42);
  CHECK(a.estimate == b.estimate);
  const auto c = mc_gzi_components(100, 0.5, kXom, 100, 0.976, 5000, 9);
  const auto d = mc_gzi_components(100, 0.5, kXom, 100, 0.976, 5000, 9);
  CHECK(c.estimate == d.estimate);
}

TEST_CASE("component oracle") {
  Theta zero{};
  zero.rho = 1.0;
  CHECK(mc_gzi_components(0, 1.0, zero, 1.0, 0.5, 2000, 1).estimate == 1.0);
  // m = 0: only Poisson sources, so varpi is exact.
  const auto r0 = mc_gzi_components(0, 0.7, kXom, 1.0, 0.976, 40000, 4);
  CHECK(within(r0, varpi(0, 0.7, kXom)));
  CHECK(binomial_poisson_gap(0, 0.7, kXom, 1.0, 0.976) == 0.0);
  // Every displayed order cancelled: exact for any m.
  Theta th = kXom;
  th.beta = 0.0;
  CHECK(binomial_poisson_gap(500, 0.7, th, 1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
  const auto rAll = mc_gzi_components(500, 0.7, th, 1.0, 1.0, 40000, 5);
  CHECK(within(rAll, varpi(500, 0.7, th)));
  // Large m / mu with small survival: the Poisson form tracks the binomial one.
  th.beta = (1 - 0.5) / 100.0;
  CHECK(binomial_poisson_gap(10000, 0.2, th, 100.0, 0.5) < 0.01);
  CHECK(binomial_poisson_gap(10000, 0.2, th, 100.0, 0.5) > 0.0);
}

TEST_CASE("validation suites pass at moderate replication counts") {
  for (const auto& c : prop2_suite(20000, 1)) CHECK_MESSAGE(c.pass, c.label);
  CHECK(prop2_suite(2000, 1).size() == 24);
  for (const auto& c : component_suite(20000, 1)) CHECK_MESSAGE(c.pass, c.label);
  const auto d = derivative_suite(5, 2);
  CHECK(format_checks(d).find("PASS") != std::string::npos);
}

TEST_CASE("synthetic samples follow the design") {
  SyntheticDesign design;
  const SampleSet s = synthetic_samples(kXom, 20000, design, 3);
  REQUIRE(s.size() == 20000);
  std::size_t zeros = 0;
  double hits = 0.0, expected = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    zeros += s.m[i] == 0.0;
    CHECK(std::fmod(s.m[i], design.lotSize) == 0.0);
    CHECK(s.t[i] > 0.0);
    hits += s.e[i];
    expected += varpi(s.m[i], s.t[i], kXom);
  }
  CHECK(std::abs(static_cast<double>(zeros) / 20000 - 0.35) < 4 * std::sqrt(0.35 * 0.65 / 20000));
  CHECK(std::abs(hits - expected) < 4 * std::sqrt(expected));
}

TEST_CASE("small recovery study and its outputs") {
  RecoveryOptions o;
  o.fit.starts = 4;
  const auto r = recovery_study(kXom, 20000, 3, 17, o);
  REQUIRE(r.reps.size() == 3);
  CHECK(r.ok + r.boundary + r.error == 3);
  CHECK(r.nSamples == 20000);
  CHECK(r.reps[0].seed != r.reps[1].seed);
  const auto again = recovery_study(kXom, 20000, 3, 17, o);
  CHECK(again.reps[2].estimate == r.reps[2].estimate);

  std::ostringstream csv;
  write_recovery_csv(csv, r);
  std::istringstream in(csv.str());
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("rep,seed,n,status,kappa,kappa_se,kappa_hit,", 0) == 0);
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 3);

  const auto j = nlohmann::json::parse(recovery_json(r));
  CHECK(j["reps"] == 3);
  CHECK(j["parameters"]["rho"]["true"].get<double>() == doctest::Approx(1.13));
}

TEST_CASE("engine-mode samples") {
  GziParams g;
  g.theta = 1.0;
  g.kappa = 0.79;
  g.rho = 1.13;
  g.lambda = 0.17;
  g.varrho = 0.01;
  g.eta = 0.44;
  g.gamma = 0.58;
  g.alpha = 0.976;
  const auto samples = engine_samples(ModelSpec::gzi_model(100, g), 300000, 10000, 5);
  std::size_t usable = 0;
  for (const auto& s : samples) usable += s.usable;
  CHECK(usable > 100);
}
