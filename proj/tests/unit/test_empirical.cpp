#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gzi/empirical.hpp"
#include "gzi/error.hpp"
#include "gzi/probability.hpp"

using namespace gzi;

namespace {

JumpSample sample(double dt, double m, bool e, bool usable = true) {
  JumpSample s;
  s.dt = dt;
  s.mShares = m;
  s.e = e;
  s.u = 1;
  s.uPrev = -1;
  s.usable = usable;
  return s;
}

}  // namespace

TEST_CASE("step functions over dt bins") {
  const std::vector<JumpSample> samples = {
      sample(0.1, 0, true),  sample(0.2, 0, false), sample(0.3, 0, true), sample(0.7, 0, false),
      sample(1.4, 0, true),  sample(0.1, 5, false), sample(0.6, 5, true), sample(0.9, 5, true),
      sample(0.2, 0, true, false)};
  const auto w0 = empirical_omega0(samples, 0.5);
  REQUIRE(w0.values.size() == 3);
  CHECK(w0.counts[0] == 3);
  CHECK(w0.values[0] == doctest::Approx(2.0 / 3));
  CHECK(w0.values[1] == 0.0);
  CHECK(w0.values[2] == 1.0);
  CHECK(w0.at(0.49) == doctest::Approx(2.0 / 3));
  CHECK(w0.at(1.0) == 1.0);
  CHECK(std::isnan(w0.at(7.0)));
  CHECK(std::isnan(w0.at(-1.0)));

  const auto wp = empirical_omega_plus(samples, 0.5);
  REQUIRE(wp.values.size() == 2);
  CHECK(wp.values[0] == 0.0);
  CHECK(wp.values[1] == 1.0);
  CHECK(wp.counts[1] == 2);

  CHECK_THROWS_AS(empirical_omega0(samples, 0.0), ConfigError);
}

TEST_CASE("empty bins are NaN") {
  const auto f = empirical_omega0({sample(0.1, 0, true), sample(2.2, 0, false)}, 1.0);
  REQUIRE(f.values.size() == 3);
  CHECK(std::isnan(f.values[1]));
  CHECK(f.counts[1] == 0);
  std::ostringstream out;
  write_step_csv(out, {{"omega0", f}});
  CHECK(out.str() == "curve,bin_lo,bin_hi,freq,count\nomega0,0,1,1,1\nomega0,2,3,0,1\n");
}

TEST_CASE("all jumps multi-tick gives frequency one everywhere") {
  std::vector<JumpSample> samples;
  for (int i = 0; i < 200; ++i) samples.push_back(sample(0.01 * i, (i % 4) * 100.0, true));
  for (const auto& g : bin_pk(samples).groups)
    for (const auto& b : g.bins) {
      CHECK(b.freq == 1.0);
      CHECK(b.err == 0.0);
    }
  PkOptions exact;
  exact.errorBar = ErrorBar::Exact;
  for (const auto& g : bin_pk(samples, std::nullopt, exact).groups)
    for (const auto& b : g.bins) CHECK(b.err > 0.0);
}

TEST_CASE("tercile groups of nine positive m values") {
  std::vector<JumpSample> samples;
  for (int i = 1; i <= 9; ++i) samples.push_back(sample(0.1 * i, 100.0 * i, i % 2 == 0));
  samples.push_back(sample(0.5, 0, true));
  PkOptions o;
  o.timeBins = 2;
  const auto pk = bin_pk(samples, std::nullopt, o);
  REQUIRE(pk.groups.size() == 4);
  CHECK(pk.groups[0].group == 1);
  CHECK(pk.groups[0].bins.size() == 1);
  CHECK(pk.groups[1].mLo == 100.0);
  CHECK(pk.groups[1].mHi == 300.0);
  CHECK(pk.groups[2].mLo == 400.0);
  CHECK(pk.groups[2].mHi == 600.0);
  CHECK(pk.groups[3].mLo == 700.0);
  CHECK(pk.groups[3].mHi == 900.0);
  const auto& g2 = pk.groups[1].bins;
  REQUIRE(g2.size() == 2);
  CHECK(g2[0].count == 1);
  CHECK(g2[1].count == 2);
  CHECK(g2[0].lo == doctest::Approx(0.1));
  CHECK(g2[1].lo == doctest::Approx(0.2));
  CHECK(g2[1].hi == doctest::Approx(0.3));
  CHECK(g2[1].freq == 0.5);
  CHECK(g2[1].err == doctest::Approx(0.5 / std::sqrt(2.0)));
  CHECK(std::isnan(g2[0].predicted));
}

TEST_CASE("tied m values stay in one group") {
  std::vector<JumpSample> samples;
  for (int i = 0; i < 12; ++i) samples.push_back(sample(0.1 * (i + 1), 100.0, true));
  const auto pk = bin_pk(samples);
  REQUIRE(pk.groups.size() == 1);
  CHECK(pk.groups[0].group == 2);
  CHECK(pk.groups[0].bins.size() == 12);
}

TEST_CASE("predicted values are in-bin means of the jump probability") {
  const Theta th{0.79, 0.58, 0.17, 0.024, 0.44, 1.13};
  std::vector<JumpSample> samples = {sample(0.5, 0, true), sample(1.5, 0, false)};
  PkOptions o;
  o.timeBins = 1;
  const auto pk = bin_pk(samples, th, o);
  REQUIRE(pk.groups.size() == 1);
  CHECK(pk.groups[0].bins[0].predicted == doctest::Approx(0.5 * (varpi(0, 0.5, th) + varpi(0, 1.5, th))));
  std::ostringstream out;
  write_pk_csv(out, pk);
  CHECK(out.str().rfind("group,bin_lo,bin_hi,freq,err,count,predicted\n1,0.5,1.5,0.5,", 0) == 0);
}

TEST_CASE("no usable samples") {
  const std::vector<JumpSample> none = {sample(1.0, 0, true, false)};
  CHECK(bin_pk(none).groups.empty());
  CHECK(empirical_omega0(none, 1.0).values.empty());
  CHECK_THROWS_AS(default_bin_width(none), Error);
}

TEST_CASE("exact error bars") {
  std::vector<JumpSample> samples;
  for (int i = 0; i < 10; ++i) samples.push_back(sample(1.0 + i, 0, i < 3));
  PkOptions o;
  o.timeBins = 1;
  o.errorBar = ErrorBar::Exact;
  const auto b = bin_pk(samples, std::nullopt, o).groups[0].bins[0];
  // 68.27% Clopper-Pearson for 3 of 10 is [0.14167, 0.50826] (Beta quantiles).
  CHECK(b.err == doctest::Approx(0.5082624819902524 - 0.3).epsilon(1e-9));
  o.errorBar = ErrorBar::Wald;
  CHECK(bin_pk(samples, std::nullopt, o).groups[0].bins[0].err == doctest::Approx(std::sqrt(0.21 / 10)));
}

TEST_CASE("default bin width reaches the target median") {
  std::vector<JumpSample> samples;
  for (int i = 0; i < 5000; ++i) samples.push_back(sample(std::exp(-0.001 * i) * 10.0, 0, i % 3 == 0));
  const double w = default_bin_width(samples, 50);
  CHECK(w > 0.0);
  const auto f = empirical_omega0(samples, w);
  std::vector<std::size_t> c;
  for (auto n : f.counts)
    if (n) c.push_back(n);
  std::sort(c.begin(), c.end());
  CHECK(c[c.size() / 2] >= 50);
  CHECK(default_bin_width({sample(2.0, 0, true)}) > 0.0);
}
