#include "gzi/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <boost/math/special_functions/beta.hpp>

#include "gzi/error.hpp"
#include "gzi/format.hpp"
#include "gzi/probability.hpp"

namespace gzi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class Pred>
StepFunction step_function(const std::vector<JumpSample>& samples, double width, Pred keep) {
  if (!(width > 0.0) || !std::isfinite(width)) throw ConfigError("bin width must be positive");
  StepFunction f;
  f.binWidth = width;
  std::vector<std::size_t> hits;
  for (const auto& s : samples) {
    if (!s.usable || !keep(s)) continue;
    const auto i = static_cast<std::size_t>(std::floor(s.dt / width));
    if (i >= f.counts.size()) {
      f.counts.resize(i + 1, 0);
      hits.resize(i + 1, 0);
    }
    ++f.counts[i];
    hits[i] += s.e ? 1 : 0;
  }
  f.values.resize(f.counts.size());
  for (std::size_t i = 0; i < f.counts.size(); ++i)
    f.values[i] = f.counts[i] ? static_cast<double>(hits[i]) / static_cast<double>(f.counts[i]) : kNaN;
  return f;
}

// Half width of the central 68.27% Clopper-Pearson interval.
double exact_half_width(std::size_t k, std::size_t n) {
  const double tail = 0.5 * std::erfc(1.0 / std::sqrt(2.0));
  const double p = static_cast<double>(k) / static_cast<double>(n);
  const double lo = k == 0 ? 0.0 : boost::math::ibeta_inv(static_cast<double>(k), static_cast<double>(n - k + 1), tail);
  const double hi =
      k == n ? 1.0 : boost::math::ibeta_inv(static_cast<double>(k + 1), static_cast<double>(n - k), 1.0 - tail);
  return std::max(p - lo, hi - p);
}

}  // namespace

double StepFunction::at(double t) const {
  if (!(t >= 0.0)) return kNaN;
  const auto i = static_cast<std::size_t>(std::floor(t / binWidth));
  return i < values.size() ? values[i] : kNaN;
}

StepFunction empirical_omega0(const std::vector<JumpSample>& samples, double binWidth) {
  return step_function(samples, binWidth, [](const JumpSample& s) { return s.mShares == 0.0; });
}

StepFunction empirical_omega_plus(const std::vector<JumpSample>& samples, double binWidth) {
  return step_function(samples, binWidth, [](const JumpSample& s) { return s.mShares > 0.0; });
}

double default_bin_width(const std::vector<JumpSample>& samples, std::size_t minMedian) {
  std::vector<double> dts;
  for (const auto& s : samples)
    if (s.usable) dts.push_back(s.dt);
  if (dts.empty()) throw Error("no usable samples to bin");
  std::sort(dts.begin(), dts.end());
  const double range = dts.back();
  const double bins = std::max(1.0, static_cast<double>(dts.size()) / static_cast<double>(std::max<std::size_t>(1, minMedian)));
  double width = range > 0.0 ? range / bins : 1.0;
  for (int guard = 0; guard < 200; ++guard) {
    std::vector<std::size_t> counts;
    std::size_t j = 0;
    while (j < dts.size()) {
      const double edge = (std::floor(dts[j] / width) + 1.0) * width;
      std::size_t c = 0;
      while (j < dts.size() && dts[j] < edge) {
        ++c;
        ++j;
      }
      counts.push_back(c);
    }
    std::nth_element(counts.begin(), counts.begin() + counts.size() / 2, counts.end());
    if (counts[counts.size() / 2] >= minMedian || counts.size() == 1) return width;
    width *= 1.25;
  }
  return width;
}

PkBins bin_pk(const std::vector<JumpSample>& samples, const std::optional<Theta>& thetaHat, const PkOptions& options) {
  if (options.timeBins == 0) throw ConfigError("time bin count must be positive");
  std::vector<const JumpSample*> zero, positive;
  for (const auto& s : samples) {
    if (!s.usable) continue;
    (s.mShares > 0.0 ? positive : zero).push_back(&s);
  }
  std::sort(positive.begin(), positive.end(),
            [](const JumpSample* x, const JumpSample* y) { return x->mShares < y->mShares; });

  std::vector<std::pair<int, std::vector<const JumpSample*>>> groups;
  groups.emplace_back(1, std::move(zero));
  if (!positive.empty()) {
    // Tercile cut points as values, so equal m never straddles two groups.
    const std::size_t n = positive.size();
    const double q1 = positive[(n - 1) / 3]->mShares;
    const double q2 = positive[(2 * n - 1) / 3]->mShares;
    std::vector<const JumpSample*> g2, g3, g4;
    for (const auto* s : positive) {
      if (s->mShares <= q1)
        g2.push_back(s);
      else if (s->mShares <= q2)
        g3.push_back(s);
      else
        g4.push_back(s);
    }
    groups.emplace_back(2, std::move(g2));
    groups.emplace_back(3, std::move(g3));
    groups.emplace_back(4, std::move(g4));
  }

  PkBins out;
  for (auto& [id, members] : groups) {
    if (members.empty()) continue;
    PkGroup g;
    g.group = id;
    g.mLo = members.front()->mShares;
    g.mHi = members.front()->mShares;
    for (const auto* s : members) {
      g.mLo = std::min(g.mLo, s->mShares);
      g.mHi = std::max(g.mHi, s->mShares);
    }
    std::stable_sort(members.begin(), members.end(),
                     [](const JumpSample* x, const JumpSample* y) { return x->dt < y->dt; });
    const std::size_t n = members.size();
    const std::size_t nb = std::min(options.timeBins, n);
    for (std::size_t b = 0; b < nb; ++b) {
      const std::size_t from = b * n / nb;
      const std::size_t to = (b + 1) * n / nb;
      PkBin bin;
      bin.lo = members[from]->dt;
      bin.hi = members[to - 1]->dt;
      bin.count = to - from;
      double predicted = 0.0;
      for (std::size_t k = from; k < to; ++k) {
        bin.hits += members[k]->e ? 1 : 0;
        if (thetaHat) predicted += varpi(members[k]->mShares, members[k]->dt, *thetaHat);
      }
      const double c = static_cast<double>(bin.count);
      bin.freq = static_cast<double>(bin.hits) / c;
      bin.err = options.errorBar == ErrorBar::Wald ? std::sqrt(bin.freq * (1.0 - bin.freq) / c)
                                                   : exact_half_width(bin.hits, bin.count);
      bin.predicted = thetaHat ? predicted / c : kNaN;
      g.bins.push_back(bin);
    }
    out.groups.push_back(std::move(g));
  }
  return out;
}

void write_pk_csv(std::ostream& out, const PkBins& bins) {
  out << "group,bin_lo,bin_hi,freq,err,count,predicted\n";
  for (const auto& g : bins.groups) {
    for (const auto& b : g.bins) {
      out << g.group << ',' << format_double(b.lo) << ',' << format_double(b.hi) << ',' << format_double(b.freq) << ','
          << format_double(b.err) << ',' << b.count << ',' << (std::isnan(b.predicted) ? "" : format_double(b.predicted))
          << '\n';
    }
  }
}

void write_step_csv(std::ostream& out, const std::vector<std::pair<std::string, StepFunction>>& curves) {
  out << "curve,bin_lo,bin_hi,freq,count\n";
  for (const auto& [name, f] : curves) {
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      if (f.counts[i] == 0) continue;
      out << name << ',' << format_double(static_cast<double>(i) * f.binWidth) << ','
          << format_double(static_cast<double>(i + 1) * f.binWidth) << ',' << format_double(f.values[i]) << ','
          << f.counts[i] << '\n';
    }
  }
}

}  // namespace gzi
