#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gzi/types.hpp"

namespace gzi {

/// Bins [(i-1)w, iw) over [0, inf); value is NaN where count is 0.
struct StepFunction {
  double binWidth = 1.0;
  std::vector<double> values;
  std::vector<std::size_t> counts;

  /// Value of the bin containing t, NaN if out of range or empty.
  double at(double t) const;
};

/// Frequency of E = 1 among usable samples with m = 0, per dt bin.
StepFunction empirical_omega0(const std::vector<JumpSample>& samples, double binWidth);
/// Same for usable samples with m > 0.
StepFunction empirical_omega_plus(const std::vector<JumpSample>& samples, double binWidth);

/// Smallest width (on a geometric ladder) whose populated bins hold at least
/// `minMedian` usable samples in the median.
double default_bin_width(const std::vector<JumpSample>& samples, std::size_t minMedian = 50);

enum class ErrorBar { Wald, Exact };

struct PkBin {
  double lo = 0.0;  ///< smallest dt in the bin
  double hi = 0.0;  ///< largest dt in the bin
  double freq = 0.0;
  double err = 0.0;  ///< one-sigma half width
  std::size_t count = 0;
  std::size_t hits = 0;
  double predicted = 0.0;  ///< NaN unless a parameter vector was given
};

struct PkGroup {
  int group = 1;       ///< 1: m = 0, 2..4: terciles of positive m
  double mLo = 0.0;
  double mHi = 0.0;
  std::vector<PkBin> bins;
};

struct PkBins {
  std::vector<PkGroup> groups;  ///< only populated groups
};

struct PkOptions {
  std::size_t timeBins = 20;
  ErrorBar errorBar = ErrorBar::Wald;
};

/// Binned jump frequencies by m-group and equal-count dt bins. With a
/// parameter vector, each bin also carries the in-bin mean of varpi.
PkBins bin_pk(const std::vector<JumpSample>& samples, const std::optional<Theta>& thetaHat = std::nullopt,
              const PkOptions& options = {});

/// `group,bin_lo,bin_hi,freq,err,count,predicted`
void write_pk_csv(std::ostream& out, const PkBins& bins);
/// `curve,bin_lo,bin_hi,freq,count`, populated bins only.
void write_step_csv(std::ostream& out, const std::vector<std::pair<std::string, StepFunction>>& curves);

}  // namespace gzi
