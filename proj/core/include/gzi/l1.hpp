#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "gzi/types.hpp"

namespace gzi {

/// Records parsed from an L1 CSV plus the number of rejected rows.
struct L1Parse {
  std::vector<L1Record> records;
  std::size_t rejectedCrossed = 0;   ///< rows with bid >= ask
  std::size_t collapsedTies = 0;     ///< rows replaced by a later row with the same time
};

/// Parses `time,ask,ask_size,bid,bid_size`. Lines starting with '#' are
/// comments. Consecutive rows with identical time collapse to the last one.
/// Throws ParseError on malformed rows or decreasing time.
L1Parse parse_l1(std::istream& in);

void write_l1(std::ostream& out, const std::vector<L1Record>& records);

enum class Bucketing { Month, Whole };

struct SummaryRow {
  std::string label;          ///< "m/yyyy" or "all"
  double meanSpread = 0.0;    ///< ticks, averaged over quote-jump epochs
  double meanInterJump = 0.0; ///< seconds between consecutive quote jumps
  double jumpsPerDay = 0.0;   ///< raw count per day
  std::size_t jumps = 0;
  std::size_t days = 0;
};

struct SummaryStats {
  std::vector<SummaryRow> rows;
};

struct SummaryOptions {
  Bucketing bucketing = Bucketing::Whole;
  double secondsPerDay = 86400.0;  ///< day length for naive day counting
};

/// Quote-jump summary statistics. Time is read as seconds since the Unix
/// epoch for month bucketing. Throws Error on fewer than two records.
SummaryStats summarize(const std::vector<L1Record>& records, const SummaryOptions& options = {});

/// Table row like `12/2008 19.50 0.56 4.12` (jumps per day in units of 10^4).
std::string format_summary_row(const SummaryRow& row);
void write_summary(std::ostream& out, const SummaryStats& stats);

enum class JumpMode { AskOnly, BothQuotes };

/// Builds one JumpSample per jump epoch (a change of the ask, or of ask or
/// bid in BothQuotes mode).
///
/// The regressor m of sample i is the displayed ask size in the last record
/// before epoch i-1 when that epoch moved the ask down by exactly one tick
/// (the old ask is then one tick above the new ask), and 0 when the ask fell
/// by more than one tick.
std::vector<JumpSample> extract_jumps(const std::vector<L1Record>& records, JumpMode mode = JumpMode::AskOnly);

/// `i,dt,u,uprev,e,m,usable`
void write_jump_samples(std::ostream& out, const std::vector<JumpSample>& samples);
/// Reads the format above; askMove and spread come back as NaN.
std::vector<JumpSample> parse_jump_samples(std::istream& in);

}  // namespace gzi
