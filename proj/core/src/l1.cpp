#include "gzi/l1.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "gzi/error.hpp"
#include "gzi/format.hpp"

namespace gzi {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

double cell_number(const std::string& s, std::size_t line) {
  try {
    return parse_double(s);
  } catch (const ConfigError&) {
    throw ParseError("not a number: '" + s + "'", line);
  }
}

int cell_tick(const std::string& s, std::size_t line) {
  const double v = cell_number(s, line);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ParseError("price is not an integer tick: '" + s + "'", line);
  return static_cast<int>(v);
}

}  // namespace

L1Parse parse_l1(std::istream& in) {
  L1Parse out;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  double lastTime = -std::numeric_limits<double>::infinity();
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != "time,ask,ask_size,bid,bid_size") throw ParseError("expected header 'time,ask,ask_size,bid,bid_size'", lineno);
      header = true;
      continue;
    }
    const auto cells = split_csv(line);
    if (cells.size() != 5) throw ParseError("expected 5 columns, got " + std::to_string(cells.size()), lineno);
    L1Record r;
    r.time = cell_number(cells[0], lineno);
    r.ask = cell_tick(cells[1], lineno);
    r.askSize = cell_number(cells[2], lineno);
    r.bid = cell_tick(cells[3], lineno);
    r.bidSize = cell_number(cells[4], lineno);
    if (!std::isfinite(r.time) || r.time < 0.0) throw ParseError("time must be a non-negative number", lineno);
    if (r.askSize < 0.0 || r.bidSize < 0.0) throw ParseError("negative size", lineno);
    if (r.time < lastTime) throw ParseError("time decreases", lineno);
    lastTime = r.time;
    if (r.bid >= r.ask) {
      ++out.rejectedCrossed;
      continue;
    }
    if (!out.records.empty() && out.records.back().time == r.time) {
      out.records.back() = r;
      ++out.collapsedTies;
    } else {
      out.records.push_back(r);
    }
  }
  if (!header) throw ParseError("missing header", lineno + 1);
  return out;
}

void write_l1(std::ostream& out, const std::vector<L1Record>& records) {
  out << "time,ask,ask_size,bid,bid_size\n";
  for (const auto& r : records) {
    out << format_double(r.time) << ',' << r.ask << ',' << format_double(r.askSize) << ',' << r.bid << ','
        << format_double(r.bidSize) << '\n';
  }
}

namespace {

std::string month_label(double time) {
  using namespace std::chrono;
  const auto secs = static_cast<long long>(std::floor(time));
  const sys_days day{days{secs >= 0 ? secs / 86400 : (secs - 86399) / 86400}};
  const year_month_day ymd{day};
  return std::to_string(static_cast<unsigned>(ymd.month())) + "/" + std::to_string(static_cast<int>(ymd.year()));
}

struct Accumulator {
  double spreadSum = 0.0;
  double gapSum = 0.0;
  std::size_t gaps = 0;
  std::size_t jumps = 0;
  std::map<long long, bool> days;
};

}  // namespace

SummaryStats summarize(const std::vector<L1Record>& records, const SummaryOptions& options) {
  if (records.size() < 2) throw Error("summary needs at least two L1 records");
  if (!(options.secondsPerDay > 0.0)) throw ConfigError("day length must be positive");

  std::vector<std::string> order;
  std::map<std::string, Accumulator> buckets;
  auto bucket_of = [&](double t) -> Accumulator& {
    const std::string label = options.bucketing == Bucketing::Month ? month_label(t) : "all";
    auto [it, inserted] = buckets.try_emplace(label);
    if (inserted) order.push_back(label);
    return it->second;
  };

  double lastJump = std::numeric_limits<double>::quiet_NaN();
  std::string lastLabel;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    Accumulator& acc = bucket_of(r.time);
    acc.days[static_cast<long long>(std::floor(r.time / options.secondsPerDay))] = true;
    if (i == 0) continue;
    const auto& prev = records[i - 1];
    if (r.ask == prev.ask && r.bid == prev.bid) continue;
    ++acc.jumps;
    acc.spreadSum += r.ask - r.bid;
    if (!std::isnan(lastJump)) {
      acc.gapSum += r.time - lastJump;
      ++acc.gaps;
    }
    lastJump = r.time;
  }

  SummaryStats stats;
  for (const auto& label : order) {
    const auto& acc = buckets.at(label);
    SummaryRow row;
    row.label = label;
    row.jumps = acc.jumps;
    row.days = acc.days.size();
    row.meanSpread = acc.jumps ? acc.spreadSum / static_cast<double>(acc.jumps) : 0.0;
    row.meanInterJump = acc.gaps ? acc.gapSum / static_cast<double>(acc.gaps) : 0.0;
    row.jumpsPerDay = row.days ? static_cast<double>(acc.jumps) / static_cast<double>(row.days) : 0.0;
    stats.rows.push_back(row);
  }
  return stats;
}

std::string format_summary_row(const SummaryRow& row) {
  return row.label + " " + format_fixed(row.meanSpread, 2) + " " + format_fixed(row.meanInterJump, 2) + " " +
         format_fixed(row.jumpsPerDay / 1e4, 2);
}

void write_summary(std::ostream& out, const SummaryStats& stats) {
  out << "m/y s_bar dt_bar jumps_per_day_1e4\n";
  for (const auto& row : stats.rows) out << format_summary_row(row) << '\n';
}

std::vector<JumpSample> extract_jumps(const std::vector<L1Record>& records, JumpMode mode) {
  std::vector<JumpSample> out;
  if (records.empty()) return out;

  bool havePrevEpoch = false;
  double prevEpochTime = records.front().time;
  int prevU = 0;
  // m carried from the previous epoch to the next sample.
  double pendingM = 0.0;

  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& prev = records[i - 1];
    const auto& r = records[i];
    const int da = r.ask - prev.ask;
    const bool epoch = mode == JumpMode::AskOnly ? da != 0 : (da != 0 || r.bid != prev.bid);
    if (!epoch) continue;

    JumpSample s;
    s.index = static_cast<std::int64_t>(out.size());
    s.dt = r.time - prevEpochTime;
    s.u = da > 0 ? 1 : (da < 0 ? -1 : 0);
    s.uPrev = havePrevEpoch ? prevU : 0;
    s.e = da > 1;
    s.mShares = s.uPrev == -1 ? pendingM : 0.0;
    s.usable = havePrevEpoch && s.uPrev == -1 && s.u == 1 && s.dt > 0.0;
    s.askMove = da;
    s.spread = r.ask - r.bid;
    out.push_back(s);

    // A one-tick fall leaves the old ask one tick above the new ask.
    pendingM = da == -1 ? prev.askSize : 0.0;
    prevU = s.u;
    prevEpochTime = r.time;
    havePrevEpoch = true;
  }
  return out;
}

void write_jump_samples(std::ostream& out, const std::vector<JumpSample>& samples) {
  out << "i,dt,u,uprev,e,m,usable\n";
  for (const auto& s : samples) {
    out << s.index << ',' << format_double(s.dt) << ',' << s.u << ',' << s.uPrev << ',' << (s.e ? 1 : 0) << ','
        << format_double(s.mShares) << ',' << (s.usable ? 1 : 0) << '\n';
  }
}

std::vector<JumpSample> parse_jump_samples(std::istream& in) {
  std::vector<JumpSample> out;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != "i,dt,u,uprev,e,m,usable") throw ParseError("expected header 'i,dt,u,uprev,e,m,usable'", lineno);
      header = true;
      continue;
    }
    const auto c = split_csv(line);
    if (c.size() != 7) throw ParseError("expected 7 columns, got " + std::to_string(c.size()), lineno);
    JumpSample s;
    s.index = static_cast<std::int64_t>(cell_number(c[0], lineno));
    s.dt = cell_number(c[1], lineno);
    s.u = cell_tick(c[2], lineno);
    s.uPrev = cell_tick(c[3], lineno);
    s.e = cell_tick(c[4], lineno) != 0;
    s.mShares = cell_number(c[5], lineno);
    s.usable = cell_tick(c[6], lineno) != 0;
    if (s.u < -1 || s.u > 1 || s.uPrev < -1 || s.uPrev > 1) throw ParseError("u and uprev must be -1, 0 or 1", lineno);
    if (s.mShares < 0.0) throw ParseError("m must be non-negative", lineno);
    if (s.e && s.u != 1) throw ParseError("e = 1 requires u = 1", lineno);
    if (s.usable && !(s.u == 1 && s.uPrev == -1 && s.dt > 0.0))
      throw ParseError("usable row needs u = 1, uprev = -1 and dt > 0", lineno);
    s.askMove = std::numeric_limits<double>::quiet_NaN();
    s.spread = std::numeric_limits<double>::quiet_NaN();
    out.push_back(s);
  }
  if (!header) throw ParseError("missing header", lineno + 1);
  return out;
}

}  // namespace gzi
