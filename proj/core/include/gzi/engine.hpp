#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "gzi/fenwick.hpp"
#include "gzi/model_spec.hpp"
#include "gzi/models.hpp"
#include "gzi/rng.hpp"
#include "gzi/types.hpp"

namespace gzi {

struct TouchedTick {
  Side side;
  int tick;
};

/// Applies `event` to `state` in place.
///
/// Classical ZI variants move single orders. GZI adds the side effects of its
/// event table: Poisson(eta) orders one tick behind a quote level that was
/// just emptied, Bernoulli(alpha) thinning of the old quote level and
/// Poisson(gamma) orders on every skipped tick when a short-term order
/// improves the quote, and conversion of long-term orders that end up at a
/// best quote. Ticks outside the grid absorb nothing. Ticks whose counts
/// changed are appended to `touched` when given.
void apply_event(BookState& state, const EventKind& event, const ModelSpec& spec, Rng& rng,
                 std::vector<TouchedTick>* touched = nullptr);

BookState applied(const BookState& state, const EventKind& event, const ModelSpec& spec, Rng& rng);

struct StepResult {
  double dt = 0.0;
  EventKind event;
  BookState state;
};

/// Reference CTMC step computed from the full event_rates() list. Returns
/// nullopt when the total rate is zero (absorbed).
std::optional<StepResult> step(const BookState& state, const ModelSpec& spec, Rng& rng);

/// Event-driven simulator with incremental rate bookkeeping.
///
/// Arrival intensities come from fixed prefix-sum tables over a contiguous
/// admissible range; per-order cancellations of constant-rate variants sit in
/// Fenwick trees over order counts, so a step costs O(log n) unless the
/// quotes move. Cont-style cancellations (quote dependent) are summed
/// directly.
class Simulator {
 public:
  Simulator(const ModelSpec& spec, std::uint64_t seed, std::optional<BookState> initial = std::nullopt);

  struct Outcome {
    double dt;
    EventKind event;
  };

  /// Samples and applies the next event; nullopt if absorbed.
  std::optional<Outcome> step();

  const BookState& state() const noexcept { return state_; }
  double time() const noexcept { return time_; }
  std::uint64_t events() const noexcept { return events_; }
  double total_rate() const;

 private:
  struct ArrivalTable {
    bool byDistance = false;
    std::vector<double> cum;  // cum[0] = 0, cum[i] = w_1 + ... + w_i
  };

  // Categories: 0-1 market, 2-5 arrivals, 6-9 cancellations.
  static constexpr std::size_t kCategories = 10;

  static std::size_t cat_index(Side side, Term term) noexcept {
    return static_cast<std::size_t>(side) * 2 + static_cast<std::size_t>(term);
  }
  void arrival_range(Side side, Term term, int& lo, int& hi) const;
  double arrival_total(Side side, Term term) const;
  int sample_arrival(Side side, Term term, double u) const;
  double cancel_total(Side side, Term term) const;
  int sample_cancel(Side side, Term term, double u) const;
  void sync_tick(Side side, int p);
  void sync_all();

  RateModel model_;
  bool gzi_;
  bool constantCancel_;
  std::array<double, 4> cancelRate_{};
  std::array<ArrivalTable, 4> arrivals_;
  std::array<FenwickTree, 4> counts_;
  BookState state_;
  Rng rng_;
  double time_ = 0.0;
  std::uint64_t events_ = 0;
  std::vector<TouchedTick> touched_;
};

struct StopRule {
  std::uint64_t maxEvents = 0;  ///< 0 = unlimited
  double maxTime = 0.0;         ///< seconds after burn-in, 0 = unlimited
};

enum class RecordMode { L1, L1WithBooks };

struct SimOptions {
  std::uint64_t burnIn = 10000;
  std::optional<BookState> initial;
};

/// L1 trace of one run. `books[k]` is the full book right after `records[k]`
/// was emitted (L1WithBooks only).
struct SimTrace {
  std::vector<L1Record> records;
  std::vector<BookState> books;
  std::uint64_t seed = 0;
  std::uint64_t eventCount = 0;  ///< events after burn-in
  double simTime = 0.0;          ///< clock at the end of the run
  bool absorbed = false;
};

/// Runs one simulation. A record is emitted whenever (ask, ask size, bid,
/// bid size) changes; sizes are order counts times shares per order.
SimTrace simulate(const ModelSpec& spec, const StopRule& stop, std::uint64_t seed,
                  RecordMode record = RecordMode::L1, const SimOptions& options = {});

/// Book sidecar: header `record,side,term,tick,count`, one row per non-zero
/// count of every snapshot, side in {S,B}, term in {short,long}.
void write_book_sidecar(std::ostream& out, const SimTrace& trace);

}  // namespace gzi
