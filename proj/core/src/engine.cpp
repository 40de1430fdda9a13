#include "gzi/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "gzi/error.hpp"

namespace gzi {

namespace {

Side opposite(Side s) { return s == Side::Sell ? Side::Buy : Side::Sell; }

// One tick further from the spread on `side`.
int behind(Side side, int p) { return side == Side::Sell ? p + 1 : p - 1; }

bool improves(Side side, int p, int best) { return side == Side::Sell ? p < best : p > best; }

class Mutator {
 public:
  Mutator(BookState& s, std::vector<TouchedTick>* log) : s_(s), log_(log) {}

  void add(Side side, Term term, int p, std::int64_t delta) {
    if (delta == 0) return;
    s_.add(side, term, p, delta);
    if (log_) log_->push_back({side, p});
  }

  void set(Side side, Term term, int p, std::int64_t value) {
    if (s_.count(side, term, p) == value) return;
    s_.set(side, term, p, value);
    if (log_) log_->push_back({side, p});
  }

  // Long-term orders at a best quote become short-term.
  void convert() {
    for (Side side : {Side::Sell, Side::Buy}) {
      const int q = s_.best(side);
      if (q < 1 || q > s_.ticks()) continue;
      const auto lng = s_.count(side, Term::Long, q);
      if (lng == 0) continue;
      add(side, Term::Short, q, lng);
      add(side, Term::Long, q, -lng);
    }
  }

  BookState& state() { return s_; }

 private:
  BookState& s_;
  std::vector<TouchedTick>* log_;
};

std::int64_t poisson(Rng& rng, double mean) {
  if (!(mean > 0.0)) return 0;
  return std::poisson_distribution<std::int64_t>(mean)(rng);
}

void inject_behind(Mutator& m, Side side, int emptied, double eta, Rng& rng) {
  const int q = behind(side, emptied);
  const auto k = poisson(rng, eta);
  if (k > 0 && q >= 1 && q <= m.state().ticks()) m.add(side, Term::Short, q, k);
}

void remove_one(Mutator& m, Side side, int p) {
  if (m.state().count(side, Term::Short, p) > 0) {
    m.add(side, Term::Short, p, -1);
  } else if (m.state().count(side, Term::Long, p) > 0) {
    m.add(side, Term::Long, p, -1);
  } else {
    throw Error("internal: removing an order from an empty level");
  }
}

Side event_side(EventType t) {
  switch (t) {
    case EventType::BuyMarket:
    case EventType::SellLimitShort:
    case EventType::SellCancelShort:
    case EventType::SellLimitLong:
    case EventType::SellCancelLong: return Side::Sell;
    default: return Side::Buy;
  }
}

}  // namespace

void apply_event(BookState& state, const EventKind& event, const ModelSpec& spec, Rng& rng,
                 std::vector<TouchedTick>* touched) {
  const bool gzi = spec.variant == Variant::Gzi;
  const GziParams& g = spec.gzi;
  const int n = state.ticks();
  Mutator m(state, touched);
  const Side side = event_side(event.type);
  const int p = event.tick;

  switch (event.type) {
    case EventType::BuyMarket:
    case EventType::SellMarket: {
      if (state.empty(side)) break;
      const int q = state.best(side);
      remove_one(m, side, q);
      if (gzi && state.total(side, q) == 0) inject_behind(m, side, q, g.eta, rng);
      break;
    }
    case EventType::SellLimitShort:
    case EventType::BuyLimitShort: {
      if (p < 1 || p > n) throw Error("internal: limit order outside grid");
      const int opp = state.best(opposite(side));
      if (side == Side::Sell ? p <= opp : p >= opp) throw Error("internal: limit order crosses the spread");
      const int q = state.best(side);
      if (gzi && improves(side, p, q)) {
        if (q >= 1 && q <= n && g.alpha > 0.0) {
          for (Term term : {Term::Short, Term::Long}) {
            const auto c = state.count(side, term, q);
            if (c == 0) continue;
            const auto kept = g.alpha >= 1.0 ? 0 : std::binomial_distribution<std::int64_t>(c, 1.0 - g.alpha)(rng);
            m.set(side, term, q, kept);
          }
        }
        if (g.gamma > 0.0) {
          const int step = side == Side::Sell ? 1 : -1;
          for (int r = p + step; r != q; r += step) {
            if (r < 1 || r > n) break;
            const auto k = poisson(rng, g.gamma);
            if (k > 0) m.add(side, Term::Short, r, k);
          }
        }
      }
      m.add(side, Term::Short, p, 1);
      break;
    }
    case EventType::SellCancelShort:
    case EventType::BuyCancelShort: {
      if (state.count(side, Term::Short, p) <= 0) throw Error("internal: cancelling from an empty level");
      const bool wasBest = p == state.best(side);
      m.add(side, Term::Short, p, -1);
      if (gzi && wasBest && state.total(side, p) == 0) inject_behind(m, side, p, g.eta, rng);
      break;
    }
    case EventType::SellLimitLong:
    case EventType::BuyLimitLong:
      if (p < 1 || p > n) throw Error("internal: limit order outside grid");
      m.add(side, Term::Long, p, 1);
      break;
    case EventType::SellCancelLong:
    case EventType::BuyCancelLong:
      if (state.count(side, Term::Long, p) <= 0) throw Error("internal: cancelling from an empty level");
      m.add(side, Term::Long, p, -1);
      break;
  }
  m.convert();
}

BookState applied(const BookState& state, const EventKind& event, const ModelSpec& spec, Rng& rng) {
  BookState out = state;
  apply_event(out, event, spec, rng);
  return out;
}

std::optional<StepResult> step(const BookState& state, const ModelSpec& spec, Rng& rng) {
  const auto rates = event_rates(state, spec);
  double total = 0.0;
  for (const auto& r : rates) total += r.rate;
  if (!(total > 0.0)) return std::nullopt;
  StepResult out{rng.exponential(total), rates.back().event, state};
  double u = rng.uniform() * total;
  for (const auto& r : rates) {
    if (u < r.rate) {
      out.event = r.event;
      break;
    }
    u -= r.rate;
  }
  apply_event(out.state, out.event, spec, rng);
  return out;
}

// ---------------------------------------------------------------------------

Simulator::Simulator(const ModelSpec& spec, std::uint64_t seed, std::optional<BookState> initial)
    : model_(spec),
      gzi_(spec.variant == Variant::Gzi),
      constantCancel_(spec.variant != Variant::ContStyle),
      state_(initial ? *initial : BookState(spec.grid.ticks())),
      rng_(seed) {
  const int n = spec.grid.ticks();
  if (state_.ticks() != n) throw ConfigError("initial book does not match the model grid");
  if (!gzi_) {
    for (Side side : {Side::Sell, Side::Buy}) {
      for (int p = 1; p <= n; ++p) {
        if (state_.count(side, Term::Long, p) != 0) throw ConfigError("classical ZI models have no long-term orders");
      }
    }
  }
  if (state_.ask() <= state_.bid()) throw ConfigError("initial book is crossed");
  {
    std::vector<TouchedTick> ignored;
    Mutator m(state_, &ignored);
    m.convert();
  }

  for (Side side : {Side::Sell, Side::Buy}) {
    for (Term term : {Term::Short, Term::Long}) {
      auto& table = arrivals_[cat_index(side, term)];
      table.byDistance = spec.variant == Variant::ContStyle;
      table.cum.assign(static_cast<std::size_t>(n) + 1, 0.0);
      for (int i = 1; i <= n; ++i) {
        double w = 0.0;
        if (table.byDistance) {
          // Distance i from the opposite quote; evaluate with a quote that
          // makes the tick admissible.
          if (term == Term::Short) {
            w = i <= static_cast<int>(spec.cont.kappa.size()) ? spec.cont.kappa[static_cast<std::size_t>(i - 1)] : 0.0;
          }
        } else {
          // Rates do not depend on the quotes inside the admissible range;
          // pick quotes that admit every tick.
          const int a = side == Side::Sell && term == Term::Long ? 0 : n + 1;
          const int b = side == Side::Buy && term == Term::Long ? n + 1 : 0;
          w = model_.arrival(side, term, a, b, i);
        }
        table.cum[static_cast<std::size_t>(i)] = table.cum[static_cast<std::size_t>(i - 1)] + w;
      }
      counts_[cat_index(side, term)] = FenwickTree(static_cast<std::size_t>(n));
      cancelRate_[cat_index(side, term)] =
          constantCancel_ ? model_.cancel_per_order(side, term, n + 1, 0, 1) : 0.0;
    }
  }
  sync_all();
}

void Simulator::sync_tick(Side side, int p) {
  for (Term term : {Term::Short, Term::Long}) {
    counts_[cat_index(side, term)].set(static_cast<std::size_t>(p), state_.count(side, term, p));
  }
}

void Simulator::sync_all() {
  for (Side side : {Side::Sell, Side::Buy}) {
    for (int p = 1; p <= state_.ticks(); ++p) sync_tick(side, p);
  }
}

void Simulator::arrival_range(Side side, Term term, int& lo, int& hi) const {
  const int n = state_.ticks();
  const int a = state_.ask();
  const int b = state_.bid();
  const auto& table = arrivals_[cat_index(side, term)];
  if (side == Side::Sell) {
    const int floor = term == Term::Short ? b : a;  // admissible p > floor
    lo = floor + 1;
    hi = n;
    if (table.byDistance) {
      lo = 1;
      hi = n - b;  // d = p - b
    }
  } else {
    const int ceil = term == Term::Short ? a : b;  // admissible p < ceil
    lo = 1;
    hi = ceil - 1;
    if (table.byDistance) {
      lo = 1;
      hi = a - 1;  // d = a - p
    }
  }
  lo = std::max(lo, 1);
  hi = std::min(hi, n);
}

double Simulator::arrival_total(Side side, Term term) const {
  int lo = 0, hi = 0;
  arrival_range(side, term, lo, hi);
  if (hi < lo) return 0.0;
  const auto& cum = arrivals_[cat_index(side, term)].cum;
  return std::max(0.0, cum[static_cast<std::size_t>(hi)] - cum[static_cast<std::size_t>(lo - 1)]);
}

int Simulator::sample_arrival(Side side, Term term, double u) const {
  int lo = 0, hi = 0;
  arrival_range(side, term, lo, hi);
  const auto& table = arrivals_[cat_index(side, term)];
  const auto& cum = table.cum;
  const double target = cum[static_cast<std::size_t>(lo - 1)] + u;
  auto it = std::upper_bound(cum.begin() + lo, cum.begin() + hi + 1, target);
  int idx = it == cum.begin() + hi + 1 ? hi : static_cast<int>(it - cum.begin());
  // Rounding may land on a zero-weight index; step to a positive one.
  while (idx > lo && cum[static_cast<std::size_t>(idx)] == cum[static_cast<std::size_t>(idx - 1)]) --idx;
  while (idx < hi && cum[static_cast<std::size_t>(idx)] == cum[static_cast<std::size_t>(idx - 1)]) ++idx;
  if (!table.byDistance) return idx;
  return side == Side::Sell ? state_.bid() + idx : state_.ask() - idx;
}

double Simulator::cancel_total(Side side, Term term) const {
  const auto c = cat_index(side, term);
  if (constantCancel_) return cancelRate_[c] * static_cast<double>(counts_[c].total());
  double sum = 0.0;
  const int a = state_.ask(), b = state_.bid();
  for (int p = 1; p <= state_.ticks(); ++p) {
    const auto k = state_.count(side, term, p);
    if (k > 0) sum += static_cast<double>(k) * model_.cancel_per_order(side, term, a, b, p);
  }
  return sum;
}

int Simulator::sample_cancel(Side side, Term term, double u) const {
  const auto c = cat_index(side, term);
  if (constantCancel_) {
    auto k = static_cast<std::int64_t>(u / cancelRate_[c]);
    k = std::clamp<std::int64_t>(k, 0, counts_[c].total() - 1);
    return static_cast<int>(counts_[c].find(k));
  }
  const int a = state_.ask(), b = state_.bid();
  int last = 0;
  for (int p = 1; p <= state_.ticks(); ++p) {
    const auto k = state_.count(side, term, p);
    if (k == 0) continue;
    const double w = static_cast<double>(k) * model_.cancel_per_order(side, term, a, b, p);
    if (w <= 0.0) continue;
    last = p;
    if (u < w) return p;
    u -= w;
  }
  return last;
}

double Simulator::total_rate() const {
  const int a = state_.ask(), b = state_.bid();
  double sum = model_.market(Side::Sell, a, b) + model_.market(Side::Buy, a, b);
  for (Side side : {Side::Sell, Side::Buy}) {
    for (Term term : {Term::Short, Term::Long}) sum += arrival_total(side, term) + cancel_total(side, term);
  }
  return sum;
}

std::optional<Simulator::Outcome> Simulator::step() {
  const int a = state_.ask(), b = state_.bid();
  std::array<double, kCategories> w{};
  w[0] = model_.market(Side::Sell, a, b);
  w[1] = model_.market(Side::Buy, a, b);
  for (Side side : {Side::Sell, Side::Buy}) {
    for (Term term : {Term::Short, Term::Long}) {
      w[2 + cat_index(side, term)] = arrival_total(side, term);
      w[6 + cat_index(side, term)] = cancel_total(side, term);
    }
  }
  double total = 0.0;
  for (double x : w) total += x;
  if (!(total > 0.0)) return std::nullopt;

  const double dt = rng_.exponential(total);
  double u = rng_.uniform() * total;
  std::size_t cat = 0;
  for (; cat + 1 < kCategories; ++cat) {
    if (w[cat] > 0.0 && u < w[cat]) break;
    u -= w[cat];
  }
  while (w[cat] <= 0.0) --cat;  // u overshot through rounding
  u = std::clamp(u, 0.0, w[cat] * (1.0 - 1e-15));

  EventKind event;
  if (cat < 2) {
    event = market_event(cat == 0 ? Side::Sell : Side::Buy);
  } else {
    const std::size_t k = (cat - 2) % 4;
    const Side side = k < 2 ? Side::Sell : Side::Buy;
    const Term term = k % 2 == 0 ? Term::Short : Term::Long;
    event = cat < 6 ? limit_event(side, term, sample_arrival(side, term, u))
                    : cancel_event(side, term, sample_cancel(side, term, u));
  }

  touched_.clear();
  apply_event(state_, event, model_.spec(), rng_, &touched_);
  for (const auto& t : touched_) sync_tick(t.side, t.tick);

  const double next = time_ + dt;
  time_ = next > time_ ? next : std::nextafter(time_, std::numeric_limits<double>::infinity());
  ++events_;
  return Outcome{dt, event};
}

// ---------------------------------------------------------------------------

namespace {

L1Record snapshot(const BookState& s, double time, double mu) {
  const int n = s.ticks();
  L1Record r;
  r.time = time;
  r.ask = s.ask();
  r.bid = s.bid();
  r.askSize = s.ask() <= n ? static_cast<double>(s.total(Side::Sell, s.ask())) * mu : 0.0;
  r.bidSize = s.bid() >= 1 ? static_cast<double>(s.total(Side::Buy, s.bid())) * mu : 0.0;
  return r;
}

bool same_quotes(const L1Record& x, const L1Record& y) {
  return x.ask == y.ask && x.bid == y.bid && x.askSize == y.askSize && x.bidSize == y.bidSize;
}

}  // namespace

SimTrace simulate(const ModelSpec& spec, const StopRule& stop, std::uint64_t seed, RecordMode record,
                  const SimOptions& options) {
  validate(spec);
  if (stop.maxEvents == 0 && !(stop.maxTime > 0.0)) throw ConfigError("simulation needs an event or time limit");
  Simulator sim(spec, seed, options.initial);
  SimTrace trace;
  trace.seed = seed;
  const double mu = spec.shares_per_order();

  for (std::uint64_t i = 0; i < options.burnIn; ++i) {
    if (!sim.step()) {
      trace.absorbed = true;
      break;
    }
  }
  const double start = sim.time();
  trace.records.push_back(snapshot(sim.state(), start, mu));
  if (record == RecordMode::L1WithBooks) trace.books.push_back(sim.state());

  while (!trace.absorbed) {
    if (stop.maxEvents > 0 && trace.eventCount >= stop.maxEvents) break;
    const auto out = sim.step();
    if (!out) {
      trace.absorbed = true;
      break;
    }
    if (stop.maxTime > 0.0 && sim.time() - start > stop.maxTime) break;
    ++trace.eventCount;
    const L1Record r = snapshot(sim.state(), sim.time(), mu);
    if (!same_quotes(r, trace.records.back())) {
      trace.records.push_back(r);
      if (record == RecordMode::L1WithBooks) trace.books.push_back(sim.state());
    }
  }
  trace.simTime = sim.time();
  return trace;
}

void write_book_sidecar(std::ostream& out, const SimTrace& trace) {
  out << "record,side,term,tick,count\n";
  for (std::size_t k = 0; k < trace.books.size(); ++k) {
    const BookState& s = trace.books[k];
    for (Side side : {Side::Sell, Side::Buy}) {
      for (Term term : {Term::Short, Term::Long}) {
        for (int p = 1; p <= s.ticks(); ++p) {
          const auto c = s.count(side, term, p);
          if (c == 0) continue;
          out << k << ',' << (side == Side::Sell ? 'S' : 'B') << ',' << (term == Term::Short ? "short" : "long")
              << ',' << p << ',' << c << '\n';
        }
      }
    }
  }
}

}  // namespace gzi
