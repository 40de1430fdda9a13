#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gzi/model_spec.hpp"
#include "gzi/types.hpp"

namespace gzi {

enum class EventType : std::uint8_t {
  BuyMarket,
  SellMarket,
  SellLimitShort,
  BuyLimitShort,
  SellCancelShort,
  BuyCancelShort,
  SellLimitLong,
  BuyLimitLong,
  SellCancelLong,
  BuyCancelLong,
};

struct EventKind {
  EventType type = EventType::BuyMarket;
  int tick = 0;  ///< 0 for market orders

  friend bool operator==(const EventKind&, const EventKind&) = default;
};

std::string to_string(const EventKind& e);

EventKind limit_event(Side side, Term term, int p);
EventKind cancel_event(Side side, Term term, int p);
EventKind market_event(Side consumed);

struct RatedEvent {
  EventKind event;
  double rate = 0.0;
};

/// Intensity functions of one model variant, evaluated at quotes (a, b).
///
/// Arrival rates are per admissible tick and are zero outside the admissible
/// set (short sells p > b, short buys p < a, long sells p > a, long buys
/// p < b). Cancellation rates are per resting order.
class RateModel {
 public:
  explicit RateModel(const ModelSpec& spec);

  const ModelSpec& spec() const noexcept { return spec_; }
  int ticks() const noexcept { return n_; }

  /// Rate of market orders consuming `side` (BuyMarket consumes Sell).
  double market(Side consumed, int a, int b) const;
  double arrival(Side side, Term term, int a, int b, int p) const;
  double cancel_per_order(Side side, Term term, int a, int b, int p) const;

  bool has_long_term() const noexcept { return spec_.variant == Variant::Gzi; }

  /// True when arrival and cancellation rates do not depend on (a, b) beyond
  /// the admissible range, so they need no refresh on a quote change.
  bool quote_independent_rates() const noexcept;

 private:
  ModelSpec spec_;
  int n_;
};

/// Every event with a strictly positive rate in `state`, in a fixed order.
std::vector<RatedEvent> event_rates(const BookState& state, const ModelSpec& spec);

/// Sum of all event rates.
double total_rate(const BookState& state, const ModelSpec& spec);

struct ErgodicityDiagnosis {
  bool sufficient = false;
  std::string details;
  double upRate = 0.0;        ///< L: dominating chain birth rate
  double downBase = 0.0;      ///< min theta + min vartheta
  double downSlope = 0.0;     ///< min over (a,b,p) of rho ^ sigma
  double increaseBound = 0.0; ///< GZI: 2n(lambda + eta + gamma + kappa)
};

/// Checks the sufficient conditions for ergodicity (positive cancellation and
/// market-order rates for ZI variants, positive short-term cancellation for
/// GZI) and builds the dominating birth-death rates.
ErgodicityDiagnosis check_ergodicity(const ModelSpec& spec);

}  // namespace gzi
