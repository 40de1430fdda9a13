#include "gzi/models.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "gzi/error.hpp"

namespace gzi {

std::string to_string(const EventKind& e) {
  static const char* names[] = {"BuyMarket",       "SellMarket",     "SellLimitShort", "BuyLimitShort",
                                "SellCancelShort", "BuyCancelShort", "SellLimitLong",  "BuyLimitLong",
                                "SellCancelLong",  "BuyCancelLong"};
  std::string s = names[static_cast<int>(e.type)];
  if (e.type != EventType::BuyMarket && e.type != EventType::SellMarket) s += "(" + std::to_string(e.tick) + ")";
  return s;
}

EventKind limit_event(Side side, Term term, int p) {
  if (term == Term::Short) return {side == Side::Sell ? EventType::SellLimitShort : EventType::BuyLimitShort, p};
  return {side == Side::Sell ? EventType::SellLimitLong : EventType::BuyLimitLong, p};
}

EventKind cancel_event(Side side, Term term, int p) {
  if (term == Term::Short) return {side == Side::Sell ? EventType::SellCancelShort : EventType::BuyCancelShort, p};
  return {side == Side::Sell ? EventType::SellCancelLong : EventType::BuyCancelLong, p};
}

EventKind market_event(Side consumed) {
  return {consumed == Side::Sell ? EventType::BuyMarket : EventType::SellMarket, 0};
}

RateModel::RateModel(const ModelSpec& spec) : spec_(spec), n_(spec.grid.ticks()) { validate(spec_); }

bool RateModel::quote_independent_rates() const noexcept {
  return spec_.variant == Variant::SmithBounded || spec_.variant == Variant::Gzi ||
         spec_.variant == Variant::Stigler || spec_.variant == Variant::LuckockDiscrete;
}

namespace {

double table_at(const std::vector<double>& table, int d) {
  if (d < 1 || d > static_cast<int>(table.size())) return 0.0;
  return table[static_cast<std::size_t>(d - 1)];
}

bool admissible(Side side, Term term, int a, int b, int p) {
  if (side == Side::Sell) return term == Term::Short ? p > b : p > a;
  return term == Term::Short ? p < a : p < b;
}

}  // namespace

double RateModel::market(Side consumed, int a, int b) const {
  switch (spec_.variant) {
    case Variant::Stigler:
    case Variant::LuckockDiscrete: {
      const auto& l = spec_.luckock;
      if (consumed == Side::Sell) return l.scale * l.K[static_cast<std::size_t>(b)];
      return l.scale * (1.0 - l.L[static_cast<std::size_t>(a - 1)]);
    }
    case Variant::SmithBounded: return spec_.smith.theta;
    case Variant::ContStyle: return spec_.cont.theta;
    case Variant::Gzi: return spec_.gzi.theta;
  }
  return 0.0;
}

double RateModel::arrival(Side side, Term term, int a, int b, int p) const {
  if (p < 1 || p > n_ || !admissible(side, term, a, b, p)) return 0.0;
  switch (spec_.variant) {
    case Variant::Stigler:
    case Variant::LuckockDiscrete: {
      if (term == Term::Long) return 0.0;
      const auto& cdf = side == Side::Sell ? spec_.luckock.K : spec_.luckock.L;
      const auto i = static_cast<std::size_t>(p);
      return spec_.luckock.scale * (cdf[i] - cdf[i - 1]);
    }
    case Variant::SmithBounded: return term == Term::Short ? spec_.smith.kappa : 0.0;
    case Variant::ContStyle:
      if (term == Term::Long) return 0.0;
      return table_at(spec_.cont.kappa, side == Side::Sell ? p - b : a - p);
    case Variant::Gzi: return term == Term::Short ? spec_.gzi.kappa : spec_.gzi.lambda;
  }
  return 0.0;
}

double RateModel::cancel_per_order(Side side, Term term, int a, int b, int p) const {
  if (p < 1 || p > n_) return 0.0;
  switch (spec_.variant) {
    case Variant::Stigler:
    case Variant::LuckockDiscrete: return 0.0;
    case Variant::SmithBounded: return term == Term::Short ? spec_.smith.rho : 0.0;
    case Variant::ContStyle:
      if (term == Term::Long) return 0.0;
      return table_at(spec_.cont.rho, side == Side::Sell ? p - b : a - p);
    case Variant::Gzi: return term == Term::Short ? spec_.gzi.rho : spec_.gzi.varrho;
  }
  return 0.0;
}

std::vector<RatedEvent> event_rates(const BookState& state, const ModelSpec& spec) {
  const RateModel model(spec);
  const int n = spec.grid.ticks();
  if (state.ticks() != n) throw DomainError("book state and model use different grids");
  const int a = state.ask();
  const int b = state.bid();
  std::vector<RatedEvent> out;
  auto push = [&](EventKind e, double r) {
    if (r > 0.0) out.push_back({e, r});
  };
  push(market_event(Side::Sell), model.market(Side::Sell, a, b));
  push(market_event(Side::Buy), model.market(Side::Buy, a, b));
  for (Term term : {Term::Short, Term::Long}) {
    for (Side side : {Side::Sell, Side::Buy}) {
      for (int p = 1; p <= n; ++p) push(limit_event(side, term, p), model.arrival(side, term, a, b, p));
    }
    for (Side side : {Side::Sell, Side::Buy}) {
      for (int p = 1; p <= n; ++p) {
        const auto c = state.count(side, term, p);
        if (c > 0) push(cancel_event(side, term, p), static_cast<double>(c) * model.cancel_per_order(side, term, a, b, p));
      }
    }
  }
  return out;
}

double total_rate(const BookState& state, const ModelSpec& spec) {
  double sum = 0.0;
  for (const auto& e : event_rates(state, spec)) sum += e.rate;
  return sum;
}

ErgodicityDiagnosis check_ergodicity(const ModelSpec& spec) {
  const RateModel model(spec);
  const int n = spec.grid.ticks();
  ErgodicityDiagnosis d;
  std::ostringstream why;

  if (spec.variant == Variant::Gzi) {
    const auto& g = spec.gzi;
    d.upRate = 2.0 * n * (g.kappa + g.lambda);
    d.downBase = 2.0 * g.theta;
    d.downSlope = g.lambda > 0.0 ? std::min(g.rho, g.varrho) : g.rho;
    d.increaseBound = 2.0 * n * (g.lambda + g.eta + g.gamma + g.kappa);
    d.sufficient = g.rho > 0.0 && (g.lambda == 0.0 || g.varrho > 0.0);
    if (!(g.rho > 0.0)) why << "short-term cancellation rate rho is 0; ";
    if (g.lambda > 0.0 && !(g.varrho > 0.0)) why << "long-term orders arrive but are never cancelled (varrho = 0); ";
    if (d.sufficient) why << "rho > 0: total order count dominated by an ergodic birth-death chain";
    d.details = why.str();
    return d;
  }

  const double inf = std::numeric_limits<double>::infinity();
  double min_theta = inf, min_vartheta = inf, min_cancel = inf;
  std::vector<double> max_sell(static_cast<std::size_t>(n) + 1, 0.0), max_buy(max_sell);
  for (int b = 0; b <= n; ++b) {
    for (int a = b + 1; a <= n + 1; ++a) {
      min_theta = std::min(min_theta, model.market(Side::Sell, a, b));
      min_vartheta = std::min(min_vartheta, model.market(Side::Buy, a, b));
      for (int p = 1; p <= n; ++p) {
        auto sp = static_cast<std::size_t>(p);
        max_sell[sp] = std::max(max_sell[sp], model.arrival(Side::Sell, Term::Short, a, b, p));
        max_buy[sp] = std::max(max_buy[sp], model.arrival(Side::Buy, Term::Short, a, b, p));
        // Orders can rest at p >= a (sell) and p <= b (buy).
        if (p >= a) min_cancel = std::min(min_cancel, model.cancel_per_order(Side::Sell, Term::Short, a, b, p));
        if (p <= b) min_cancel = std::min(min_cancel, model.cancel_per_order(Side::Buy, Term::Short, a, b, p));
      }
    }
  }
  for (int p = 1; p <= n; ++p) d.upRate += max_sell[static_cast<std::size_t>(p)] + max_buy[static_cast<std::size_t>(p)];
  d.downBase = min_theta + min_vartheta;
  d.downSlope = min_cancel;
  if (!(min_theta > 0.0)) why << "buy market order rate theta vanishes somewhere; ";
  if (!(min_vartheta > 0.0)) why << "sell market order rate vartheta vanishes somewhere; ";
  if (!(min_cancel > 0.0)) why << "cancellation rate rho or sigma vanishes somewhere; ";
  d.sufficient = min_theta > 0.0 && min_vartheta > 0.0 && min_cancel > 0.0;
  if (d.sufficient) why << "rho, sigma, theta, vartheta > 0: dominated by an ergodic birth-death chain";
  d.details = why.str();
  return d;
}

}  // namespace gzi
