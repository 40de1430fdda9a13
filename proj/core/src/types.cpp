#include "gzi/types.hpp"

#include <cmath>
#include <string>

#include "gzi/error.hpp"

namespace gzi {

TickGrid::TickGrid(int n) : n_(n) {
  if (n < 2) throw ConfigError("tick grid needs at least 2 ticks, got " + std::to_string(n));
}

BookState::BookState(int n)
    : n_(TickGrid(n).ticks()),
      ask_(n + 1),
      bid_(0),
      counts_(4 * static_cast<std::size_t>(n + 2), 0) {}

std::size_t BookState::slot(Side side, Term term, int p) const {
  const auto block = static_cast<std::size_t>(side) * 2 + static_cast<std::size_t>(term);
  return block * static_cast<std::size_t>(n_ + 2) + static_cast<std::size_t>(p);
}

std::int64_t BookState::count(Side side, Term term, int p) const {
  if (p < 1 || p > n_) return 0;
  return counts_[slot(side, term, p)];
}

std::int64_t BookState::total(Side side, int p) const {
  if (p < 1 || p > n_) return 0;
  return counts_[slot(side, Term::Short, p)] + counts_[slot(side, Term::Long, p)];
}

void BookState::set(Side side, Term term, int p, std::int64_t value) {
  if (p < 1 || p > n_) throw DomainError("tick " + std::to_string(p) + " outside grid");
  if (value < 0) throw DomainError("negative order count");
  counts_[slot(side, term, p)] = value;
  refresh_after_change(side, p);
}

void BookState::add(Side side, Term term, int p, std::int64_t delta) {
  if (p < 1 || p > n_) throw DomainError("tick " + std::to_string(p) + " outside grid");
  auto& c = counts_[slot(side, term, p)];
  if (c + delta < 0) throw DomainError("order count would become negative");
  c += delta;
  refresh_after_change(side, p);
}

void BookState::refresh_after_change(Side side, int p) {
  const bool occupied = total(side, p) > 0;
  if (side == Side::Sell) {
    if (occupied && p < ask_) {
      ask_ = p;
    } else if (!occupied && p == ask_) {
      int q = p + 1;
      while (q <= n_ && total(Side::Sell, q) == 0) ++q;
      ask_ = q;
    }
  } else {
    if (occupied && p > bid_) {
      bid_ = p;
    } else if (!occupied && p == bid_) {
      int q = p - 1;
      while (q >= 1 && total(Side::Buy, q) == 0) --q;
      bid_ = q;
    }
  }
}

std::int64_t BookState::depth(Side side) const {
  std::int64_t sum = 0;
  for (int p = 1; p <= n_; ++p) sum += total(side, p);
  return sum;
}

bool BookState::convert_at_quotes() {
  bool moved = false;
  for (Side side : {Side::Sell, Side::Buy}) {
    const int q = best(side);
    if (q < 1 || q > n_) continue;
    auto& lng = counts_[slot(side, Term::Long, q)];
    if (lng > 0) {
      counts_[slot(side, Term::Short, q)] += lng;
      lng = 0;
      moved = true;
    }
  }
  return moved;
}

BookState BookState::mirrored() const {
  BookState out(n_);
  for (int p = 1; p <= n_; ++p) {
    const int q = n_ + 1 - p;
    for (Term term : {Term::Short, Term::Long}) {
      out.counts_[out.slot(Side::Buy, term, q)] = count(Side::Sell, term, p);
      out.counts_[out.slot(Side::Sell, term, q)] = count(Side::Buy, term, p);
    }
  }
  out.ask_ = n_ + 1 - bid_;
  out.bid_ = n_ + 1 - ask_;
  return out;
}

void validate(const Theta& t) {
  for (double v : {t.kappa, t.gamma, t.lambda, t.beta, t.eta, t.rho}) {
    if (!std::isfinite(v) || v < 0.0) throw DomainError("Theta components must be finite and >= 0");
  }
}

Upsilon theta_to_upsilon(const Theta& t) {
  validate(t);
  double phi = 0.0;
  if (t.rho > 0.0) {
    phi = t.kappa / t.rho;
  } else if (t.kappa > 0.0) {
    throw DomainError("undefined reparametrization: rho = 0 with kappa > 0");
  }
  return Upsilon{phi, t.gamma, t.lambda, t.beta, phi + t.eta, t.rho};
}

Theta upsilon_to_theta(const Upsilon& u) {
  Theta t{u.phi * u.rho, u.gamma, u.lambda, u.beta, u.zeta - u.phi, u.rho};
  // zeta == phi up to rounding is a valid boundary point.
  if (t.eta < 0.0 && t.eta > -1e-12 * (1.0 + std::abs(u.zeta))) t.eta = 0.0;
  if (u.phi < 0.0 || t.eta < 0.0) throw DomainError("Upsilon violates phi >= 0 or zeta >= phi");
  validate(t);
  return t;
}

}  // namespace gzi
