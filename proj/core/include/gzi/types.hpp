#pragma once

#include <cstdint>
#include <vector>

namespace gzi {

enum class Side : std::uint8_t { Sell, Buy };
enum class Term : std::uint8_t { Short, Long };

/// Bounded price grid; prices are the integer ticks 1..n.
class TickGrid {
 public:
  explicit TickGrid(int n = 2);
  int ticks() const noexcept { return n_; }
  bool contains(int p) const noexcept { return p >= 1 && p <= n_; }

  friend bool operator==(const TickGrid&, const TickGrid&) = default;

 private:
  int n_;
};

/// Per-tick order counts on both sides of the book.
///
/// Short-term and long-term orders are held separately; classical ZI
/// variants never touch the long-term arrays. The best quotes are cached and
/// kept consistent by every mutator: ask() is n+1 on an empty sell book and
/// bid() is 0 on an empty buy book.
class BookState {
 public:
  explicit BookState(int n = 2);

  int ticks() const noexcept { return n_; }

  std::int64_t count(Side side, Term term, int p) const;
  /// Short plus long count at tick p.
  std::int64_t total(Side side, int p) const;

  void set(Side side, Term term, int p, std::int64_t value);
  void add(Side side, Term term, int p, std::int64_t delta);

  int ask() const noexcept { return ask_; }
  int bid() const noexcept { return bid_; }
  int best(Side side) const noexcept { return side == Side::Sell ? ask_ : bid_; }
  bool empty(Side side) const noexcept {
    return side == Side::Sell ? ask_ == n_ + 1 : bid_ == 0;
  }
  int spread() const noexcept { return ask_ - bid_; }

  /// Sum of all counts on one side.
  std::int64_t depth(Side side) const;

  /// Moves long-term orders sitting at the best quotes into the short-term
  /// arrays. Returns true if anything moved.
  bool convert_at_quotes();

  /// Swaps the sides and reflects prices p -> n+1-p.
  BookState mirrored() const;

  friend bool operator==(const BookState& a, const BookState& b) {
    return a.n_ == b.n_ && a.counts_ == b.counts_;
  }

 private:
  std::size_t slot(Side side, Term term, int p) const;
  void refresh_after_change(Side side, int p);

  int n_;
  int ask_;
  int bid_;
  // [side][term][tick], ticks 0..n+1 with the two padding slots always zero.
  std::vector<std::int64_t> counts_;
};

/// Natural order-flow parameters of the fitted model.
struct Theta {
  double kappa = 0.0;   ///< short-term arrivals one tick above the ask, orders/s
  double gamma = 0.0;   ///< mean orders injected per intermediate tick at a multi-tick down-jump
  double lambda = 0.0;  ///< long-term arrivals per tick, orders/s
  double beta = 0.0;    ///< (1 - alpha) / mu, per share
  double eta = 0.0;     ///< mean orders injected one tick above the ask at an up-jump
  double rho = 0.0;     ///< short-term cancellation rate per order, 1/s

  friend bool operator==(const Theta&, const Theta&) = default;
};

/// Reparametrization used by the estimator: phi = kappa/rho, zeta = phi + eta.
struct Upsilon {
  double phi = 0.0;
  double gamma = 0.0;
  double lambda = 0.0;
  double beta = 0.0;
  double zeta = 0.0;
  double rho = 0.0;

  friend bool operator==(const Upsilon&, const Upsilon&) = default;
};

/// Throws DomainError when rho == 0 and kappa > 0, or on negative input.
Upsilon theta_to_upsilon(const Theta& t);
/// Throws DomainError if the result would have a negative component.
Theta upsilon_to_theta(const Upsilon& u);

/// Throws DomainError unless every component is finite and non-negative.
void validate(const Theta& t);

/// One L1 snapshot. Prices are ticks, sizes are shares.
struct L1Record {
  double time = 0.0;
  int ask = 0;
  double askSize = 0.0;
  int bid = 0;
  double bidSize = 0.0;

  friend bool operator==(const L1Record&, const L1Record&) = default;
};

/// Quote-jump sample built at the i-th jump epoch.
struct JumpSample {
  std::int64_t index = 0;
  double dt = 0.0;      ///< seconds since the previous jump epoch
  int u = 0;            ///< sign of the ask move at this epoch
  int uPrev = 0;        ///< sign of the ask move at the previous epoch
  bool e = false;       ///< ask moved up by more than one tick
  double mShares = 0.0; ///< displayed volume one tick above the ask after the previous jump
  bool usable = false;  ///< uPrev == -1 && u == +1 && dt > 0

  // Not part of the CSV contract; NaN when read back from a samples file.
  double askMove = 0.0;  ///< ask change in ticks at this epoch
  double spread = 0.0;   ///< spread in ticks right after this epoch
};

}  // namespace gzi
