#ifndef MUA_AUCTION_HPP
#define MUA_AUCTION_HPP

#include <string>
#include <utility>
#include <vector>

#include "mua/money.hpp"

namespace mua {

// Players are indexed 0..n-1 in memory and printed as 1..n. Ties between
// equal bids go to the lower index.
using PlayerId = int;

enum class PricingRule { kKthPrice, kKPlus1Price };

PricingRule parse_pricing_rule(std::string_view name);  // "kth" | "kplus1"
std::string to_string(PricingRule rule);

// A weakly decreasing list of non-negative amounts, implicitly zero-padded.
// Shared representation for marginal values and per-unit bids.
class DecreasingVector {
 public:
  DecreasingVector() = default;
  explicit DecreasingVector(std::vector<Money> entries);

  // 1-based; zero beyond the stored length.
  Money at(int j) const {
    return j >= 1 && j <= static_cast<int>(entries_.size()) ? entries_[j - 1] : Money(0);
  }
  const std::vector<Money>& entries() const { return entries_; }
  int size() const { return static_cast<int>(entries_.size()); }

  // Copy zero-padded (or truncated) to exactly `k` entries.
  std::vector<Money> padded(int k) const;

  bool operator==(const DecreasingVector& o) const;

 protected:
  std::vector<Money> entries_;
};

class Valuation : public DecreasingVector {
 public:
  using DecreasingVector::DecreasingVector;

  Money marginal(int j) const { return at(j); }
  // V(ell) = sum of the first ell marginals.
  Money cumulative(int ell) const;
  // Every marginal for units 1..k strictly positive.
  bool hungry(int k) const;
};

class BidVector : public DecreasingVector {
 public:
  using DecreasingVector::DecreasingVector;

  Money bid(int j) const { return at(j); }

  static BidVector zeros(int k) { return BidVector(std::vector<Money>(k, Money(0))); }
};

using BidProfile = std::vector<BidVector>;

// One entry of the globally sorted bid list.
struct BidSlot {
  PlayerId player = 0;
  int unit = 0;  // 1-based unit index within the player's vector
  Money bid;
  bool operator==(const BidSlot&) const = default;
};

struct AuctionOutcome {
  Money price;
  std::vector<int> allocation;       // x_i per player
  std::vector<BidSlot> sorted_bids;  // all n*K bids, highest priority first
};

// True when `a` is served before `b`: higher bid, then lower player index,
// then lower unit index.
inline bool has_priority(const BidSlot& a, const BidSlot& b) {
  if (a.bid != b.bid) return a.bid > b.bid;
  if (a.player != b.player) return a.player < b.player;
  return a.unit < b.unit;
}

// Runs one uniform-price auction of `units` identical units.
// Throws ValidationError for units <= 0 or an empty profile.
AuctionOutcome run_auction(const BidProfile& profile, PricingRule rule, int units);

// V_i(x_i) - price * x_i; may be negative.
Money utility(const Valuation& valuation, const AuctionOutcome& outcome, PlayerId player);

struct WelfareRevenue {
  Money welfare;
  Money revenue;
};

WelfareRevenue welfare_and_revenue(const std::vector<Valuation>& valuations,
                                   const AuctionOutcome& outcome);

}  // namespace mua

#endif  // MUA_AUCTION_HPP
