#include "mua/auction.hpp"

#include <algorithm>

namespace mua {

PricingRule parse_pricing_rule(std::string_view name) {
  if (name == "kth") return PricingRule::kKthPrice;
  if (name == "kplus1") return PricingRule::kKPlus1Price;
  throw ValidationError("unknown pricing rule '" + std::string(name) + "' (expected kth|kplus1)");
}

std::string to_string(PricingRule rule) {
  return rule == PricingRule::kKthPrice ? "kth" : "kplus1";
}

DecreasingVector::DecreasingVector(std::vector<Money> entries) : entries_(std::move(entries)) {
  for (std::size_t j = 0; j < entries_.size(); ++j) {
    if (entries_[j] < Money(0)) {
      throw ValidationError("negative entry at unit " + std::to_string(j + 1));
    }
    if (j > 0 && entries_[j] > entries_[j - 1]) {
      throw ValidationError("entries must be weakly decreasing (unit " + std::to_string(j + 1) +
                            " exceeds unit " + std::to_string(j) + ")");
    }
  }
}

std::vector<Money> DecreasingVector::padded(int k) const {
  std::vector<Money> out(static_cast<std::size_t>(k), Money(0));
  for (int j = 0; j < k && j < size(); ++j) out[j] = entries_[j];
  return out;
}

bool DecreasingVector::operator==(const DecreasingVector& o) const {
  const int k = std::max(size(), o.size());
  for (int j = 1; j <= k; ++j) {
    if (at(j) != o.at(j)) return false;
  }
  return true;
}

Money Valuation::cumulative(int ell) const {
  Money total(0);
  for (int j = 1; j <= ell; ++j) total += marginal(j);
  return total;
}

bool Valuation::hungry(int k) const { return marginal(k) > Money(0); }

AuctionOutcome run_auction(const BidProfile& profile, PricingRule rule, int units) {
  if (units <= 0) throw ValidationError("number of units K must be positive");
  if (profile.empty()) throw ValidationError("auction needs at least one player");

  const int n = static_cast<int>(profile.size());
  AuctionOutcome out;
  out.allocation.assign(static_cast<std::size_t>(n), 0);
  out.sorted_bids.reserve(static_cast<std::size_t>(n) * units);
  for (PlayerId i = 0; i < n; ++i) {
    for (int j = 1; j <= units; ++j) {
      out.sorted_bids.push_back(BidSlot{i, j, profile[i].bid(j)});
    }
  }
  std::sort(out.sorted_bids.begin(), out.sorted_bids.end(), has_priority);

  for (int k = 0; k < units; ++k) ++out.allocation[out.sorted_bids[k].player];

  // Price is the K-th or (K+1)-st entry; missing entries count as 0.
  const std::size_t rank = rule == PricingRule::kKthPrice ? units : units + 1;
  out.price = rank <= out.sorted_bids.size() ? out.sorted_bids[rank - 1].bid : Money(0);
  return out;
}

Money utility(const Valuation& valuation, const AuctionOutcome& outcome, PlayerId player) {
  const int x = outcome.allocation.at(player);
  return valuation.cumulative(x) - x * outcome.price;
}

WelfareRevenue welfare_and_revenue(const std::vector<Valuation>& valuations,
                                   const AuctionOutcome& outcome) {
  WelfareRevenue wr;
  int units = 0;
  for (std::size_t i = 0; i < outcome.allocation.size(); ++i) {
    wr.welfare += valuations.at(i).cumulative(outcome.allocation[i]);
    units += outcome.allocation[i];
  }
  wr.revenue = units * outcome.price;
  return wr;
}

}  // namespace mua
