#ifndef MUA_EQUILIBRIUM_HPP
#define MUA_EQUILIBRIUM_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mua/auction.hpp"
#include "mua/money.hpp"

namespace mua {

// Units per player; all K units assigned.
using Allocation = std::vector<int>;

// t[i][j] = payment from i to j. Non-negative, zero diagonal.
class TransferProfile {
 public:
  TransferProfile() = default;
  explicit TransferProfile(int players);
  explicit TransferProfile(std::vector<std::vector<Money>> matrix);

  int players() const { return static_cast<int>(t_.size()); }
  Money at(PlayerId from, PlayerId to) const { return t_[from][to]; }
  void add(PlayerId from, PlayerId to, Money amount);
  void set(PlayerId from, PlayerId to, Money amount) { t_[from][to] = amount; }

  // Received minus paid.
  Money net(PlayerId i) const;
  bool is_zero() const;

 private:
  std::vector<std::vector<Money>> t_;
};

struct AuctionGame {
  std::vector<Valuation> valuations;
  int units = 0;
  PricingRule rule = PricingRule::kKPlus1Price;

  int players() const { return static_cast<int>(valuations.size()); }
};

// Raised when an exhaustive search would exceed its budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::int64_t kDefaultSearchBudget = 1'000'000;

// Greedy over the K largest marginals; ties to the lower player, then unit.
Allocation welfare_max_allocation(const std::vector<Valuation>& valuations, int units);

Money allocation_welfare(const std::vector<Valuation>& valuations, const Allocation& allocation);

// b_{i,j} = M for j <= z_i and 0 otherwise, with M the sum of all marginals.
// Requires n > K, every player hungry, and sum z = K.
BidProfile zero_price_profile(const Allocation& allocation, const std::vector<Valuation>& valuations,
                              int units);

// Every weakly decreasing vector in levels^K, lexicographically ascending.
std::vector<BidVector> monotone_vectors(const std::vector<Money>& levels, int units);

// Levels 0, 1, ..., max_ticks.
std::vector<Money> tick_levels(std::int64_t max_ticks);

// Auction utility plus net transfers.
std::vector<Money> game_utilities(const AuctionGame& game, const BidProfile& profile,
                                  const TransferProfile* transfers = nullptr);

struct Witness {
  std::vector<PlayerId> coalition;  // ascending
  BidProfile deviation;             // full profile after the deviation
  TransferProfile transfers;        // full transfer matrix after the deviation
  std::vector<Money> before;
  std::vector<Money> after;
  std::string kind;                 // "unilateral", "search", "stop-paying", "welfare", "zero-price"
};

struct StabilityReport {
  bool stable = true;
  std::optional<Witness> witness;
};

// Recomputes utilities from scratch and checks the blocking conditions:
// non-members keep their bids, non-members pay nothing to members, every
// member weakly gains and some member strictly gains.
bool validate_witness(const AuctionGame& game, const BidProfile& profile,
                      const TransferProfile& transfers, const Witness& witness);

// Exhaustive unilateral deviations over monotone vectors on `levels`.
StabilityReport is_pure_nash(const AuctionGame& game, const BidProfile& profile,
                             const std::vector<Money>& levels,
                             std::int64_t budget = kDefaultSearchBudget);

// Coalitions by increasing size, lexicographic within a size. Members
// deviate to any combination of grid vectors (or keep their own); with
// transfers, members pay nothing and the grand coalition additionally tries
// the welfare-repair and zero-price transfer templates.
StabilityReport find_blocking_coalition(const AuctionGame& game, const BidProfile& profile,
                                        const std::vector<Money>& levels, bool with_transfers,
                                        const TransferProfile* transfers = nullptr,
                                        std::int64_t budget = kDefaultSearchBudget);

// Grand-coalition witnesses used by the search. Each returns nullopt when its
// precondition does not hold.
std::optional<Witness> zero_price_witness(const AuctionGame& game, const BidProfile& profile);
std::optional<Witness> welfare_repair_witness(const AuctionGame& game, const BidProfile& profile);
std::optional<Witness> price_sharing_witness(const AuctionGame& game, const BidProfile& profile);

struct CoreCheck {
  bool transfers_zero = false;
  bool price_zero = false;
  bool welfare_max = false;
  std::vector<std::string> reasons;

  bool passes() const { return transfers_zero && price_zero && welfare_max; }
};

// Necessary conditions for the core with transfers. Requires n > K, hungry
// players, and the (K+1)-st price rule.
CoreCheck check_core_with_transfers(const AuctionGame& game, const BidProfile& profile,
                                    const TransferProfile& transfers);

}  // namespace mua

#endif  // MUA_EQUILIBRIUM_HPP
