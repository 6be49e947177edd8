#ifndef MUA_OFFLINE_HPP
#define MUA_OFFLINE_HPP

#include <vector>

#include "mua/auction.hpp"
#include "mua/layered_dag.hpp"
#include "mua/money.hpp"

namespace mua {

// Full bid profiles of past rounds. When solving for player i, entry i of
// each round is ignored; the other entries are the opponents' bids.
using History = std::vector<BidProfile>;

// The candidate bid levels: 0, every opponent bid, and every opponent bid
// plus one grid step. Sorted ascending, deduplicated.
std::vector<Money> candidate_bids(const History& history, PlayerId player, Money step = Money(1));

// Player i's view of one round of opponents' bids. Answers, for any bid
// vector of i that passes through level r at unit j and level s at unit
// j+1, whether i wins >= j, > j, == j units, and at which price, without
// knowing the rest of the vector.
class RoundView {
 public:
  RoundView(const BidProfile& round, PlayerId player, int units, PricingRule rule);

  // Opponent bids that would be served before a bid of value x by player i:
  // strictly higher bids, plus equal bids of lower-indexed players.
  int priority_count(Money x) const;

  // Price when i wins exactly j units with beta_j = r, beta_{j+1} = s.
  Money local_price(int j, Money r, Money s) const;

  // Contribution of the edge (beta_j = r, beta_{j+1} = s) to i's utility in
  // this round; s is ignored (taken as 0) for j = K. `count_r` / `count_s`
  // are priority_count(r) / priority_count(s).
  Money edge_weight(int j, Money r, Money s, Money value_j, int count_r, int count_s) const;
  Money edge_weight(int j, Money r, Money s, Money value_j) const;

  int units() const { return units_; }

 private:
  std::vector<BidSlot> opponents_;  // highest priority first
  PlayerId player_;
  int units_;
  PricingRule rule_;
};

// Standalone form of RoundView::priority_count.
int priority_count(const BidProfile& round, Money x, PlayerId player);

// Weight of the edge (z(r,j) -> z(s,j+1)), or (z(r,K) -> sink) when j == K,
// summed over the history. Source edges weigh zero and are not covered here.
Money edge_weight(const History& history, const Valuation& valuation, PlayerId player,
                  PricingRule rule, int units, int j, Money r, Money s);

// Adds one round's edge weights to `weights` (indexed by edge id of `dag`).
void accumulate_round_weights(const LayeredDag& dag, const BidProfile& round,
                              const Valuation& valuation, PlayerId player, PricingRule rule,
                              std::vector<Money>& weights);

struct WeightedDag {
  LayeredDag dag;
  std::vector<Money> weights;  // indexed by edge id
};

// Builds the DAG over `levels` (ascending) and fills every edge weight from
// the history in a single pass per round.
WeightedDag build_graph(std::vector<Money> levels, const History& history,
                        const Valuation& valuation, PlayerId player, PricingRule rule, int units);

struct PathChoice {
  std::vector<int> level_indices;  // one per unit
  Money weight;
};

// Maximum-weight source->sink path by dynamic programming over layers.
// Among maximizers the lexicographically smallest bid vector is returned.
PathChoice max_weight_path(const LayeredDag& dag, const std::vector<Money>& weights);

struct OfflineSolution {
  BidVector bids;
  Money utility;               // cumulative over the history
  std::vector<Money> levels;   // level set the optimum was taken over
};

// Best fixed bid vector in hindsight over the candidate set.
OfflineSolution solve_offline(const History& history, const Valuation& valuation, PlayerId player,
                              PricingRule rule, int units, Money step = Money(1));

// Same, restricted to an explicit level set (e.g. the learner's coarse grid).
OfflineSolution solve_over_levels(std::vector<Money> levels, const History& history,
                                  const Valuation& valuation, PlayerId player, PricingRule rule,
                                  int units);

}  // namespace mua

#endif  // MUA_OFFLINE_HPP
