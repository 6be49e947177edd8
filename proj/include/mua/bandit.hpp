#ifndef MUA_BANDIT_HPP
#define MUA_BANDIT_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "mua/auction.hpp"
#include "mua/layered_dag.hpp"
#include "mua/money.hpp"
#include "mua/rng.hpp"
#include "mua/weight_pushing.hpp"

namespace mua {

// eps = v1 min{(K^3 log T / T)^(1/4), 1},
// eta = min{eps sqrt(log(v1/eps) / (T K^3 v1^4)), 1/(K v1)}; eta uses the
// rounded eps.
Schedule exp3_schedule(const Grid& grid, Money top_value, int units, long horizon);

// Per-edge caps vbar - r + j(r - s) (s = 0 into the sink, 0 out of the
// source). Along any path they sum to K * vbar. `vbar` is the top level.
std::vector<Money> edge_caps(const LayeredDag& dag, Money vbar);

// Weight of the path edge at layer j (tail level r, head level s) from
// what a bandit player sees: its own allocation and the price.
Money realized_edge_weight(int j, Money r, Money s, Money value_j, int allocation, Money price,
                           int units);

// Importance-weighted estimates (in ticks): cap off the path,
// cap - (cap - w) / p on it. `path_weights` holds w for each edge of `path`.
std::vector<double> estimate_weights(const std::vector<Money>& caps,
                                     const std::vector<double>& marginals,
                                     const std::vector<LayeredDag::EdgeId>& path,
                                     const std::vector<Money>& path_weights);

// Bandit learner: sees only the price and its own allocation.
class Exp3Learner {
 public:
  Exp3Learner(Valuation valuation, int units, Grid grid, long horizon, std::uint64_t seed,
              LearnerOverrides overrides = {});

  BidVector sample_bid();
  void observe_bandit(Money price, int allocation);

  bool degenerate() const { return !dist_.has_value(); }
  const PathDistribution& distribution() const { return dist_.value(); }
  const Schedule& schedule() const { return schedule_; }
  const std::vector<Money>& caps() const { return caps_; }
  const std::vector<int>& last_path() const { return last_path_; }

 private:
  Valuation valuation_;
  int units_;
  Grid grid_;
  Schedule schedule_;
  std::optional<PathDistribution> dist_;
  std::vector<Money> caps_;
  Rng rng_;
  std::vector<int> last_path_;
  std::vector<double> rewards_;
};

}  // namespace mua

#endif  // MUA_BANDIT_HPP
