#ifndef MUA_WEIGHT_PUSHING_HPP
#define MUA_WEIGHT_PUSHING_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "mua/auction.hpp"
#include "mua/layered_dag.hpp"
#include "mua/money.hpp"
#include "mua/rng.hpp"

namespace mua {

// Resolution (in ticks of the instance grid) and learning rate (per unit of
// real money) of an online learner.
struct Schedule {
  Money epsilon;
  double eta = 0.0;
};

struct LearnerOverrides {
  std::optional<Money> epsilon;
  std::optional<double> eta;
};

// Rounds a positive real step down to one significant digit (d * 10^e) and
// then to whole ticks of `grid`, never below one tick.
Money round_step(const Grid& grid, double value);

// eps = v1 sqrt(K/T), eta = sqrt(log T) / (v1 sqrt(K T)).
Schedule hedge_schedule(const Grid& grid, Money top_value, int units, long horizon);

// {eps, 2 eps, ..., ceil(v1/eps) eps}.
std::vector<Money> online_levels(Money top_value, Money epsilon);

// Distribution over source->sink paths of a LayeredDag in product form:
// each vertex carries a probability vector over its out-edges. Stored as
// log-probabilities.
class PathDistribution {
 public:
  // Initial edge probabilities: 1/L out of the source, 1/(r+1) out of the
  // layer vertex at level index r, 1 into the sink.
  explicit PathDistribution(LayeredDag dag);

  const LayeredDag& dag() const { return dag_; }
  double phi(LayeredDag::EdgeId e) const;
  const std::vector<double>& log_phi() const { return log_phi_; }

  // Random walk from the source; returns one level index per unit.
  std::vector<int> sample(Rng& rng) const;

  // log Gamma(u) = log sum_{e=(u,v)} phi(e) exp(eta w(e)) Gamma(v), Gamma(sink) = 1.
  std::vector<double> log_kernel(const std::vector<double>& rewards, double eta) const;

  // phi(e) <- phi(e) exp(eta w(e)) Gamma(v) / Gamma(u), then per-vertex
  // renormalization against rounding drift.
  void update(const std::vector<double>& rewards, double eta);

  // Probability that the walk uses each edge.
  std::vector<double> edge_marginals() const;

  double path_probability(const std::vector<int>& level_indices) const;

 private:
  LayeredDag dag_;
  std::vector<double> log_phi_;
};

// Full-information learner: one weight-pushing step per observed profile.
class HedgeLearner {
 public:
  HedgeLearner(Valuation valuation, PlayerId player, int units, PricingRule rule, Grid grid,
               long horizon, std::uint64_t seed, LearnerOverrides overrides = {});

  BidVector sample_bid();
  // Needs every player's bids of the round just played.
  void observe_full(const BidProfile& profile);

  // True when v1 = 0; the learner then always bids zero.
  bool degenerate() const { return !dist_.has_value(); }
  const PathDistribution& distribution() const { return dist_.value(); }
  const Schedule& schedule() const { return schedule_; }
  const std::vector<Money>& last_round_weights() const { return round_weights_; }

 private:
  Valuation valuation_;
  PlayerId player_;
  int units_;
  PricingRule rule_;
  Grid grid_;
  Schedule schedule_;
  std::optional<PathDistribution> dist_;
  Rng rng_;
  std::vector<int> last_path_;
  std::vector<Money> round_weights_;
  std::vector<double> rewards_;
};

}  // namespace mua

#endif  // MUA_WEIGHT_PUSHING_HPP
