#include "mua/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mua {

Schedule exp3_schedule(const Grid& grid, Money top_value, int units, long horizon) {
  if (horizon < 1) throw ValidationError("horizon T must be at least 1");
  const double v1 = grid.to_real(top_value);
  const double T = static_cast<double>(horizon);
  const double K3 = static_cast<double>(units) * units * units;
  Schedule s;
  s.epsilon = round_step(grid, v1 * std::min(std::pow(K3 * std::log(T) / T, 0.25), 1.0));
  const double eps = grid.to_real(s.epsilon);
  const double ratio = std::max(std::log(v1 / eps), 0.0);
  s.eta = std::min(eps * std::sqrt(ratio / (T * K3 * std::pow(v1, 4))), 1.0 / (units * v1));
  return s;
}

std::vector<Money> edge_caps(const LayeredDag& dag, Money vbar) {
  std::vector<Money> caps(dag.edge_count(), Money(0));
  for (std::size_t e = 0; e < caps.size(); ++e) {
    const LayeredDag::Edge& edge = dag.edge(static_cast<LayeredDag::EdgeId>(e));
    if (edge.hi < 0) continue;
    const Money r = dag.level(edge.hi);
    const Money s = dag.head_bid(edge);
    caps[e] = vbar - r + edge.layer * (r - s);
  }
  return caps;
}

Money realized_edge_weight(int j, Money r, Money s, Money value_j, int allocation, Money price,
                           int units) {
  if (j == units) s = Money(0);
  Money w(0);
  if (allocation >= j) w += value_j - r;
  if (allocation > j) {
    w += j * (r - s);
  } else if (allocation == j) {
    w += j * (r - price);
  }
  return w;
}

std::vector<double> estimate_weights(const std::vector<Money>& caps,
                                     const std::vector<double>& marginals,
                                     const std::vector<LayeredDag::EdgeId>& path,
                                     const std::vector<Money>& path_weights) {
  std::vector<double> out(caps.size());
  for (std::size_t e = 0; e < caps.size(); ++e) out[e] = static_cast<double>(caps[e].ticks());
  for (std::size_t k = 0; k < path.size(); ++k) {
    const auto e = path[k];
    const double p = marginals[e];
    if (!(p > 0.0)) throw std::logic_error("traversed edge has zero marginal probability");
    out[e] -= static_cast<double>((caps[e] - path_weights[k]).ticks()) / p;
  }
  return out;
}

Exp3Learner::Exp3Learner(Valuation valuation, int units, Grid grid, long horizon,
                         std::uint64_t seed, LearnerOverrides overrides)
    : valuation_(std::move(valuation)), units_(units), grid_(grid), rng_(seed) {
  const Money v1 = valuation_.marginal(1);
  if (v1 <= Money(0)) return;
  schedule_ = exp3_schedule(grid_, v1, units_, horizon);
  if (overrides.epsilon) schedule_.epsilon = *overrides.epsilon;
  if (overrides.eta) schedule_.eta = *overrides.eta;
  if (schedule_.epsilon <= Money(0)) throw ValidationError("epsilon override must be positive");
  dist_.emplace(LayeredDag(online_levels(v1, schedule_.epsilon), units_));
  caps_ = edge_caps(dist_->dag(), dist_->dag().levels().back());
}

BidVector Exp3Learner::sample_bid() {
  if (degenerate()) return BidVector::zeros(units_);
  last_path_ = dist_->sample(rng_);
  return dist_->dag().bids_of(last_path_);
}

void Exp3Learner::observe_bandit(Money price, int allocation) {
  if (degenerate()) return;
  if (last_path_.empty()) throw std::logic_error("observe_bandit without a sampled bid");
  const LayeredDag& dag = dist_->dag();
  const std::vector<LayeredDag::EdgeId> path = dag.path_edges(last_path_);
  std::vector<Money> path_weights(path.size(), Money(0));
  for (std::size_t k = 0; k < path.size(); ++k) {
    const LayeredDag::Edge& edge = dag.edge(path[k]);
    if (edge.hi < 0) continue;
    path_weights[k] = realized_edge_weight(edge.layer, dag.level(edge.hi), dag.head_bid(edge),
                                           valuation_.marginal(edge.layer), allocation, price,
                                           units_);
    if (path_weights[k] > caps_[path[k]]) throw std::logic_error("edge weight exceeds its cap");
  }
  rewards_ = estimate_weights(caps_, dist_->edge_marginals(), path, path_weights);
  const double step = grid_.step();
  for (double& r : rewards_) r *= step;
  dist_->update(rewards_, schedule_.eta);
  last_path_.clear();
}

}  // namespace mua
