#include "mua/weight_pushing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mua/offline.hpp"

namespace mua {

namespace {

double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

void renormalize(const LayeredDag& dag, std::vector<double>& log_phi) {
  for (LayeredDag::VertexId v = dag.source(); v < dag.sink(); ++v) {
    double total = -std::numeric_limits<double>::infinity();
    for (auto e = dag.out_begin(v); e < dag.out_end(v); ++e) total = log_sum_exp(total, log_phi[e]);
    for (auto e = dag.out_begin(v); e < dag.out_end(v); ++e) log_phi[e] -= total;
  }
}

}  // namespace

Money round_step(const Grid& grid, double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw ValidationError("resolution must be positive");
  const double exponent = std::floor(std::log10(value) + 1e-12);
  const double unit = std::pow(10.0, exponent);
  const double digit = std::floor(value / unit + 1e-9);
  const Money ticks = grid.floor_real(digit * unit);
  return std::max(ticks, Money(1));
}

Schedule hedge_schedule(const Grid& grid, Money top_value, int units, long horizon) {
  if (horizon < 1) throw ValidationError("horizon T must be at least 1");
  const double v1 = grid.to_real(top_value);
  const double T = static_cast<double>(horizon);
  Schedule s;
  s.epsilon = round_step(grid, v1 * std::sqrt(units / T));
  s.eta = std::sqrt(std::log(T)) / (v1 * std::sqrt(units * T));
  return s;
}

std::vector<Money> online_levels(Money top_value, Money epsilon) {
  const std::int64_t count = (top_value.ticks() + epsilon.ticks() - 1) / epsilon.ticks();
  std::vector<Money> levels;
  levels.reserve(static_cast<std::size_t>(count));
  for (std::int64_t k = 1; k <= count; ++k) levels.push_back(k * epsilon);
  return levels;
}

PathDistribution::PathDistribution(LayeredDag dag) : dag_(std::move(dag)) {
  log_phi_.assign(dag_.edge_count(), 0.0);
  const double L = dag_.level_count();
  for (std::size_t e = 0; e < dag_.edge_count(); ++e) {
    const LayeredDag::Edge& edge = dag_.edge(static_cast<LayeredDag::EdgeId>(e));
    if (edge.hi < 0) {
      log_phi_[e] = -std::log(L);
    } else if (edge.lo >= 0) {
      log_phi_[e] = -std::log(static_cast<double>(edge.hi + 1));
    }
  }
}

double PathDistribution::phi(LayeredDag::EdgeId e) const { return std::exp(log_phi_[e]); }

std::vector<int> PathDistribution::sample(Rng& rng) const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(dag_.units()));
  LayeredDag::VertexId v = dag_.source();
  while (v != dag_.sink()) {
    const double u = rng.uniform();
    double acc = 0.0;
    LayeredDag::EdgeId pick = -1;
    for (auto e = dag_.out_begin(v); e < dag_.out_end(v); ++e) {
      const double p = phi(e);
      if (p <= 0.0) continue;
      pick = e;
      acc += p;
      if (u < acc) break;
    }
    if (pick < 0) throw std::logic_error("vertex with no positive out-probability");
    const LayeredDag::Edge& edge = dag_.edge(pick);
    if (edge.lo >= 0) out.push_back(edge.lo);
    v = edge.to;
  }
  return out;
}

std::vector<double> PathDistribution::log_kernel(const std::vector<double>& rewards,
                                                 double eta) const {
  std::vector<double> log_gamma(dag_.vertex_count(), -std::numeric_limits<double>::infinity());
  log_gamma[dag_.sink()] = 0.0;
  for (LayeredDag::VertexId v = dag_.sink() - 1; v >= dag_.source(); --v) {
    double acc = -std::numeric_limits<double>::infinity();
    for (auto e = dag_.out_begin(v); e < dag_.out_end(v); ++e) {
      acc = log_sum_exp(acc, log_phi_[e] + eta * rewards[e] + log_gamma[dag_.edge(e).to]);
    }
    log_gamma[v] = acc;
  }
  return log_gamma;
}

void PathDistribution::update(const std::vector<double>& rewards, double eta) {
  const std::vector<double> log_gamma = log_kernel(rewards, eta);
  for (std::size_t e = 0; e < log_phi_.size(); ++e) {
    const LayeredDag::Edge& edge = dag_.edge(static_cast<LayeredDag::EdgeId>(e));
    log_phi_[e] += eta * rewards[e] + log_gamma[edge.to] - log_gamma[edge.from];
  }
  renormalize(dag_, log_phi_);
}

std::vector<double> PathDistribution::edge_marginals() const {
  // Backward mass is 1 everywhere since each vertex's out-probabilities sum
  // to 1, so a forward pass is enough.
  std::vector<double> reach(dag_.vertex_count(), 0.0);
  std::vector<double> out(dag_.edge_count(), 0.0);
  reach[dag_.source()] = 1.0;
  for (LayeredDag::VertexId v = dag_.source(); v < dag_.sink(); ++v) {
    for (auto e = dag_.out_begin(v); e < dag_.out_end(v); ++e) {
      out[e] = reach[v] * phi(e);
      reach[dag_.edge(e).to] += out[e];
    }
  }
  return out;
}

double PathDistribution::path_probability(const std::vector<int>& level_indices) const {
  double log_p = 0.0;
  for (LayeredDag::EdgeId e : dag_.path_edges(level_indices)) log_p += log_phi_[e];
  return std::exp(log_p);
}

HedgeLearner::HedgeLearner(Valuation valuation, PlayerId player, int units, PricingRule rule,
                           Grid grid, long horizon, std::uint64_t seed, LearnerOverrides overrides)
    : valuation_(std::move(valuation)),
      player_(player),
      units_(units),
      rule_(rule),
      grid_(grid),
      rng_(seed) {
  const Money v1 = valuation_.marginal(1);
  if (v1 <= Money(0)) return;
  schedule_ = hedge_schedule(grid_, v1, units_, horizon);
  if (overrides.epsilon) schedule_.epsilon = *overrides.epsilon;
  if (overrides.eta) schedule_.eta = *overrides.eta;
  if (schedule_.epsilon <= Money(0)) throw ValidationError("epsilon override must be positive");
  dist_.emplace(LayeredDag(online_levels(v1, schedule_.epsilon), units_));
}

BidVector HedgeLearner::sample_bid() {
  if (degenerate()) return BidVector::zeros(units_);
  last_path_ = dist_->sample(rng_);
  return dist_->dag().bids_of(last_path_);
}

void HedgeLearner::observe_full(const BidProfile& profile) {
  if (degenerate()) return;
  const LayeredDag& dag = dist_->dag();
  round_weights_.assign(dag.edge_count(), Money(0));
  accumulate_round_weights(dag, profile, valuation_, player_, rule_, round_weights_);

  if (!last_path_.empty()) {
    Money path_sum(0);
    for (auto e : dag.path_edges(last_path_)) path_sum += round_weights_[e];
    if (path_sum > units_ * valuation_.marginal(1)) {
      throw std::logic_error("path reward exceeds K * v1");
    }
  }

  rewards_.resize(round_weights_.size());
  const double step = grid_.step();
  for (std::size_t e = 0; e < rewards_.size(); ++e) {
    rewards_[e] = static_cast<double>(round_weights_[e].ticks()) * step;
  }
  dist_->update(rewards_, schedule_.eta);
}

}  // namespace mua
