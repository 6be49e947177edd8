#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "mua/offline.hpp"
#include "mua/weight_pushing.hpp"
#include "oracles.hpp"

using namespace mua;

namespace {

constexpr double kTol = 1e-9;

std::vector<Money> ticks(int from, int to) {
  std::vector<Money> v;
  for (int x = from; x <= to; ++x) v.emplace_back(x);
  return v;
}

std::vector<double> random_rewards(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> d(-1.0, 2.0);
  std::vector<double> r(n);
  for (double& x : r) x = d(rng);
  return r;
}

double path_reward(const LayeredDag& dag, const std::vector<double>& rewards,
                   const std::vector<int>& path) {
  double s = 0.0;
  for (auto e : dag.path_edges(path)) s += rewards[e];
  return s;
}

}  // namespace

TEST(PathDistribution, InitialEdgeProbabilities) {
  const PathDistribution d(LayeredDag(ticks(1, 3), 2));
  const LayeredDag& dag = d.dag();
  for (int r = 0; r < 3; ++r) {
    EXPECT_NEAR(d.phi(dag.source_edge(r)), 1.0 / 3, kTol);
    EXPECT_NEAR(d.phi(dag.sink_edge(r)), 1.0, kTol);
    for (int s = 0; s <= r; ++s) EXPECT_NEAR(d.phi(dag.inner_edge(1, r, s)), 1.0 / (r + 1), kTol);
  }
}

TEST(PathDistribution, InitialPathsAreAllReachable) {
  for (int L = 1; L <= 4; ++L) {
    for (int K = 1; K <= 4; ++K) {
      const PathDistribution d(LayeredDag(ticks(1, L), K));
      double total = 0.0;
      for (const auto& p : oracle::all_paths(L, K)) {
        const double q = d.path_probability(p);
        EXPECT_GE(q, std::pow(L, -K) - kTol);
        total += q;
      }
      EXPECT_NEAR(total, 1.0, kTol);
    }
  }
}

TEST(PathDistribution, SamplingFrequencies) {
  const PathDistribution d(LayeredDag(ticks(1, 3), 2));
  Rng rng(42);
  const int N = 30000;
  std::map<std::vector<int>, int> counts;
  for (int k = 0; k < N; ++k) ++counts[d.sample(rng)];
  for (const auto& p : oracle::all_paths(3, 2)) {
    const double q = d.path_probability(p);
    const double sigma = std::sqrt(N * q * (1 - q));
    EXPECT_NEAR(counts[p], N * q, 3 * sigma + 1);
  }
}

TEST(PathDistribution, ZeroRewardsOrZeroRateLeaveItUnchanged) {
  std::mt19937_64 rng(1);
  PathDistribution d(LayeredDag(ticks(1, 4), 3));
  const std::vector<double> before = d.log_phi();
  d.update(std::vector<double>(d.dag().edge_count(), 0.0), 0.7);
  for (std::size_t e = 0; e < before.size(); ++e) EXPECT_NEAR(d.log_phi()[e], before[e], kTol);
  d.update(random_rewards(rng, d.dag().edge_count()), 0.0);
  for (std::size_t e = 0; e < before.size(); ++e) EXPECT_NEAR(d.log_phi()[e], before[e], kTol);
}

TEST(PathDistribution, MatchesExplicitHedgeOverPaths) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const int L = 1 + static_cast<int>(rng() % 4);
    const int K = 1 + static_cast<int>(rng() % 3);
    const double eta = 0.3;
    PathDistribution d(LayeredDag(ticks(1, L), K));
    const auto paths = oracle::all_paths(L, K);
    std::vector<double> logw;
    for (const auto& p : paths) logw.push_back(std::log(d.path_probability(p)));
    for (int t = 0; t < 5; ++t) {
      const auto r = random_rewards(rng, d.dag().edge_count());
      for (std::size_t k = 0; k < paths.size(); ++k) logw[k] += eta * path_reward(d.dag(), r, paths[k]);
      d.update(r, eta);
    }
    double m = logw[0];
    for (double x : logw) m = std::max(m, x);
    double z = 0.0;
    for (double x : logw) z += std::exp(x - m);
    for (std::size_t k = 0; k < paths.size(); ++k) {
      ASSERT_NEAR(d.path_probability(paths[k]), std::exp(logw[k] - m) / z, kTol);
    }
  }
}

TEST(PathDistribution, KernelIsSumOverPaths) {
  std::mt19937_64 rng(3);
  const PathDistribution d(LayeredDag(ticks(1, 3), 3));
  const auto r = random_rewards(rng, d.dag().edge_count());
  const double eta = 0.5;
  double expected = 0.0;
  for (const auto& p : oracle::all_paths(3, 3)) {
    expected += d.path_probability(p) * std::exp(eta * path_reward(d.dag(), r, p));
  }
  EXPECT_NEAR(std::exp(d.log_kernel(r, eta)[d.dag().source()]), expected, 1e-9 * expected);
}

TEST(PathDistribution, StaysNormalizedAndMarginalsMatch) {
  std::mt19937_64 rng(4);
  PathDistribution d(LayeredDag(ticks(1, 4), 3));
  for (int t = 0; t < 200; ++t) d.update(random_rewards(rng, d.dag().edge_count()), 2.0);
  const LayeredDag& dag = d.dag();
  for (LayeredDag::VertexId v = dag.source(); v < dag.sink(); ++v) {
    double s = 0.0;
    for (auto e = dag.out_begin(v); e < dag.out_end(v); ++e) s += d.phi(e);
    EXPECT_NEAR(s, 1.0, kTol);
  }
  std::vector<double> brute(dag.edge_count(), 0.0);
  for (const auto& p : oracle::all_paths(4, 3)) {
    for (auto e : dag.path_edges(p)) brute[e] += d.path_probability(p);
  }
  const auto m = d.edge_marginals();
  for (std::size_t e = 0; e < m.size(); ++e) EXPECT_NEAR(m[e], brute[e], kTol);
}

TEST(PathDistribution, DominantPathTakesOver) {
  PathDistribution d(LayeredDag(ticks(1, 4), 3));
  const std::vector<int> target{2, 2, 1};
  std::vector<double> r(d.dag().edge_count(), 0.0);
  for (auto e : d.dag().path_edges(target)) r[e] = 1.0;
  for (int t = 0; t < 50; ++t) d.update(r, 1.0);
  EXPECT_GT(d.path_probability(target), 0.99);
  Rng rng(5);
  EXPECT_EQ(d.sample(rng), target);
}

TEST(Schedule, RoundStep) {
  const Grid cents = Grid::parse("0.01");
  EXPECT_EQ(round_step(cents, 0.293), Money(20));
  EXPECT_EQ(round_step(cents, 0.0567), Money(5));
  EXPECT_EQ(round_step(cents, 0.004), Money(1));
  EXPECT_EQ(round_step(cents, 7.3), Money(700));
  EXPECT_EQ(round_step(cents, 0.1), Money(10));
  EXPECT_EQ(round_step(Grid(), 0.3), Money(1));
  EXPECT_EQ(round_step(Grid(), 38.0), Money(30));
  EXPECT_THROW(round_step(cents, 0.0), ValidationError);
}

TEST(Schedule, HedgeValues) {
  const Grid cents = Grid::parse("0.01");
  const Schedule s = hedge_schedule(cents, Money(100), 2, 10000);
  EXPECT_EQ(s.epsilon, Money(1));
  EXPECT_NEAR(s.eta, std::sqrt(std::log(1e4)) / std::sqrt(2e4), 1e-12);
  EXPECT_EQ(online_levels(Money(10), Money(3)), (std::vector<Money>{Money(3), Money(6), Money(9), Money(12)}));
  EXPECT_EQ(online_levels(Money(9), Money(3)).size(), 3u);
}

TEST(HedgeLearner, RoundWeightsMatchOfflineGraph) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const int K = 1 + static_cast<int>(rng() % 3);
    const Valuation v = oracle::random_valuation(rng, K, 9);
    if (v.marginal(1) == Money(0)) continue;
    const auto rule = trial % 2 ? PricingRule::kKthPrice : PricingRule::kKPlus1Price;
    HedgeLearner learner(v, 1, K, rule, Grid(), 100, 7);
    BidProfile round{oracle::random_vector(rng, K, 9), learner.sample_bid(), oracle::random_vector(rng, K, 9)};
    learner.observe_full(round);
    const WeightedDag g = build_graph(learner.distribution().dag().levels(), {round}, v, 1, rule, K);
    EXPECT_EQ(learner.last_round_weights(), g.weights);
  }
}

TEST(HedgeLearner, SeedReproducibility) {
  const Valuation v(std::vector<Money>{Money(10), Money(6)});
  auto play = [&](std::uint64_t seed) {
    HedgeLearner learner(v, 0, 2, PricingRule::kKPlus1Price, Grid(), 200, seed);
    std::vector<BidVector> out;
    for (int t = 0; t < 200; ++t) {
      const BidVector b = learner.sample_bid();
      out.push_back(b);
      learner.observe_full({b, BidVector(std::vector<Money>{Money(7), Money(3)})});
    }
    return out;
  };
  EXPECT_EQ(play(11), play(11));
  EXPECT_NE(play(11), play(12));
}

TEST(HedgeLearner, ZeroTopValueBidsZero) {
  HedgeLearner learner(Valuation(std::vector<Money>{Money(0)}), 0, 2, PricingRule::kKthPrice, Grid(), 10, 1);
  EXPECT_TRUE(learner.degenerate());
  EXPECT_EQ(learner.sample_bid(), BidVector::zeros(2));
  learner.observe_full({BidVector::zeros(2), BidVector::zeros(2)});
}
