#ifndef MUA_HARNESS_HPP
#define MUA_HARNESS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mua/auction.hpp"
#include "mua/bandit.hpp"
#include "mua/money.hpp"
#include "mua/offline.hpp"
#include "mua/rng.hpp"
#include "mua/weight_pushing.hpp"

namespace mua {

enum class FeedbackModel { kFull, kBandit };

FeedbackModel parse_feedback(std::string_view name);  // "full" | "bandit"
std::string to_string(FeedbackModel feedback);

// What every player learns after a round: the public price and its own
// allocation.
struct BanditFeedback {
  Money price;
  int allocation = 0;
};

// Full information adds every player's bids.
struct FullFeedback {
  BanditFeedback own;
  const BidProfile& profile;
};

// A bidding policy. Under bandit feedback the harness only ever calls
// on_bandit, so a policy cannot see opponents' bids.
class Bidder {
 public:
  virtual ~Bidder() = default;
  virtual BidVector bid() = 0;
  virtual void on_bandit(const BanditFeedback&) {}
  virtual void on_full(const FullFeedback& feedback) { on_bandit(feedback.own); }
};

enum class PolicyKind { kFixed, kIid, kTwoScenario, kReplay, kHedge, kExp3 };

PolicyKind parse_policy(std::string_view name);  // fixed|iid|two-scenario|replay|hedge|exp3
std::string to_string(PolicyKind kind);

struct PolicySpec {
  PolicyKind kind = PolicyKind::kFixed;
  // fixed: one vector; iid: the support; replay: one vector per round.
  std::vector<BidVector> vectors;
  std::vector<double> weights;  // iid, unnormalized
  // two-scenario: K/2 bids of `high` w.p. 1/2 + delta (scenario 1) or
  // 1/2 - delta (scenario 2), otherwise K bids of `high`.
  double delta = 0.0;
  int scenario = 1;
  Money high;
  LearnerOverrides overrides;  // hedge, exp3
};

struct PlayerConfig {
  Valuation valuation;
  PolicySpec policy;
};

struct RunConfig {
  int units = 0;
  long horizon = 0;
  Grid grid;
  PricingRule rule = PricingRule::kKPlus1Price;
  FeedbackModel feedback = FeedbackModel::kFull;
  std::uint64_t seed = 0;
  std::vector<PlayerConfig> players;

  int player_count() const { return static_cast<int>(players.size()); }
};

// Throws ValidationError naming the offending field.
void validate(const RunConfig& config);

// The policy of player `player` in replication `replication`, seeded from
// its own substream of the master seed.
std::unique_ptr<Bidder> make_bidder(const RunConfig& config, PlayerId player,
                                    std::uint64_t replication);

struct RoundRow {
  BidProfile bids;
  Money price;
  std::vector<int> allocation;
  std::vector<Money> utilities;
};

struct RunRecord {
  std::vector<RoundRow> rounds;
  std::vector<Money> cumulative_utility;

  History history() const;
};

// Plays config.horizon rounds. A policy emitting an invalid vector aborts
// the run with a ValidationError naming the round.
RunRecord run_repeated(const RunConfig& config, std::uint64_t replication);

struct RegretReport {
  Money realized;
  OfflineSolution candidate_best;  // over the candidate set (contains 0)
  OfflineSolution grid_best;       // over eps, 2 eps, ... (starts at eps)
  Money epsilon;
  long horizon = 0;
  int units = 0;

  Money regret_candidate() const { return candidate_best.utility - realized; }
  Money regret_grid() const { return grid_best.utility - realized; }
  Money slack() const { return (horizon * static_cast<std::int64_t>(units)) * epsilon; }
};

// The grid a player's S_eps benchmark uses: the learner's own resolution,
// or the full-information schedule for non-learners.
Money benchmark_epsilon(const RunConfig& config, PlayerId player);

RegretReport hindsight_regret(const RunConfig& config, const RunRecord& record, PlayerId player);

// Lower-bound instance on the integer grid (values 3, opponent bids 2):
// player 1 runs `learner`, player 2 is the two-scenario adversary with
// delta = 1/(8 sqrt T). Feedback follows the learner (bandit for exp3).
RunConfig lower_bound_config(int units, long horizon, const PolicySpec& learner, int scenario);

struct LowerBoundResult {
  double regret[2] = {0.0, 0.0};  // per scenario, hindsight over the candidate set
  double floor = 0.0;             // K sqrt(T) v1 / (96 e^(1/3)), v1 = 3
};

LowerBoundResult lower_bound_experiment(int units, long horizon, std::uint64_t seed,
                                        const PolicySpec& learner);

}  // namespace mua

#endif  // MUA_HARNESS_HPP
