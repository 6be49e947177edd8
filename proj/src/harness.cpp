#include "mua/harness.hpp"

#include <cmath>
#include <stdexcept>

namespace mua {

FeedbackModel parse_feedback(std::string_view name) {
  if (name == "full") return FeedbackModel::kFull;
  if (name == "bandit") return FeedbackModel::kBandit;
  throw ValidationError("unknown feedback model '" + std::string(name) + "' (expected full|bandit)");
}

std::string to_string(FeedbackModel feedback) {
  return feedback == FeedbackModel::kFull ? "full" : "bandit";
}

PolicyKind parse_policy(std::string_view name) {
  if (name == "fixed") return PolicyKind::kFixed;
  if (name == "iid") return PolicyKind::kIid;
  if (name == "two-scenario") return PolicyKind::kTwoScenario;
  if (name == "replay") return PolicyKind::kReplay;
  if (name == "hedge") return PolicyKind::kHedge;
  if (name == "exp3") return PolicyKind::kExp3;
  throw ValidationError("unknown policy '" + std::string(name) +
                        "' (expected fixed|iid|two-scenario|replay|hedge|exp3)");
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kFixed: return "fixed";
    case PolicyKind::kIid: return "iid";
    case PolicyKind::kTwoScenario: return "two-scenario";
    case PolicyKind::kReplay: return "replay";
    case PolicyKind::kHedge: return "hedge";
    case PolicyKind::kExp3: return "exp3";
  }
  return "unknown";
}

namespace {

class FixedBidder : public Bidder {
 public:
  explicit FixedBidder(BidVector bids) : bids_(std::move(bids)) {}
  BidVector bid() override { return bids_; }

 private:
  BidVector bids_;
};

class IidBidder : public Bidder {
 public:
  IidBidder(std::vector<BidVector> support, const std::vector<double>& weights, std::uint64_t seed)
      : support_(std::move(support)), rng_(seed) {
    double total = 0.0;
    for (double w : weights) cumulative_.push_back(total += w);
    for (double& c : cumulative_) c /= total;
  }

  BidVector bid() override {
    const double u = rng_.uniform();
    for (std::size_t k = 0; k + 1 < cumulative_.size(); ++k) {
      if (u < cumulative_[k]) return support_[k];
    }
    return support_.back();
  }

 private:
  std::vector<BidVector> support_;
  std::vector<double> cumulative_;
  Rng rng_;
};

class TwoScenarioBidder : public Bidder {
 public:
  TwoScenarioBidder(int units, Money high, double delta, int scenario, std::uint64_t seed)
      : half_(std::vector<Money>(static_cast<std::size_t>(units), Money(0))),
        full_(std::vector<Money>(static_cast<std::size_t>(units), high)),
        p_half_(scenario == 1 ? 0.5 + delta : 0.5 - delta),
        rng_(seed) {
    std::vector<Money> h(static_cast<std::size_t>(units), Money(0));
    for (int j = 0; j < units / 2; ++j) h[j] = high;
    half_ = BidVector(std::move(h));
  }

  BidVector bid() override { return rng_.uniform() < p_half_ ? half_ : full_; }

 private:
  BidVector half_;
  BidVector full_;
  double p_half_;
  Rng rng_;
};

class ReplayBidder : public Bidder {
 public:
  explicit ReplayBidder(std::vector<BidVector> script) : script_(std::move(script)) {}
  BidVector bid() override {
    if (next_ >= script_.size()) throw ValidationError("replay history is shorter than T");
    return script_[next_++];
  }

 private:
  std::vector<BidVector> script_;
  std::size_t next_ = 0;
};

class HedgeBidder : public Bidder {
 public:
  explicit HedgeBidder(HedgeLearner learner) : learner_(std::move(learner)) {}
  BidVector bid() override { return learner_.sample_bid(); }
  void on_bandit(const BanditFeedback&) override {
    throw std::logic_error("hedge learner needs full-information feedback");
  }
  void on_full(const FullFeedback& feedback) override { learner_.observe_full(feedback.profile); }

 private:
  HedgeLearner learner_;
};

class Exp3Bidder : public Bidder {
 public:
  explicit Exp3Bidder(Exp3Learner learner) : learner_(std::move(learner)) {}
  BidVector bid() override { return learner_.sample_bid(); }
  void on_bandit(const BanditFeedback& feedback) override {
    learner_.observe_bandit(feedback.price, feedback.allocation);
  }

 private:
  Exp3Learner learner_;
};

std::string player_field(PlayerId i) { return "players[" + std::to_string(i + 1) + "]"; }

void check_length(const DecreasingVector& v, int units, const std::string& field) {
  for (int j = units + 1; j <= v.size(); ++j) {
    if (v.at(j) != Money(0)) {
      throw ValidationError(field + ": has a non-zero entry beyond K = " + std::to_string(units));
    }
  }
}

}  // namespace

void validate(const RunConfig& c) {
  if (c.units <= 0) throw ValidationError("K: must be positive");
  if (c.horizon <= 0) throw ValidationError("T: must be positive");
  if (c.players.empty()) throw ValidationError("players: at least one player required");
  for (PlayerId i = 0; i < c.player_count(); ++i) {
    const std::string field = player_field(i);
    const PlayerConfig& p = c.players[i];
    check_length(p.valuation, c.units, field + ".valuation");
    const PolicySpec& s = p.policy;
    switch (s.kind) {
      case PolicyKind::kFixed:
        if (s.vectors.size() != 1) throw ValidationError(field + ".params.bids: exactly one vector");
        check_length(s.vectors[0], c.units, field + ".params.bids");
        break;
      case PolicyKind::kIid:
        if (s.vectors.empty()) throw ValidationError(field + ".params.vectors: must not be empty");
        if (s.weights.size() != s.vectors.size()) {
          throw ValidationError(field + ".params.weights: one weight per vector");
        }
        for (double w : s.weights) {
          if (!(w > 0.0) || !std::isfinite(w)) {
            throw ValidationError(field + ".params.weights: must be positive");
          }
        }
        for (const BidVector& v : s.vectors) check_length(v, c.units, field + ".params.vectors");
        break;
      case PolicyKind::kTwoScenario:
        if (c.units % 2 != 0) throw ValidationError(field + ": two-scenario needs an even K");
        if (!(s.delta >= 0.0 && s.delta <= 0.5)) {
          throw ValidationError(field + ".params.delta: must lie in [0, 0.5]");
        }
        if (s.scenario != 1 && s.scenario != 2) {
          throw ValidationError(field + ".params.scenario: must be 1 or 2");
        }
        if (s.high < Money(0)) throw ValidationError(field + ".params.high: must be non-negative");
        break;
      case PolicyKind::kReplay:
        if (static_cast<long>(s.vectors.size()) < c.horizon) {
          throw ValidationError(field + ".params.history: has " + std::to_string(s.vectors.size()) +
                                " rounds, T = " + std::to_string(c.horizon));
        }
        for (const BidVector& v : s.vectors) check_length(v, c.units, field + ".params.history");
        break;
      case PolicyKind::kHedge:
        if (c.feedback != FeedbackModel::kFull) {
          throw ValidationError(field + ".policy: hedge needs full-information feedback");
        }
        break;
      case PolicyKind::kExp3:
        break;
    }
    if (s.overrides.epsilon && *s.overrides.epsilon <= Money(0)) {
      throw ValidationError(field + ".params.epsilon: must be positive");
    }
    if (s.overrides.eta && !(*s.overrides.eta >= 0.0)) {
      throw ValidationError(field + ".params.eta: must be non-negative");
    }
  }
}

std::unique_ptr<Bidder> make_bidder(const RunConfig& c, PlayerId player,
                                    std::uint64_t replication) {
  const PlayerConfig& p = c.players.at(player);
  const std::uint64_t seed = derive_seed(c.seed, replication, static_cast<std::uint64_t>(player));
  const PolicySpec& s = p.policy;
  switch (s.kind) {
    case PolicyKind::kFixed:
      return std::make_unique<FixedBidder>(s.vectors.at(0));
    case PolicyKind::kIid:
      return std::make_unique<IidBidder>(s.vectors, s.weights, seed);
    case PolicyKind::kTwoScenario:
      return std::make_unique<TwoScenarioBidder>(c.units, s.high, s.delta, s.scenario, seed);
    case PolicyKind::kReplay:
      return std::make_unique<ReplayBidder>(s.vectors);
    case PolicyKind::kHedge:
      return std::make_unique<HedgeBidder>(HedgeLearner(p.valuation, player, c.units, c.rule, c.grid,
                                                        c.horizon, seed, s.overrides));
    case PolicyKind::kExp3:
      return std::make_unique<Exp3Bidder>(
          Exp3Learner(p.valuation, c.units, c.grid, c.horizon, seed, s.overrides));
  }
  throw std::logic_error("unhandled policy kind");
}

History RunRecord::history() const {
  History h;
  h.reserve(rounds.size());
  for (const RoundRow& r : rounds) h.push_back(r.bids);
  return h;
}

RunRecord run_repeated(const RunConfig& config, std::uint64_t replication) {
  validate(config);
  const int n = config.player_count();
  const int K = config.units;
  std::vector<std::unique_ptr<Bidder>> bidders;
  for (PlayerId i = 0; i < n; ++i) bidders.push_back(make_bidder(config, i, replication));

  RunRecord record;
  record.rounds.reserve(static_cast<std::size_t>(config.horizon));
  record.cumulative_utility.assign(static_cast<std::size_t>(n), Money(0));
  std::vector<Valuation> valuations;
  for (const PlayerConfig& p : config.players) valuations.push_back(p.valuation);

  for (long t = 1; t <= config.horizon; ++t) {
    RoundRow row;
    for (PlayerId i = 0; i < n; ++i) {
      try {
        BidVector b = bidders[i]->bid();
        check_length(b, K, player_field(i));
        row.bids.emplace_back(b.padded(K));
      } catch (const ValidationError& e) {
        throw ValidationError("round " + std::to_string(t) + ": player " + std::to_string(i + 1) +
                              " emitted an invalid bid vector: " + e.what());
      }
    }
    const AuctionOutcome outcome = run_auction(row.bids, config.rule, K);
    row.price = outcome.price;
    row.allocation = outcome.allocation;
    Money surplus(0);
    for (PlayerId i = 0; i < n; ++i) {
      row.utilities.push_back(utility(valuations[i], outcome, i));
      record.cumulative_utility[i] += row.utilities.back();
      surplus += row.utilities.back();
    }
    // Utilities plus revenue must add up to realized welfare.
    const WelfareRevenue wr = welfare_and_revenue(valuations, outcome);
    if (surplus + wr.revenue != wr.welfare) {
      throw std::logic_error("accounting identity violated in round " + std::to_string(t));
    }

    for (PlayerId i = 0; i < n; ++i) {
      const BanditFeedback own{outcome.price, outcome.allocation[i]};
      if (config.feedback == FeedbackModel::kFull) {
        bidders[i]->on_full(FullFeedback{own, row.bids});
      } else {
        bidders[i]->on_bandit(own);
      }
    }
    record.rounds.push_back(std::move(row));
  }
  return record;
}

Money benchmark_epsilon(const RunConfig& config, PlayerId player) {
  const PlayerConfig& p = config.players.at(player);
  const Money v1 = p.valuation.marginal(1);
  if (p.policy.overrides.epsilon) return *p.policy.overrides.epsilon;
  if (v1 <= Money(0)) return Money(1);
  if (p.policy.kind == PolicyKind::kExp3) {
    return exp3_schedule(config.grid, v1, config.units, config.horizon).epsilon;
  }
  return hedge_schedule(config.grid, v1, config.units, config.horizon).epsilon;
}

RegretReport hindsight_regret(const RunConfig& config, const RunRecord& record, PlayerId player) {
  const PlayerConfig& p = config.players.at(player);
  const History history = record.history();
  RegretReport r;
  r.realized = record.cumulative_utility.at(player);
  r.epsilon = benchmark_epsilon(config, player);
  r.horizon = static_cast<long>(record.rounds.size());
  r.units = config.units;
  r.candidate_best = solve_offline(history, p.valuation, player, config.rule, config.units, Money(1));
  std::vector<Money> levels = online_levels(p.valuation.marginal(1), r.epsilon);
  if (levels.empty()) levels.push_back(r.epsilon);
  r.grid_best = solve_over_levels(std::move(levels), history, p.valuation, player, config.rule,
                                  config.units);
  return r;
}

RunConfig lower_bound_config(int units, long horizon, const PolicySpec& learner, int scenario) {
  if (units <= 0 || units % 2 != 0) throw ValidationError("K must be even");
  if (horizon <= 0) throw ValidationError("T must be positive");
  RunConfig c;
  c.units = units;
  c.horizon = horizon;
  c.rule = PricingRule::kKPlus1Price;
  c.feedback = learner.kind == PolicyKind::kExp3 ? FeedbackModel::kBandit : FeedbackModel::kFull;
  const std::size_t K = static_cast<std::size_t>(units);
  c.players.push_back(PlayerConfig{Valuation(std::vector<Money>(K, Money(3))), learner});
  PolicySpec adversary;
  adversary.kind = PolicyKind::kTwoScenario;
  adversary.delta = 1.0 / (8.0 * std::sqrt(static_cast<double>(horizon)));
  adversary.scenario = scenario;
  adversary.high = Money(2);
  c.players.push_back(PlayerConfig{Valuation(std::vector<Money>(K, Money(0))), adversary});
  return c;
}

LowerBoundResult lower_bound_experiment(int units, long horizon, std::uint64_t seed,
                                        const PolicySpec& learner) {
  LowerBoundResult out;
  for (int scenario = 1; scenario <= 2; ++scenario) {
    RunConfig c = lower_bound_config(units, horizon, learner, scenario);
    c.seed = seed;
    const RunRecord record = run_repeated(c, 0);
    out.regret[scenario - 1] =
        static_cast<double>(hindsight_regret(c, record, 0).regret_candidate().ticks());
  }
  out.floor = units * std::sqrt(static_cast<double>(horizon)) * 3.0 / (96.0 * std::exp(1.0 / 3.0));
  return out;
}

}  // namespace mua
