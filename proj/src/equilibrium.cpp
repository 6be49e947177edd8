#include "mua/equilibrium.hpp"

#include <algorithm>
#include <numeric>

namespace mua {

namespace {

void require_hungry_majority(const AuctionGame& game) {
  if (game.players() <= game.units) {
    throw ValidationError("needs more players than units (n > K)");
  }
  for (PlayerId i = 0; i < game.players(); ++i) {
    if (!game.valuations[i].hungry(game.units)) {
      throw ValidationError("player " + std::to_string(i + 1) + " is not hungry");
    }
  }
}

bool is_kplus1_hungry_scope(const AuctionGame& game) {
  if (game.rule != PricingRule::kKPlus1Price || game.players() <= game.units) return false;
  for (const Valuation& v : game.valuations) {
    if (!v.hungry(game.units)) return false;
  }
  return true;
}

// Weakly better for all members, strictly for one.
bool improves(const std::vector<PlayerId>& coalition, const std::vector<Money>& before,
              const std::vector<Money>& after) {
  bool strict = false;
  for (PlayerId i : coalition) {
    if (after[i] < before[i]) return false;
    if (after[i] > before[i]) strict = true;
  }
  return strict;
}

std::vector<PlayerId> everyone(int n) {
  std::vector<PlayerId> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  return all;
}

// Transfers after coalition members stop paying and non-members stop paying
// members; payments among non-members are untouched.
TransferProfile neutral_transfers(const TransferProfile& original,
                                  const std::vector<bool>& member) {
  TransferProfile t = original;
  const int n = t.players();
  for (PlayerId i = 0; i < n; ++i) {
    for (PlayerId j = 0; j < n; ++j) {
      if (member[i] || member[j]) t.set(i, j, Money(0));
    }
  }
  return t;
}

// Truthful bids on the units each player is assigned, zero elsewhere.
BidProfile truthful_on(const AuctionGame& game, const std::vector<int>& allocation) {
  BidProfile b;
  for (PlayerId i = 0; i < game.players(); ++i) {
    std::vector<Money> bids(static_cast<std::size_t>(game.units), Money(0));
    for (int j = 1; j <= allocation[i]; ++j) bids[j - 1] = game.valuations[i].marginal(j);
    b.emplace_back(std::move(bids));
  }
  return b;
}

Witness make_grand_witness(const AuctionGame& game, const BidProfile& profile,
                           BidProfile deviation, TransferProfile transfers, std::string kind) {
  Witness w;
  w.coalition = everyone(game.players());
  w.before = game_utilities(game, profile);
  w.after = game_utilities(game, deviation, &transfers);
  w.deviation = std::move(deviation);
  w.transfers = std::move(transfers);
  w.kind = std::move(kind);
  return w;
}

}  // namespace

TransferProfile::TransferProfile(int players)
    : t_(static_cast<std::size_t>(players),
         std::vector<Money>(static_cast<std::size_t>(players), Money(0))) {}

TransferProfile::TransferProfile(std::vector<std::vector<Money>> matrix) : t_(std::move(matrix)) {
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (t_[i].size() != t_.size()) throw ValidationError("transfer matrix must be square");
    for (std::size_t j = 0; j < t_.size(); ++j) {
      if (t_[i][j] < Money(0)) throw ValidationError("transfers must be non-negative");
      if (i == j && t_[i][j] != Money(0)) throw ValidationError("self-transfers must be zero");
    }
  }
}

void TransferProfile::add(PlayerId from, PlayerId to, Money amount) {
  if (from == to) return;
  t_[from][to] += amount;
}

Money TransferProfile::net(PlayerId i) const {
  Money m(0);
  for (PlayerId j = 0; j < players(); ++j) m += t_[j][i] - t_[i][j];
  return m;
}

bool TransferProfile::is_zero() const {
  for (const auto& row : t_) {
    for (Money x : row) {
      if (x != Money(0)) return false;
    }
  }
  return true;
}

Allocation welfare_max_allocation(const std::vector<Valuation>& valuations, int units) {
  std::vector<BidSlot> slots;
  for (PlayerId i = 0; i < static_cast<PlayerId>(valuations.size()); ++i) {
    for (int j = 1; j <= units; ++j) slots.push_back(BidSlot{i, j, valuations[i].marginal(j)});
  }
  std::sort(slots.begin(), slots.end(), has_priority);
  Allocation z(valuations.size(), 0);
  for (int k = 0; k < units && k < static_cast<int>(slots.size()); ++k) ++z[slots[k].player];
  return z;
}

Money allocation_welfare(const std::vector<Valuation>& valuations, const Allocation& allocation) {
  Money total(0);
  for (std::size_t i = 0; i < allocation.size(); ++i) {
    total += valuations.at(i).cumulative(allocation[i]);
  }
  return total;
}

BidProfile zero_price_profile(const Allocation& allocation, const std::vector<Valuation>& valuations,
                              int units) {
  const AuctionGame game{valuations, units, PricingRule::kKPlus1Price};
  require_hungry_majority(game);
  if (allocation.size() != valuations.size()) {
    throw ValidationError("allocation must list one count per player");
  }
  int total = 0;
  for (int z : allocation) {
    if (z < 0) throw ValidationError("allocation counts must be non-negative");
    total += z;
  }
  if (total != units) throw ValidationError("allocation must assign exactly K units");

  Money m(0);
  for (const Valuation& v : valuations) m += v.cumulative(units);
  BidProfile b;
  for (int z : allocation) {
    std::vector<Money> bids(static_cast<std::size_t>(units), Money(0));
    for (int j = 0; j < z; ++j) bids[j] = m;
    b.emplace_back(std::move(bids));
  }
  return b;
}

std::vector<BidVector> monotone_vectors(const std::vector<Money>& levels, int units) {
  std::vector<BidVector> out;
  std::vector<Money> current;
  auto rec = [&](auto&& self, std::size_t max_idx) -> void {
    if (static_cast<int>(current.size()) == units) {
      out.emplace_back(current);
      return;
    }
    for (std::size_t k = 0; k <= max_idx && k < levels.size(); ++k) {
      current.push_back(levels[k]);
      self(self, k);
      current.pop_back();
    }
  };
  if (!levels.empty()) rec(rec, levels.size() - 1);
  return out;
}

std::vector<Money> tick_levels(std::int64_t max_ticks) {
  std::vector<Money> levels;
  for (std::int64_t k = 0; k <= max_ticks; ++k) levels.emplace_back(k);
  return levels;
}

std::vector<Money> game_utilities(const AuctionGame& game, const BidProfile& profile,
                                  const TransferProfile* transfers) {
  const AuctionOutcome outcome = run_auction(profile, game.rule, game.units);
  std::vector<Money> u(profile.size());
  for (PlayerId i = 0; i < static_cast<PlayerId>(profile.size()); ++i) {
    u[i] = utility(game.valuations.at(i), outcome, i);
    if (transfers != nullptr) u[i] += transfers->net(i);
  }
  return u;
}

bool validate_witness(const AuctionGame& game, const BidProfile& profile,
                      const TransferProfile& transfers, const Witness& witness) {
  const int n = game.players();
  if (witness.coalition.empty() || static_cast<int>(witness.deviation.size()) != n) return false;
  std::vector<bool> member(static_cast<std::size_t>(n), false);
  for (PlayerId i : witness.coalition) {
    if (i < 0 || i >= n) return false;
    member[i] = true;
  }
  const TransferProfile& after_t =
      witness.transfers.players() == n ? witness.transfers : TransferProfile(n);
  for (PlayerId i = 0; i < n; ++i) {
    if (member[i]) continue;
    if (!(witness.deviation[i] == profile[i])) return false;
    for (PlayerId j = 0; j < n; ++j) {
      if (member[j] && after_t.at(i, j) != Money(0)) return false;
      if (!member[j] && after_t.at(i, j) != transfers.at(i, j)) return false;
    }
  }
  const std::vector<Money> before = game_utilities(game, profile, &transfers);
  const std::vector<Money> after = game_utilities(game, witness.deviation, &after_t);
  return improves(witness.coalition, before, after);
}

StabilityReport is_pure_nash(const AuctionGame& game, const BidProfile& profile,
                             const std::vector<Money>& levels, std::int64_t budget) {
  const std::vector<BidVector> candidates = monotone_vectors(levels, game.units);
  const std::int64_t work = static_cast<std::int64_t>(candidates.size()) * game.players();
  if (work > budget) {
    throw BudgetExceeded("Nash check needs " + std::to_string(work) +
                         " deviations, over the budget of " + std::to_string(budget));
  }
  const std::vector<Money> before = game_utilities(game, profile);
  BidProfile trial = profile;
  for (PlayerId i = 0; i < game.players(); ++i) {
    for (const BidVector& d : candidates) {
      trial[i] = d;
      const std::vector<Money> after = game_utilities(game, trial);
      if (after[i] > before[i]) {
        Witness w{{i}, trial, TransferProfile(game.players()), before, after, "unilateral"};
        return StabilityReport{false, std::move(w)};
      }
    }
    trial[i] = profile[i];
  }
  return StabilityReport{};
}

StabilityReport find_blocking_coalition(const AuctionGame& game, const BidProfile& profile,
                                        const std::vector<Money>& levels, bool with_transfers,
                                        const TransferProfile* transfers, std::int64_t budget) {
  const int n = game.players();
  const TransferProfile original =
      with_transfers && transfers != nullptr ? *transfers : TransferProfile(n);
  if (original.players() != n) throw ValidationError("transfer matrix size must equal n");

  // Per-player candidates: the grid vectors plus the player's own vector.
  const std::vector<BidVector> grid = monotone_vectors(levels, game.units);
  std::vector<std::vector<BidVector>> candidates(static_cast<std::size_t>(n), grid);
  for (PlayerId i = 0; i < n; ++i) {
    if (std::find(grid.begin(), grid.end(), profile[i]) == grid.end()) {
      candidates[i].push_back(profile[i]);
    }
  }

  // Coalitions of each size, lexicographic order.
  std::vector<std::vector<PlayerId>> coalitions;
  for (int size = 1; size <= n; ++size) {
    std::vector<bool> pick(static_cast<std::size_t>(n), false);
    std::fill(pick.begin(), pick.begin() + size, true);
    do {
      std::vector<PlayerId> c;
      for (PlayerId i = 0; i < n; ++i) {
        if (pick[i]) c.push_back(i);
      }
      coalitions.push_back(std::move(c));
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }

  double work = 0.0;
  for (const auto& c : coalitions) {
    double combos = 1.0;
    for (PlayerId i : c) combos *= static_cast<double>(candidates[i].size());
    work += combos;
  }
  if (work > static_cast<double>(budget)) {
    throw BudgetExceeded("coalition search needs about " + std::to_string(static_cast<long long>(work)) +
                         " deviations, over the budget of " + std::to_string(budget));
  }

  const std::vector<Money> before = game_utilities(game, profile, &original);
  for (const auto& coalition : coalitions) {
    std::vector<bool> member(static_cast<std::size_t>(n), false);
    for (PlayerId i : coalition) member[i] = true;
    const TransferProfile after_t = neutral_transfers(original, member);

    std::vector<std::size_t> idx(coalition.size(), 0);
    BidProfile trial = profile;
    for (bool done = false; !done;) {
      for (std::size_t k = 0; k < coalition.size(); ++k) {
        trial[coalition[k]] = candidates[coalition[k]][idx[k]];
      }
      const std::vector<Money> after = game_utilities(game, trial, &after_t);
      if (improves(coalition, before, after)) {
        bool same_bids = true;
        for (PlayerId i : coalition) same_bids = same_bids && trial[i] == profile[i];
        Witness w{coalition, trial, after_t, before, after, same_bids ? "stop-paying" : "search"};
        return StabilityReport{false, std::move(w)};
      }
      // Odometer, last member fastest.
      done = true;
      for (std::size_t k = coalition.size(); k-- > 0;) {
        if (++idx[k] < candidates[coalition[k]].size()) {
          done = false;
          break;
        }
        idx[k] = 0;
      }
    }
  }

  if (with_transfers && original.is_zero() && is_kplus1_hungry_scope(game)) {
    for (auto&& candidate : {welfare_repair_witness(game, profile), price_sharing_witness(game, profile)}) {
      if (candidate && validate_witness(game, profile, original, *candidate)) {
        return StabilityReport{false, *candidate};
      }
    }
  }
  return StabilityReport{};
}

std::optional<Witness> zero_price_witness(const AuctionGame& game, const BidProfile& profile) {
  if (!is_kplus1_hungry_scope(game)) return std::nullopt;
  const AuctionOutcome outcome = run_auction(profile, game.rule, game.units);
  if (outcome.price <= Money(0)) return std::nullopt;
  return make_grand_witness(game, profile,
                            zero_price_profile(outcome.allocation, game.valuations, game.units),
                            TransferProfile(game.players()), "zero-price");
}

std::optional<Witness> welfare_repair_witness(const AuctionGame& game, const BidProfile& profile) {
  if (!is_kplus1_hungry_scope(game)) return std::nullopt;
  const int n = game.players();
  const AuctionOutcome outcome = run_auction(profile, game.rule, game.units);
  const Allocation best = welfare_max_allocation(game.valuations, game.units);
  if (allocation_welfare(game.valuations, outcome.allocation) >=
      allocation_welfare(game.valuations, best)) {
    return std::nullopt;
  }

  // Units in the welfare-max bundle but not won, and won but not in it.
  std::vector<std::pair<PlayerId, int>> lost;
  std::vector<std::pair<PlayerId, int>> gained;
  for (PlayerId i = 0; i < n; ++i) {
    for (int j = outcome.allocation[i] + 1; j <= best[i]; ++j) lost.emplace_back(i, j);
    for (int j = best[i] + 1; j <= outcome.allocation[i]; ++j) gained.emplace_back(i, j);
  }
  // Every welfare-max marginal is at least every excluded one, so any
  // pairing leaves a non-negative gap.
  Money min_gap = game.valuations[lost[0].first].marginal(lost[0].second);
  for (std::size_t k = 0; k < lost.size(); ++k) {
    const Money gap = game.valuations[lost[k].first].marginal(lost[k].second) -
                      game.valuations[gained[k].first].marginal(gained[k].second);
    min_gap = std::min(min_gap, gap);
  }
  const Money eps(min_gap.ticks() / 2);
  TransferProfile t(n);
  for (std::size_t k = 0; k < lost.size(); ++k) {
    t.add(lost[k].first, gained[k].first,
          game.valuations[gained[k].first].marginal(gained[k].second) + eps);
  }
  return make_grand_witness(game, profile, truthful_on(game, best), std::move(t), "welfare");
}

std::optional<Witness> price_sharing_witness(const AuctionGame& game, const BidProfile& profile) {
  if (!is_kplus1_hungry_scope(game)) return std::nullopt;
  const AuctionOutcome outcome = run_auction(profile, game.rule, game.units);
  if (outcome.price <= Money(0)) return std::nullopt;
  const int K = game.units;
  const Money eps(outcome.price.ticks() / (2 * K));
  TransferProfile t(game.players());
  for (int k = 0; k < K; ++k) {
    t.add(outcome.sorted_bids[k].player, outcome.sorted_bids[K + k].player, eps);
  }
  return make_grand_witness(game, profile, truthful_on(game, outcome.allocation), std::move(t),
                            "zero-price");
}

CoreCheck check_core_with_transfers(const AuctionGame& game, const BidProfile& profile,
                                    const TransferProfile& transfers) {
  require_hungry_majority(game);
  if (game.rule != PricingRule::kKPlus1Price) {
    throw ValidationError("core-with-transfers conditions apply to the kplus1 rule only");
  }
  if (transfers.players() != game.players()) {
    throw ValidationError("transfer matrix size must equal n");
  }
  CoreCheck c;
  const AuctionOutcome outcome = run_auction(profile, game.rule, game.units);
  c.transfers_zero = transfers.is_zero();
  if (!c.transfers_zero) c.reasons.push_back("transfers are not all zero");
  c.price_zero = outcome.price == Money(0);
  if (!c.price_zero) c.reasons.push_back("price is positive");
  c.welfare_max = allocation_welfare(game.valuations, outcome.allocation) ==
                  allocation_welfare(game.valuations, welfare_max_allocation(game.valuations, game.units));
  if (!c.welfare_max) c.reasons.push_back("allocation does not maximize welfare");
  return c;
}

}  // namespace mua
