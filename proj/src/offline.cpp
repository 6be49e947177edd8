#include "mua/offline.hpp"

#include <algorithm>
#include <limits>

namespace mua {

std::vector<Money> candidate_bids(const History& history, PlayerId player, Money step) {
  std::vector<Money> out{Money(0)};
  for (const BidProfile& round : history) {
    for (PlayerId p = 0; p < static_cast<PlayerId>(round.size()); ++p) {
      if (p == player) continue;
      for (Money b : round[p].entries()) {
        out.push_back(b);
        out.push_back(b + step);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

RoundView::RoundView(const BidProfile& round, PlayerId player, int units, PricingRule rule)
    : player_(player), units_(units), rule_(rule) {
  for (PlayerId p = 0; p < static_cast<PlayerId>(round.size()); ++p) {
    if (p == player) continue;
    for (int j = 1; j <= units; ++j) opponents_.push_back(BidSlot{p, j, round[p].bid(j)});
  }
  std::sort(opponents_.begin(), opponents_.end(), has_priority);
}

int RoundView::priority_count(Money x) const {
  const BidSlot probe{player_, 0, x};
  const auto it = std::partition_point(opponents_.begin(), opponents_.end(),
                                       [&](const BidSlot& s) { return has_priority(s, probe); });
  return static_cast<int>(it - opponents_.begin());
}

Money RoundView::local_price(int j, Money r, Money s) const {
  // Player i's first j-1 bids are all served, so dropping them shifts the
  // price rank down by j-1 within opponents + {r, s}.
  const int rank = rule_ == PricingRule::kKPlus1Price ? units_ + 2 - j : units_ + 1 - j;
  const Money extras[2] = {r, s};
  std::size_t a = 0;
  int e = 0;
  for (int c = 1;; ++c) {
    const bool have_opp = a < opponents_.size();
    const bool have_extra = e < 2;
    if (!have_opp && !have_extra) return Money(0);
    Money next;
    if (have_extra && (!have_opp || extras[e] >= opponents_[a].bid)) {
      next = extras[e++];
    } else {
      next = opponents_[a++].bid;
    }
    if (c == rank) return next;
  }
}

Money RoundView::edge_weight(int j, Money r, Money s, Money value_j, int count_r,
                             int count_s) const {
  if (j == units_) s = Money(0);
  const int room = units_ - j;
  const bool at_least = count_r <= room;
  const bool more = j < units_ && count_s < room;
  Money w(0);
  if (at_least) w += value_j - r;
  if (more) {
    w += j * (r - s);
  } else if (at_least) {
    w += j * (r - local_price(j, r, s));
  }
  return w;
}

Money RoundView::edge_weight(int j, Money r, Money s, Money value_j) const {
  if (j == units_) s = Money(0);
  return edge_weight(j, r, s, value_j, priority_count(r), priority_count(s));
}

int priority_count(const BidProfile& round, Money x, PlayerId player) {
  int count = 0;
  for (PlayerId p = 0; p < static_cast<PlayerId>(round.size()); ++p) {
    if (p == player) continue;
    for (Money b : round[p].entries()) {
      if (b > x || (b == x && p < player)) ++count;
    }
  }
  return count;
}

Money edge_weight(const History& history, const Valuation& valuation, PlayerId player,
                  PricingRule rule, int units, int j, Money r, Money s) {
  Money total(0);
  for (const BidProfile& round : history) {
    total += RoundView(round, player, units, rule).edge_weight(j, r, s, valuation.marginal(j));
  }
  return total;
}

void accumulate_round_weights(const LayeredDag& dag, const BidProfile& round,
                              const Valuation& valuation, PlayerId player, PricingRule rule,
                              std::vector<Money>& weights) {
  const int L = dag.level_count();
  const RoundView view(round, player, dag.units(), rule);
  std::vector<int> counts(static_cast<std::size_t>(L));
  for (int r = 0; r < L; ++r) counts[r] = view.priority_count(dag.level(r));
  const int count_zero = view.priority_count(Money(0));
  const auto edges = static_cast<LayeredDag::EdgeId>(dag.edge_count());
  for (LayeredDag::EdgeId e = L; e < edges; ++e) {
    const LayeredDag::Edge& edge = dag.edge(e);
    const int j = edge.layer;
    const int count_s = edge.lo < 0 ? count_zero : counts[edge.lo];
    weights[e] += view.edge_weight(j, dag.level(edge.hi), dag.head_bid(edge), valuation.marginal(j),
                                   counts[edge.hi], count_s);
  }
}

WeightedDag build_graph(std::vector<Money> levels, const History& history,
                        const Valuation& valuation, PlayerId player, PricingRule rule, int units) {
  WeightedDag g{LayeredDag(std::move(levels), units), {}};
  g.weights.assign(g.dag.edge_count(), Money(0));
  for (const BidProfile& round : history) {
    accumulate_round_weights(g.dag, round, valuation, player, rule, g.weights);
  }
  return g;
}

PathChoice max_weight_path(const LayeredDag& dag, const std::vector<Money>& weights) {
  constexpr std::int64_t kNone = std::numeric_limits<std::int64_t>::min();
  // best[v]: maximum weight of a v -> sink path.
  std::vector<std::int64_t> best(dag.vertex_count(), kNone);
  best[dag.sink()] = 0;
  for (LayeredDag::VertexId v = dag.sink() - 1; v >= dag.source(); --v) {
    for (LayeredDag::EdgeId e = dag.out_begin(v); e < dag.out_end(v); ++e) {
      const std::int64_t cand = weights[e].ticks() + best[dag.edge(e).to];
      if (cand > best[v]) best[v] = cand;
    }
  }
  // Walk forward taking the lowest level that keeps the optimum; out-edges
  // are ordered by ascending head level, so the first match is the smallest.
  PathChoice out;
  out.weight = Money(best[dag.source()]);
  LayeredDag::VertexId v = dag.source();
  while (v != dag.sink()) {
    for (LayeredDag::EdgeId e = dag.out_begin(v); e < dag.out_end(v); ++e) {
      const LayeredDag::Edge& edge = dag.edge(e);
      if (weights[e].ticks() + best[edge.to] == best[v]) {
        if (edge.lo >= 0) out.level_indices.push_back(edge.lo);
        v = edge.to;
        break;
      }
    }
  }
  return out;
}

OfflineSolution solve_over_levels(std::vector<Money> levels, const History& history,
                                  const Valuation& valuation, PlayerId player, PricingRule rule,
                                  int units) {
  const WeightedDag g = build_graph(std::move(levels), history, valuation, player, rule, units);
  const PathChoice path = max_weight_path(g.dag, g.weights);
  return OfflineSolution{g.dag.bids_of(path.level_indices), path.weight, g.dag.levels()};
}

OfflineSolution solve_offline(const History& history, const Valuation& valuation, PlayerId player,
                              PricingRule rule, int units, Money step) {
  return solve_over_levels(candidate_bids(history, player, step), history, valuation, player, rule,
                           units);
}

}  // namespace mua
