#ifndef MUA_LAYERED_DAG_HPP
#define MUA_LAYERED_DAG_HPP

#include <cstddef>
#include <vector>

#include "mua/auction.hpp"
#include "mua/money.hpp"

namespace mua {

// Layered DAG whose source->sink paths are exactly the weakly decreasing bid
// vectors over a finite ascending set of levels:
//
//   source -> z(r,1) -> z(s,2) -> ... -> z(.,K) -> sink,   with r >= s.
//
// Vertices and edges are numbered so that edge ids are grouped by tail
// vertex (CSR order) and vertex ids are a topological order.
class LayeredDag {
 public:
  using VertexId = int;
  using EdgeId = int;

  struct Edge {
    VertexId from = 0;
    VertexId to = 0;
    // Layer j of the tail vertex: 0 for source edges, K for sink edges.
    int layer = 0;
    // Level index of the tail (-1 at the source) and head (-1 at the sink).
    int hi = -1;
    int lo = -1;
  };

  LayeredDag(std::vector<Money> levels, int units);

  int units() const { return units_; }
  int level_count() const { return static_cast<int>(levels_.size()); }
  const std::vector<Money>& levels() const { return levels_; }
  Money level(int idx) const { return levels_[idx]; }

  std::size_t vertex_count() const { return static_cast<std::size_t>(units_) * levels_.size() + 2; }
  std::size_t edge_count() const { return edges_.size(); }

  VertexId source() const { return 0; }
  VertexId sink() const { return static_cast<VertexId>(vertex_count()) - 1; }
  VertexId vertex(int layer, int level_idx) const { return 1 + (layer - 1) * level_count() + level_idx; }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }

  // Out-edges of v are the contiguous id range [first, last).
  EdgeId out_begin(VertexId v) const { return first_out_[v]; }
  EdgeId out_end(VertexId v) const { return first_out_[v + 1]; }

  EdgeId source_edge(int level_idx) const { return level_idx; }
  EdgeId inner_edge(int layer, int hi, int lo) const;
  EdgeId sink_edge(int level_idx) const { return sink_base_ + level_idx; }

  // Edge ids of the path for a vector of level indices (one per layer,
  // weakly decreasing); K+1 edges.
  std::vector<EdgeId> path_edges(const std::vector<int>& level_indices) const;

  BidVector bids_of(const std::vector<int>& level_indices) const;

  // Bid value carried by the tail / head of an edge (0 for the sink side).
  Money tail_bid(const Edge& e) const { return e.hi < 0 ? Money(0) : levels_[e.hi]; }
  Money head_bid(const Edge& e) const { return e.lo < 0 ? Money(0) : levels_[e.lo]; }

 private:
  std::vector<Money> levels_;
  int units_;
  std::vector<Edge> edges_;
  std::vector<EdgeId> first_out_;
  EdgeId sink_base_ = 0;
};

}  // namespace mua

#endif  // MUA_LAYERED_DAG_HPP
