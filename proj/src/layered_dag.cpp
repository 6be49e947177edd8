#include "mua/layered_dag.hpp"

#include <algorithm>

namespace mua {

LayeredDag::LayeredDag(std::vector<Money> levels, int units)
    : levels_(std::move(levels)), units_(units) {
  if (units_ <= 0) throw ValidationError("number of units K must be positive");
  if (levels_.empty()) throw ValidationError("level set must not be empty");
  for (std::size_t i = 1; i < levels_.size(); ++i) {
    if (levels_[i] <= levels_[i - 1]) throw ValidationError("levels must be strictly ascending");
  }
  if (levels_.front() < Money(0)) throw ValidationError("levels must be non-negative");

  const int L = level_count();
  first_out_.assign(vertex_count() + 1, 0);
  edges_.reserve(static_cast<std::size_t>(2 * L) +
                 static_cast<std::size_t>(units_ - 1) * L * (L + 1) / 2);

  first_out_[source()] = 0;
  for (int r = 0; r < L; ++r) edges_.push_back(Edge{source(), vertex(1, r), 0, -1, r});
  for (int j = 1; j <= units_; ++j) {
    for (int r = 0; r < L; ++r) {
      first_out_[vertex(j, r)] = static_cast<EdgeId>(edges_.size());
      if (j < units_) {
        for (int s = 0; s <= r; ++s) edges_.push_back(Edge{vertex(j, r), vertex(j + 1, s), j, r, s});
      } else {
        if (r == 0) sink_base_ = static_cast<EdgeId>(edges_.size());
        edges_.push_back(Edge{vertex(j, r), sink(), j, r, -1});
      }
    }
  }
  first_out_[sink()] = static_cast<EdgeId>(edges_.size());
  first_out_[sink() + 1] = static_cast<EdgeId>(edges_.size());
}

LayeredDag::EdgeId LayeredDag::inner_edge(int layer, int hi, int lo) const {
  return out_begin(vertex(layer, hi)) + lo;
}

std::vector<LayeredDag::EdgeId> LayeredDag::path_edges(const std::vector<int>& level_indices) const {
  if (static_cast<int>(level_indices.size()) != units_) {
    throw ValidationError("path needs one level per unit");
  }
  std::vector<EdgeId> out;
  out.reserve(static_cast<std::size_t>(units_) + 1);
  out.push_back(source_edge(level_indices[0]));
  for (int j = 1; j < units_; ++j) {
    const int hi = level_indices[j - 1];
    const int lo = level_indices[j];
    if (lo > hi || lo < 0 || hi >= level_count()) throw ValidationError("path is not weakly decreasing");
    out.push_back(inner_edge(j, hi, lo));
  }
  out.push_back(sink_edge(level_indices.back()));
  return out;
}

BidVector LayeredDag::bids_of(const std::vector<int>& level_indices) const {
  std::vector<Money> bids;
  bids.reserve(level_indices.size());
  for (int idx : level_indices) bids.push_back(levels_.at(idx));
  return BidVector(std::move(bids));
}

}  // namespace mua
