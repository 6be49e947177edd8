#ifndef MUA_IO_HPP
#define MUA_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mua/auction.hpp"
#include "mua/equilibrium.hpp"
#include "mua/harness.hpp"
#include "mua/money.hpp"
#include "mua/offline.hpp"

namespace mua {

// All amounts in files are decimal strings on the instance grid.
struct Instance {
  int units = 0;
  Grid grid;
  PricingRule rule = PricingRule::kKPlus1Price;
  std::vector<Valuation> valuations;

  int players() const { return static_cast<int>(valuations.size()); }
};

// JSON: {"n", "K", "epsilon", "rule", "valuations": [[...], ...]}.
Instance load_instance(const std::string& path);
Instance parse_instance(const std::string& text, const std::string& origin);

// JSON: {"K", "T", "epsilon", "rule", "feedback", "seed",
//        "players": [{"valuation", "policy", "params"}]}.
// Relative replay-history paths resolve against the config's directory.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& origin,
                       const std::string& base_dir = ".");

// CSV `round,player,unit_index,bid` (1-based). Missing entries are zero.
History load_history(const std::string& path, const Grid& grid, int players, int units);
History parse_history(const std::string& text, const std::string& origin, const Grid& grid,
                      int players, int units);
std::string format_history(const History& history, const Grid& grid);

// CSV `player,unit_index,bid`.
BidProfile load_profile(const std::string& path, const Grid& grid, int players, int units);
// CSV `from,to,amount`; absent pairs are zero.
TransferProfile load_transfers(const std::string& path, const Grid& grid, int players);

// "a;b;c"
std::string format_vector(const DecreasingVector& v, const Grid& grid);

// CSV `round,player,bid_vector,price,allocation,utility`.
std::string format_run(const RunRecord& record, const Grid& grid);

struct SummaryRow {
  std::uint64_t seed = 0;
  std::string policy;
  long horizon = 0;
  int units = 0;
  std::string regret_grid;
  std::string regret_full;
  std::string bound;
  long long wall_ms = 0;
};

// CSV `seed,policy,T,K,regret_grid,regret_full,bound,wall_ms`.
std::string format_summary(const std::vector<SummaryRow>& rows);

// Edges of a weighted DAG as CSV.
std::string format_dag(const WeightedDag& g, const Grid& grid);

std::string read_file(const std::string& path);
// Writes to a temporary sibling and renames over `path`.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace mua

#endif  // MUA_IO_HPP
