// Command-line front end: offline-solve, simulate, lower-bound, equilibrium.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "mua/auction.hpp"
#include "mua/equilibrium.hpp"
#include "mua/harness.hpp"
#include "mua/io.hpp"
#include "mua/offline.hpp"

namespace {

using namespace mua;

constexpr int kExitValidation = 2;
constexpr int kExitRefused = 3;

struct SeedRange {
  std::uint64_t first = 0;
  std::uint64_t last = 0;
};

// "a..b" or a single seed.
SeedRange parse_seeds(const std::string& text) {
  auto parse_one = [&](const std::string& s) -> std::uint64_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw ValidationError("--seeds: expected 'a..b' with non-negative integers, got '" + text + "'");
    }
    return std::stoull(s);
  };
  const auto dots = text.find("..");
  SeedRange r;
  if (dots == std::string::npos) {
    r.first = r.last = parse_one(text);
  } else {
    r.first = parse_one(text.substr(0, dots));
    r.last = parse_one(text.substr(dots + 2));
  }
  if (r.last < r.first) throw ValidationError("--seeds: range is empty");
  return r;
}

std::string fixed6(double x) {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed << x;
  return out.str();
}

// ---- offline-solve ----

struct OfflineArgs {
  std::string instance;
  std::string history;
  int player = 1;
  std::string rule;
  std::string dump_dag;
};

int run_offline(const OfflineArgs& a) {
  const Instance inst = load_instance(a.instance);
  if (a.player < 1 || a.player > inst.players()) {
    throw ValidationError("--player: must lie in 1.." + std::to_string(inst.players()));
  }
  const PricingRule rule = a.rule.empty() ? inst.rule : parse_pricing_rule(a.rule);
  const History history = load_history(a.history, inst.grid, inst.players(), inst.units);
  const PlayerId i = a.player - 1;
  const std::vector<Money> levels = candidate_bids(history, i, Money(1));
  const WeightedDag g = build_graph(levels, history, inst.valuations[i], i, rule, inst.units);
  const PathChoice path = max_weight_path(g.dag, g.weights);
  const BidVector best = g.dag.bids_of(path.level_indices);

  std::cout << "player: " << a.player << "\n"
            << "rule: " << to_string(rule) << "\n"
            << "rounds: " << history.size() << "\n"
            << "candidates: ";
  for (std::size_t k = 0; k < levels.size(); ++k) {
    std::cout << (k == 0 ? "" : ";") << inst.grid.format(levels[k]);
  }
  std::cout << "\n"
            << "bids: " << format_vector(best, inst.grid) << "\n"
            << "utility: " << inst.grid.format(path.weight) << "\n";
  if (!a.dump_dag.empty()) write_atomic(a.dump_dag, format_dag(g, inst.grid));
  return 0;
}

// ---- simulate ----

struct SimulateArgs {
  std::string config;
  std::string seeds = "0..0";
  std::string out;
  int jobs = 1;
  bool reproducible = false;
};

struct SeedResult {
  std::uint64_t seed = 0;
  RunRecord record;
  std::vector<RegretReport> regret;
  long long wall_ms = 0;
};

std::string bound_text(const RunConfig& c, PlayerId i) {
  const PlayerConfig& p = c.players[i];
  if (p.policy.kind != PolicyKind::kHedge || p.valuation.marginal(1) <= Money(0)) return "";
  const double v1 = c.grid.to_real(p.valuation.marginal(1));
  const double T = static_cast<double>(c.horizon);
  const double K = c.units;
  return fixed6(9.0 / 8.0 * v1 * std::sqrt(T * K * K * K * std::log(T)));
}

int run_simulate(const SimulateArgs& a) {
  if (!std::filesystem::exists(a.config)) throw ValidationError(a.config + ": cannot open file");
  const RunConfig config = load_config(a.config);
  const SeedRange range = parse_seeds(a.seeds);
  if (a.jobs < 1) throw ValidationError("--jobs: must be at least 1");
  std::filesystem::create_directories(a.out);

  const std::size_t count = static_cast<std::size_t>(range.last - range.first + 1);
  std::vector<SeedResult> results(count);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;

  auto worker = [&]() {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        SeedResult& r = results[k];
        r.seed = range.first + k;
        const auto start = std::chrono::steady_clock::now();
        r.record = run_repeated(config, r.seed);
        for (PlayerId i = 0; i < config.player_count(); ++i) {
          r.regret.push_back(hindsight_regret(config, r.record, i));
        }
        const auto stop = std::chrono::steady_clock::now();
        r.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(stop - start).count();
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(a.jobs), count));
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);

  const std::filesystem::path dir(a.out);
  std::vector<SummaryRow> rows;
  nlohmann::json meta;
  meta["estimator"] =
      "regret = hindsight optimum minus realized utility per seed; mean and standard error over seeds";
  meta["seeds"] = {range.first, range.last};
  for (const SeedResult& r : results) {
    write_atomic((dir / ("run_seed" + std::to_string(r.seed) + ".csv")).string(),
                 format_run(r.record, config.grid));
    for (PlayerId i = 0; i < config.player_count(); ++i) {
      SummaryRow row;
      row.seed = r.seed;
      row.policy = to_string(config.players[i].policy.kind) + "#" + std::to_string(i + 1);
      row.horizon = config.horizon;
      row.units = config.units;
      row.regret_grid = config.grid.format(r.regret[i].regret_grid());
      row.regret_full = config.grid.format(r.regret[i].regret_candidate());
      row.bound = bound_text(config, i);
      row.wall_ms = a.reproducible ? 0 : r.wall_ms;
      rows.push_back(std::move(row));
    }
  }
  for (PlayerId i = 0; i < config.player_count(); ++i) {
    double sum_g = 0, sq_g = 0, sum_f = 0, sq_f = 0;
    for (const SeedResult& r : results) {
      const double g = config.grid.to_real(r.regret[i].regret_grid());
      const double f = config.grid.to_real(r.regret[i].regret_candidate());
      sum_g += g, sq_g += g * g, sum_f += f, sq_f += f * f;
    }
    const double m = static_cast<double>(count);
    auto stderr_of = [&](double s, double q) {
      if (count < 2) return 0.0;
      const double var = std::max(0.0, (q - s * s / m) / (m - 1));
      return std::sqrt(var / m);
    };
    nlohmann::json p;
    p["player"] = i + 1;
    p["policy"] = to_string(config.players[i].policy.kind);
    p["epsilon"] = config.grid.format(results[0].regret[i].epsilon);
    p["regret_grid_mean"] = sum_g / m;
    p["regret_grid_stderr"] = stderr_of(sum_g, sq_g);
    p["regret_full_mean"] = sum_f / m;
    p["regret_full_stderr"] = stderr_of(sum_f, sq_f);
    meta["players"].push_back(p);
  }
  write_atomic((dir / "summary.csv").string(), format_summary(rows));
  write_atomic((dir / "summary.json").string(), meta.dump(2) + "\n");

  for (const auto& p : meta["players"]) {
    std::cout << "player " << p["player"].get<int>() << " (" << p["policy"].get<std::string>()
              << "): regret_full " << fixed6(p["regret_full_mean"].get<double>()) << " +- "
              << fixed6(p["regret_full_stderr"].get<double>()) << ", regret_grid "
              << fixed6(p["regret_grid_mean"].get<double>()) << " +- "
              << fixed6(p["regret_grid_stderr"].get<double>()) << "\n";
  }
  return 0;
}

// ---- lower-bound ----

struct LowerBoundArgs {
  int units = 4;
  long horizon = 400;
  std::string policy = "hedge";
  std::string seeds = "0..0";
  std::string out;
};

// hedge | exp3 | fixed:b1,b2,...
PolicySpec parse_learner(const std::string& text, int units) {
  PolicySpec s;
  if (text.rfind("fixed:", 0) == 0) {
    s.kind = PolicyKind::kFixed;
    std::vector<Money> bids;
    std::stringstream in(text.substr(6));
    std::string cell;
    const Grid unit_grid;
    while (std::getline(in, cell, ',')) bids.push_back(unit_grid.parse_amount(cell));
    if (static_cast<int>(bids.size()) > units) throw ValidationError("--policy: more bids than K");
    s.vectors.emplace_back(std::move(bids));
    return s;
  }
  s.kind = parse_policy(text);
  if (s.kind != PolicyKind::kHedge && s.kind != PolicyKind::kExp3) {
    throw ValidationError("--policy: expected hedge, exp3 or fixed:b1,...,bK");
  }
  return s;
}

int run_lower_bound(const LowerBoundArgs& a) {
  if (a.units <= 0 || a.units % 2 != 0) throw ValidationError("--K: K must be even");
  if (a.horizon <= 0) throw ValidationError("--T: must be positive");
  const PolicySpec learner = parse_learner(a.policy, a.units);
  const SeedRange range = parse_seeds(a.seeds);

  std::string csv = "seed,regret_scenario1,regret_scenario2\n";
  double sum[2] = {0, 0};
  double floor = 0;
  std::uint64_t n = 0;
  for (std::uint64_t s = range.first; s <= range.last; ++s, ++n) {
    const LowerBoundResult r = lower_bound_experiment(a.units, a.horizon, s, learner);
    floor = r.floor;
    sum[0] += r.regret[0];
    sum[1] += r.regret[1];
    csv += std::to_string(s) + "," + fixed6(r.regret[0]) + "," + fixed6(r.regret[1]) + "\n";
  }
  const double m1 = sum[0] / static_cast<double>(n);
  const double m2 = sum[1] / static_cast<double>(n);
  if (!a.out.empty()) write_atomic(a.out, csv);
  std::cout << "K=" << a.units << " T=" << a.horizon << " seeds=" << n << " (values 3, bids 2)\n"
            << "mean regret scenario 1: " << fixed6(m1) << "\n"
            << "mean regret scenario 2: " << fixed6(m2) << "\n"
            << "average over scenarios: " << fixed6((m1 + m2) / 2) << "\n"
            << "floor: " << fixed6(floor) << "\n";
  return 0;
}

// ---- equilibrium ----

struct EquilibriumArgs {
  std::string mode;
  std::string instance;
  std::string profile;
  std::string transfers;
  long long grid_max = 5;
  long long budget = kDefaultSearchBudget;
};

void print_profile(const BidProfile& b, const Grid& grid) {
  for (std::size_t i = 0; i < b.size(); ++i) {
    std::cout << "  player " << i + 1 << ": " << format_vector(b[i], grid) << "\n";
  }
}

void print_report(const StabilityReport& r, const Grid& grid, int n) {
  if (r.stable) {
    std::cout << "verdict: stable\n";
    return;
  }
  const Witness& w = *r.witness;
  std::cout << "verdict: blocked (" << w.kind << ")\ncoalition:";
  for (PlayerId i : w.coalition) std::cout << " " << i + 1;
  std::cout << "\ndeviation:\n";
  print_profile(w.deviation, grid);
  if (!w.transfers.is_zero()) {
    std::cout << "transfers:\n";
    for (PlayerId i = 0; i < n; ++i) {
      for (PlayerId j = 0; j < n; ++j) {
        if (w.transfers.at(i, j) != Money(0)) {
          std::cout << "  " << i + 1 << " -> " << j + 1 << ": " << grid.format(w.transfers.at(i, j))
                    << "\n";
        }
      }
    }
  }
  std::cout << "utilities before -> after:\n";
  for (PlayerId i : w.coalition) {
    std::cout << "  player " << i + 1 << ": " << grid.format(w.before[i]) << " -> "
              << grid.format(w.after[i]) << "\n";
  }
}

int run_equilibrium(const EquilibriumArgs& a) {
  const Instance inst = load_instance(a.instance);
  if (a.grid_max < 0) throw ValidationError("--grid-max: must be non-negative");
  const AuctionGame game{inst.valuations, inst.units, inst.rule};
  const int n = inst.players();
  BidProfile profile;
  if (a.profile.empty()) {
    profile = zero_price_profile(welfare_max_allocation(inst.valuations, inst.units),
                                 inst.valuations, inst.units);
    std::cout << "profile: zero-price profile of the welfare-maximizing allocation\n";
  } else {
    profile = load_profile(a.profile, inst.grid, n, inst.units);
    std::cout << "profile:\n";
  }
  print_profile(profile, inst.grid);
  const AuctionOutcome outcome = run_auction(profile, inst.rule, inst.units);
  std::cout << "price: " << inst.grid.format(outcome.price) << "\nallocation:";
  for (int x : outcome.allocation) std::cout << " " << x;
  std::cout << "\n";

  const TransferProfile transfers =
      a.transfers.empty() ? TransferProfile(n) : load_transfers(a.transfers, inst.grid, n);
  const std::vector<Money> levels = tick_levels(a.grid_max);

  if (a.mode == "nash") {
    print_report(is_pure_nash(game, profile, levels, a.budget), inst.grid, n);
  } else if (a.mode == "core-nt") {
    print_report(find_blocking_coalition(game, profile, levels, false, nullptr, a.budget), inst.grid, n);
  } else if (a.mode == "core-t") {
    const CoreCheck c = check_core_with_transfers(game, profile, transfers);
    std::cout << "transfers zero: " << (c.transfers_zero ? "yes" : "no") << "\n"
              << "price zero: " << (c.price_zero ? "yes" : "no") << "\n"
              << "welfare maximal: " << (c.welfare_max ? "yes" : "no") << "\n";
    for (const std::string& why : c.reasons) std::cout << "fails: " << why << "\n";
    print_report(find_blocking_coalition(game, profile, levels, true, &transfers, a.budget),
                 inst.grid, n);
  } else {
    throw ValidationError("--mode: expected nash, core-nt or core-t");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repeated multi-unit uniform-price auctions: offline solver, learners, equilibria"};
  app.require_subcommand(1);

  OfflineArgs off;
  auto* cmd_off = app.add_subcommand("offline-solve", "Best fixed bid vector in hindsight");
  cmd_off->add_option("--instance", off.instance, "Instance JSON")->required();
  cmd_off->add_option("--history", off.history, "History CSV (round,player,unit_index,bid)")->required();
  cmd_off->add_option("--player", off.player, "Player to solve for (1-based)")->required();
  cmd_off->add_option("--rule", off.rule, "kth | kplus1 (default: the instance's rule)");
  cmd_off->add_option("--dump-dag", off.dump_dag, "Write the weighted DAG edges as CSV");

  SimulateArgs sim;
  auto* cmd_sim = app.add_subcommand("simulate", "Run repeated auctions from a config");
  cmd_sim->add_option("--config", sim.config, "Config JSON")->required();
  cmd_sim->add_option("--seeds", sim.seeds, "Seed range a..b");
  cmd_sim->add_option("--out", sim.out, "Output directory")->required();
  cmd_sim->add_option("--jobs", sim.jobs, "Worker threads");
  cmd_sim->add_flag("--reproducible", sim.reproducible, "Write wall_ms as 0");

  LowerBoundArgs lb;
  auto* cmd_lb = app.add_subcommand("lower-bound", "Two-scenario adversary experiment");
  cmd_lb->add_option("--K", lb.units, "Units (even)")->required();
  cmd_lb->add_option("--T", lb.horizon, "Rounds")->required();
  cmd_lb->add_option("--policy", lb.policy, "hedge | exp3 | fixed:b1,...,bK");
  cmd_lb->add_option("--seeds", lb.seeds, "Seed range a..b");
  cmd_lb->add_option("--out", lb.out, "Per-seed CSV");

  EquilibriumArgs eq;
  auto* cmd_eq = app.add_subcommand("equilibrium", "Nash and core checks");
  cmd_eq->add_option("--mode", eq.mode, "nash | core-nt | core-t")->required();
  cmd_eq->add_option("--instance", eq.instance, "Instance JSON")->required();
  cmd_eq->add_option("--profile", eq.profile, "Profile CSV (player,unit_index,bid)");
  cmd_eq->add_option("--transfers", eq.transfers, "Transfers CSV (from,to,amount)");
  cmd_eq->add_option("--grid-max", eq.grid_max, "Deviation grid 0..k in ticks");
  cmd_eq->add_option("--budget", eq.budget, "Maximum number of deviations to enumerate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (cmd_off->parsed()) return run_offline(off);
    if (cmd_sim->parsed()) return run_simulate(sim);
    if (cmd_lb->parsed()) return run_lower_bound(lb);
    if (cmd_eq->parsed()) return run_equilibrium(eq);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const BudgetExceeded& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitRefused;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
