#include "mua/io.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace mua {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(origin + ": malformed JSON (" + e.what() + ")");
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ValidationError(where + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

std::string amount_text(const json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  throw ValidationError(where + ": expected a decimal string");
}

Money parse_money(const json& v, const Grid& grid, const std::string& where) {
  try {
    return grid.parse_amount(amount_text(v, where));
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

std::vector<Money> parse_amounts(const json& v, const Grid& grid, const std::string& where) {
  if (!v.is_array()) throw ValidationError(where + ": expected an array of amounts");
  std::vector<Money> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    out.push_back(parse_money(v[k], grid, where + "[" + std::to_string(k + 1) + "]"));
  }
  return out;
}

template <typename Vec>
Vec parse_decreasing(const json& v, const Grid& grid, const std::string& where) {
  try {
    return Vec(parse_amounts(v, grid, where));
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    if (msg.rfind(where, 0) == 0) throw;
    throw ValidationError(where + ": " + msg);
  }
}

long long parse_integer(const json& v, const std::string& where) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_string()) {
    try {
      std::size_t used = 0;
      const long long x = std::stoll(v.get<std::string>(), &used);
      if (used == v.get<std::string>().size()) return x;
    } catch (const std::exception&) {
    }
  }
  throw ValidationError(where + ": expected an integer");
}

int parse_count(const std::string& cell, const std::string& where) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(cell, &used);
    if (used == cell.size()) return x;
  } catch (const std::exception&) {
  }
  throw ValidationError(where + ": expected an integer, got '" + cell + "'");
}

struct CsvLine {
  int number;
  std::vector<std::string> cells;
};

// Splits CSV text, checks the header, drops blank lines.
std::vector<CsvLine> read_csv(const std::string& text, const std::string& origin,
                              const std::vector<std::string>& header) {
  std::istringstream in(text);
  std::string line;
  std::vector<CsvLine> rows;
  int number = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split(line, ',');
    if (!seen_header) {
      if (cells != header) {
        std::string expected;
        for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
        throw ValidationError(origin + ":" + std::to_string(number) + ": expected header '" +
                              expected + "'");
      }
      seen_header = true;
      continue;
    }
    if (cells.size() != header.size()) {
      throw ValidationError(origin + ":" + std::to_string(number) + ": expected " +
                            std::to_string(header.size()) + " columns, got " +
                            std::to_string(cells.size()));
    }
    rows.push_back(CsvLine{number, std::move(cells)});
  }
  if (!seen_header) throw ValidationError(origin + ": empty file, header missing");
  return rows;
}

std::string where_line(const std::string& origin, int line) {
  return origin + ":" + std::to_string(line);
}

Money parse_cell_money(const std::string& cell, const Grid& grid, const std::string& where) {
  try {
    return grid.parse_amount(cell);
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

// Fills a players x units table, rejecting duplicates and out-of-range ids.
void place(std::vector<std::vector<Money>>& table, std::vector<std::vector<bool>>& seen, int player,
           int unit, Money bid, const std::string& where) {
  const int n = static_cast<int>(table.size());
  const int K = n == 0 ? 0 : static_cast<int>(table[0].size());
  if (player < 1 || player > n) {
    throw ValidationError(where + ": player " + std::to_string(player) + " outside 1.." +
                          std::to_string(n));
  }
  if (unit < 1 || unit > K) {
    throw ValidationError(where + ": unit_index " + std::to_string(unit) + " outside 1.." +
                          std::to_string(K));
  }
  if (seen[player - 1][unit - 1]) throw ValidationError(where + ": duplicate entry");
  seen[player - 1][unit - 1] = true;
  table[player - 1][unit - 1] = bid;
}

BidProfile to_profile(std::vector<std::vector<Money>> table, const std::string& where) {
  BidProfile profile;
  for (std::size_t i = 0; i < table.size(); ++i) {
    try {
      profile.emplace_back(std::move(table[i]));
    } catch (const ValidationError& e) {
      throw ValidationError(where + ", player " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return profile;
}

PolicySpec parse_policy_spec(const json& p, const std::string& where, const Grid& grid,
                             const std::string& base_dir, int self, int players, int units,
                             long horizon) {
  PolicySpec s;
  const json& name = require(p, "policy", where);
  if (!name.is_string()) throw ValidationError(where + ".policy: expected a string");
  try {
    s.kind = parse_policy(name.get<std::string>());
  } catch (const ValidationError& e) {
    throw ValidationError(where + ".policy: " + e.what());
  }
  const json params = p.contains("params") ? p.at("params") : json::object();
  const std::string pw = where + ".params";
  if (!params.is_object()) throw ValidationError(pw + ": expected an object");

  switch (s.kind) {
    case PolicyKind::kFixed:
      s.vectors.push_back(parse_decreasing<BidVector>(require(params, "bids", pw), grid, pw + ".bids"));
      break;
    case PolicyKind::kIid: {
      const json& vs = require(params, "vectors", pw);
      if (!vs.is_array()) throw ValidationError(pw + ".vectors: expected an array");
      for (std::size_t k = 0; k < vs.size(); ++k) {
        s.vectors.push_back(
            parse_decreasing<BidVector>(vs[k], grid, pw + ".vectors[" + std::to_string(k + 1) + "]"));
      }
      if (params.contains("weights")) {
        const json& ws = params.at("weights");
        if (!ws.is_array()) throw ValidationError(pw + ".weights: expected an array");
        for (const json& w : ws) {
          if (!w.is_number()) throw ValidationError(pw + ".weights: expected numbers");
          s.weights.push_back(w.get<double>());
        }
      } else {
        s.weights.assign(s.vectors.size(), 1.0);
      }
      break;
    }
    case PolicyKind::kTwoScenario:
      s.high = parse_money(require(params, "high", pw), grid, pw + ".high");
      s.delta = params.contains("delta") ? params.at("delta").get<double>()
                                         : 1.0 / (8.0 * std::sqrt(static_cast<double>(horizon)));
      s.scenario = params.contains("scenario")
                       ? static_cast<int>(parse_integer(params.at("scenario"), pw + ".scenario"))
                       : 1;
      break;
    case PolicyKind::kReplay: {
      const json& file = require(params, "history", pw);
      if (!file.is_string()) throw ValidationError(pw + ".history: expected a path");
      std::filesystem::path path = file.get<std::string>();
      if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
      const int who = params.contains("player")
                          ? static_cast<int>(parse_integer(params.at("player"), pw + ".player"))
                          : self + 1;
      if (who < 1 || who > players) throw ValidationError(pw + ".player: outside 1..n");
      const History h = load_history(path.string(), grid, players, units);
      for (const BidProfile& round : h) s.vectors.push_back(round[who - 1]);
      break;
    }
    case PolicyKind::kHedge:
    case PolicyKind::kExp3:
      if (params.contains("epsilon")) {
        s.overrides.epsilon = parse_money(params.at("epsilon"), grid, pw + ".epsilon");
      }
      if (params.contains("eta")) {
        if (!params.at("eta").is_number()) throw ValidationError(pw + ".eta: expected a number");
        s.overrides.eta = params.at("eta").get<double>();
      }
      break;
  }
  return s;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(tmp.string() + ": cannot open for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error(tmp.string() + ": write failed");
  }
  std::filesystem::rename(tmp, target);
}

Instance parse_instance(const std::string& text, const std::string& origin) {
  const json j = parse_json(text, origin);
  Instance inst;
  const json& step = require(j, "epsilon", origin);
  try {
    inst.grid = Grid::parse(amount_text(step, origin + ".epsilon"));
  } catch (const ValidationError& e) {
    throw ValidationError(origin + ".epsilon: " + e.what());
  }
  inst.units = static_cast<int>(parse_integer(require(j, "K", origin), origin + ".K"));
  if (inst.units <= 0) throw ValidationError(origin + ".K: must be positive");
  const json& rule = require(j, "rule", origin);
  try {
    inst.rule = parse_pricing_rule(rule.is_string() ? rule.get<std::string>() : rule.dump());
  } catch (const ValidationError& e) {
    throw ValidationError(origin + ".rule: " + e.what());
  }
  const json& vals = require(j, "valuations", origin);
  if (!vals.is_array() || vals.empty()) {
    throw ValidationError(origin + ".valuations: expected a non-empty array");
  }
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const std::string where = origin + ".valuations[" + std::to_string(i + 1) + "]";
    inst.valuations.push_back(parse_decreasing<Valuation>(vals[i], inst.grid, where));
    if (inst.valuations.back().size() > inst.units) {
      throw ValidationError(where + ": longer than K");
    }
  }
  if (j.contains("n")) {
    const long long n = parse_integer(j.at("n"), origin + ".n");
    if (n != inst.players()) {
      throw ValidationError(origin + ".n: says " + std::to_string(n) + " but " +
                            std::to_string(inst.players()) + " valuations are given");
    }
  }
  return inst;
}

Instance load_instance(const std::string& path) { return parse_instance(read_file(path), path); }

RunConfig parse_config(const std::string& text, const std::string& origin,
                       const std::string& base_dir) {
  const json j = parse_json(text, origin);
  RunConfig c;
  try {
    c.grid = Grid::parse(amount_text(require(j, "epsilon", origin), origin + ".epsilon"));
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    throw ValidationError(msg.rfind(origin, 0) == 0 ? msg : origin + ".epsilon: " + msg);
  }
  c.units = static_cast<int>(parse_integer(require(j, "K", origin), origin + ".K"));
  if (c.units <= 0) throw ValidationError(origin + ".K: must be positive");
  c.horizon = static_cast<long>(parse_integer(require(j, "T", origin), origin + ".T"));
  if (c.horizon <= 0) throw ValidationError(origin + ".T: must be positive");
  try {
    c.rule = parse_pricing_rule(require(j, "rule", origin).get<std::string>());
  } catch (const json::exception&) {
    throw ValidationError(origin + ".rule: expected a string");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    throw ValidationError(msg.rfind(origin, 0) == 0 ? msg : origin + ".rule: " + msg);
  }
  if (j.contains("feedback")) {
    try {
      c.feedback = parse_feedback(j.at("feedback").get<std::string>());
    } catch (const json::exception&) {
      throw ValidationError(origin + ".feedback: expected a string");
    } catch (const ValidationError& e) {
      throw ValidationError(origin + ".feedback: " + e.what());
    }
  }
  if (j.contains("seed")) {
    const long long seed = parse_integer(j.at("seed"), origin + ".seed");
    if (seed < 0) throw ValidationError(origin + ".seed: must be non-negative");
    c.seed = static_cast<std::uint64_t>(seed);
  }
  const json& players = require(j, "players", origin);
  if (!players.is_array() || players.empty()) {
    throw ValidationError(origin + ".players: expected a non-empty array");
  }
  const int n = static_cast<int>(players.size());
  if (j.contains("n") && parse_integer(j.at("n"), origin + ".n") != n) {
    throw ValidationError(origin + ".n: does not match the number of players");
  }
  for (int i = 0; i < n; ++i) {
    const std::string where = origin + ".players[" + std::to_string(i + 1) + "]";
    PlayerConfig p;
    p.valuation = parse_decreasing<Valuation>(require(players[i], "valuation", where), c.grid,
                                              where + ".valuation");
    p.policy = parse_policy_spec(players[i], where, c.grid, base_dir, i, n, c.units, c.horizon);
    c.players.push_back(std::move(p));
  }
  try {
    validate(c);
  } catch (const ValidationError& e) {
    throw ValidationError(origin + ": " + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  const std::string base = std::filesystem::path(path).parent_path().string();
  return parse_config(read_file(path), path, base.empty() ? "." : base);
}

History parse_history(const std::string& text, const std::string& origin, const Grid& grid,
                      int players, int units) {
  const auto rows = read_csv(text, origin, {"round", "player", "unit_index", "bid"});
  std::map<int, std::pair<std::vector<std::vector<Money>>, std::vector<std::vector<bool>>>> rounds;
  std::map<int, int> first_line;
  int last = 0;
  for (const CsvLine& row : rows) {
    const std::string where = where_line(origin, row.number);
    const int t = parse_count(row.cells[0], where + " round");
    if (t < 1) throw ValidationError(where + ": round must be at least 1");
    auto [it, fresh] = rounds.try_emplace(
        t, std::vector<std::vector<Money>>(players, std::vector<Money>(units, Money(0))),
        std::vector<std::vector<bool>>(players, std::vector<bool>(units, false)));
    if (fresh) first_line[t] = row.number;
    place(it->second.first, it->second.second, parse_count(row.cells[1], where + " player"),
          parse_count(row.cells[2], where + " unit_index"),
          parse_cell_money(row.cells[3], grid, where + " bid"), where);
    last = std::max(last, t);
  }
  History h(static_cast<std::size_t>(last),
            BidProfile(static_cast<std::size_t>(players), BidVector::zeros(units)));
  for (auto& [t, tables] : rounds) {
    h[t - 1] = to_profile(std::move(tables.first),
                          where_line(origin, first_line[t]) + " (round " + std::to_string(t) + ")");
  }
  return h;
}

History load_history(const std::string& path, const Grid& grid, int players, int units) {
  return parse_history(read_file(path), path, grid, players, units);
}

std::string format_history(const History& history, const Grid& grid) {
  std::string out = "round,player,unit_index,bid\n";
  for (std::size_t t = 0; t < history.size(); ++t) {
    for (std::size_t i = 0; i < history[t].size(); ++i) {
      const BidVector& b = history[t][i];
      for (int j = 1; j <= b.size(); ++j) {
        out += std::to_string(t + 1) + "," + std::to_string(i + 1) + "," + std::to_string(j) + "," +
               grid.format(b.bid(j)) + "\n";
      }
    }
  }
  return out;
}

BidProfile load_profile(const std::string& path, const Grid& grid, int players, int units) {
  const auto rows = read_csv(read_file(path), path, {"player", "unit_index", "bid"});
  std::vector<std::vector<Money>> table(players, std::vector<Money>(units, Money(0)));
  std::vector<std::vector<bool>> seen(players, std::vector<bool>(units, false));
  for (const CsvLine& row : rows) {
    const std::string where = where_line(path, row.number);
    place(table, seen, parse_count(row.cells[0], where + " player"),
          parse_count(row.cells[1], where + " unit_index"),
          parse_cell_money(row.cells[2], grid, where + " bid"), where);
  }
  return to_profile(std::move(table), path);
}

TransferProfile load_transfers(const std::string& path, const Grid& grid, int players) {
  const auto rows = read_csv(read_file(path), path, {"from", "to", "amount"});
  std::vector<std::vector<Money>> t(players, std::vector<Money>(players, Money(0)));
  for (const CsvLine& row : rows) {
    const std::string where = where_line(path, row.number);
    const int from = parse_count(row.cells[0], where + " from");
    const int to = parse_count(row.cells[1], where + " to");
    if (from < 1 || from > players || to < 1 || to > players) {
      throw ValidationError(where + ": player outside 1.." + std::to_string(players));
    }
    if (from == to) throw ValidationError(where + ": self-transfer");
    t[from - 1][to - 1] += parse_cell_money(row.cells[2], grid, where + " amount");
  }
  return TransferProfile(std::move(t));
}

std::string format_vector(const DecreasingVector& v, const Grid& grid) {
  std::string out;
  for (int j = 1; j <= v.size(); ++j) {
    if (j > 1) out += ';';
    out += grid.format(v.at(j));
  }
  return out;
}

std::string format_run(const RunRecord& record, const Grid& grid) {
  std::string out = "round,player,bid_vector,price,allocation,utility\n";
  for (std::size_t t = 0; t < record.rounds.size(); ++t) {
    const RoundRow& r = record.rounds[t];
    const std::string price = grid.format(r.price);
    for (std::size_t i = 0; i < r.bids.size(); ++i) {
      out += std::to_string(t + 1) + "," + std::to_string(i + 1) + "," +
             format_vector(r.bids[i], grid) + "," + price + "," +
             std::to_string(r.allocation[i]) + "," + grid.format(r.utilities[i]) + "\n";
    }
  }
  return out;
}

std::string format_summary(const std::vector<SummaryRow>& rows) {
  std::string out = "seed,policy,T,K,regret_grid,regret_full,bound,wall_ms\n";
  for (const SummaryRow& r : rows) {
    out += std::to_string(r.seed) + "," + r.policy + "," + std::to_string(r.horizon) + "," +
           std::to_string(r.units) + "," + r.regret_grid + "," + r.regret_full + "," + r.bound +
           "," + std::to_string(r.wall_ms) + "\n";
  }
  return out;
}

std::string format_dag(const WeightedDag& g, const Grid& grid) {
  const LayeredDag& dag = g.dag;
  auto label = [&](LayeredDag::VertexId v) -> std::string {
    if (v == dag.source()) return "source";
    if (v == dag.sink()) return "sink";
    const int layer = (v - 1) / dag.level_count() + 1;
    const int idx = (v - 1) % dag.level_count();
    return "z(" + grid.format(dag.level(idx)) + ";" + std::to_string(layer) + ")";
  };
  std::string out = "edge,from,to,layer,from_bid,to_bid,weight\n";
  for (std::size_t e = 0; e < dag.edge_count(); ++e) {
    const LayeredDag::Edge& edge = dag.edge(static_cast<LayeredDag::EdgeId>(e));
    out += std::to_string(e) + "," + label(edge.from) + "," + label(edge.to) + "," +
           std::to_string(edge.layer) + "," + (edge.hi < 0 ? "" : grid.format(dag.tail_bid(edge))) +
           "," + (edge.lo < 0 ? "" : grid.format(dag.head_bid(edge))) + "," +
           grid.format(g.weights[e]) + "\n";
  }
  return out;
}

}  // namespace mua
