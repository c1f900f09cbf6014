#include "mcpfd/bench.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mcpfd/cbss.hpp"
#include "mcpfd/serialization.hpp"
#include "mcpfd/tpg.hpp"
#include "mcpfd/verify.hpp"
#include "mcpfd/workspace.hpp"

namespace mcpfd {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(value);
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  if (!value.empty() && value.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::vector<std::string>& items, int line) {
  std::vector<std::uint64_t> out;
  for (const auto& it : items) {
    const auto dash = it.find('-');
    try {
      if (dash == std::string::npos) {
        out.push_back(std::stoull(it));
      } else {
        const auto lo = std::stoull(it.substr(0, dash));
        const auto hi = std::stoull(it.substr(dash + 1));
        if (hi < lo) throw ParseError("empty seed range " + it, line);
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw ParseError("bad seed " + it, line);
    }
  }
  return out;
}

std::vector<int> parse_ints(const std::vector<std::string>& items, int line) {
  std::vector<int> out;
  for (const auto& it : items) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(it, &used));
      if (used != it.size()) throw std::invalid_argument(it);
    } catch (const std::logic_error&) {
      throw ParseError("bad integer " + it, line);
    }
  }
  return out;
}

double parse_double(const std::string& v, int line) {
  try {
    return std::stod(v);
  } catch (const std::logic_error&) {
    throw ParseError("bad number " + v, line);
  }
}

}  // namespace

BenchConfig parse_bench_config(std::istream& in) {
  BenchConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", line_no);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    const auto items = split_list(value);
    if (key == "map" || key == "maps") cfg.maps = items;
    else if (key == "scen" || key == "scens") cfg.scens = items;
    else if (key == "scenes") cfg.scenes = parse_ints(items, line_no);
    else if (key == "agents") cfg.agents = parse_ints(items, line_no);
    else if (key == "targets") cfg.targets = parse_ints(items, line_no);
    else if (key == "taus") cfg.taus = items;
    else if (key == "seeds") cfg.seeds = parse_seeds(items, line_no);
    else if (key == "algorithms") cfg.algorithms = items;
    else if (key == "time_limit") cfg.time_limit = parse_double(value, line_no);
    else if (key == "eps") cfg.eps = parse_double(value, line_no);
    else if (key == "threads") cfg.threads = parse_ints({value}, line_no).at(0);
    else throw ParseError("unknown key " + key, line_no);
  }
  if (cfg.maps.empty()) throw ParseError("config needs a map", line_no);
  for (int s : cfg.scenes)
    if (s < 1 || s > 3) throw ParseError("scenes must be 1, 2 or 3", line_no);
  for (const auto& t : cfg.taus) parse_tau_spec(t);
  for (const auto& a : cfg.algorithms)
    if (a != "cbss-d" && a != "cbss-tpg" && a != "cbss-d-old") throw ParseError("unknown algorithm " + a, line_no);
  if (cfg.threads < 1) cfg.threads = 1;
  return cfg;
}

BenchConfig parse_bench_config(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_bench_config(in);
}

namespace {

struct MapSource {
  std::string name;
  Grid grid;
  std::optional<std::vector<std::pair<Vertex, Vertex>>> pairs;  // from a scen file
  std::optional<Instance> fixed;                                // the toy4x4 fixture
};

MapSource load_map(const std::string& spec, const std::string& scen, const std::filesystem::path& base) {
  MapSource src;
  if (spec == "toy4x4") {
    src.fixed = toy4x4();
    src.grid = src.fixed->graph.grid();
    src.name = spec;
    return src;
  }
  if (spec.rfind("random:", 0) == 0) {
    const auto parts = split_list([&] {
      std::string s = spec.substr(7);
      std::replace(s.begin(), s.end(), ':', ',');
      return s;
    }());
    if (parts.size() != 4) throw ParseError("random map spec is random:W:H:RATIO:SEED", 0);
    const int w = std::stoi(parts[0]), h = std::stoi(parts[1]);
    src.grid = generate_random_grid(w, h, std::stod(parts[2]), std::stoull(parts[3]));
    src.name = "random-" + parts[0] + "-" + parts[1] + "-" + parts[2] + "-" + parts[3];
  } else {
    const auto path = std::filesystem::path(spec).is_absolute() ? std::filesystem::path(spec) : base / spec;
    src.grid = parse_map(read_text_file(path.string()));
    src.name = path.stem().string();
  }
  if (!scen.empty()) {
    const auto path = std::filesystem::path(scen).is_absolute() ? std::filesystem::path(scen) : base / scen;
    src.pairs = parse_scen(read_text_file(path.string()), src.grid);
  }
  return src;
}

struct Cell {
  std::size_t instance;
  std::string algorithm;
  BenchRow row;
};

}  // namespace

BenchReport run_benchmark(const BenchConfig& cfg, const std::string& base_dir) {
  const std::filesystem::path base(base_dir);
  std::vector<MapSource> maps;
  for (std::size_t i = 0; i < cfg.maps.size(); ++i)
    maps.push_back(load_map(cfg.maps[i], i < cfg.scens.size() ? cfg.scens[i] : std::string(), base));

  std::vector<std::optional<Instance>> instances;
  std::vector<Cell> cells;
  for (const auto& src : maps) {
    if (src.fixed) {
      BenchRow proto;
      proto.map = src.name;
      proto.n = src.fixed->num_agents();
      proto.m = src.fixed->num_targets();
      proto.tau = "fixture";
      instances.push_back(src.fixed);
      for (const auto& alg : cfg.algorithms) {
        Cell c{instances.size() - 1, alg, proto};
        c.row.algorithm = alg;
        cells.push_back(std::move(c));
      }
      continue;
    }
    for (int scene : cfg.scenes)
      for (int n : cfg.agents)
        for (int m : cfg.targets)
          for (const auto& tau : cfg.taus)
            for (auto seed : cfg.seeds) {
              BenchRow proto;
              proto.map = src.name;
              proto.scene = scene;
              proto.n = n;
              proto.m = m;
              proto.tau = tau;
              proto.seed = seed;
              std::optional<Instance> inst;
              try {
                std::vector<std::pair<Vertex, Vertex>> pairs;
                if (src.pairs) {
                  const std::size_t offset = src.pairs->empty() ? 0 : (seed * static_cast<std::uint64_t>(n)) % src.pairs->size();
                  pairs.assign(src.pairs->begin() + static_cast<std::ptrdiff_t>(offset), src.pairs->end());
                  pairs.insert(pairs.end(), src.pairs->begin(), src.pairs->begin() + static_cast<std::ptrdiff_t>(offset));
                } else {
                  pairs = parse_scen(generate_scen_text(src.grid, src.name + ".map", 4 * (n + m) + 16, seed), src.grid);
                }
                SceneConfig sc;
                sc.kind = static_cast<SceneKind>(scene);
                std::tie(sc.tau_lo, sc.tau_hi) = parse_tau_spec(tau);
                sc.seed = seed;
                inst = build_instance(src.grid, pairs, n, m, sc);
                if (!validate_instance(*inst).ok()) inst.reset();
              } catch (const std::exception&) {
                inst.reset();
              }
              instances.push_back(std::move(inst));
              for (const auto& alg : cfg.algorithms) {
                Cell c{instances.size() - 1, alg, proto};
                c.row.algorithm = alg;
                cells.push_back(std::move(c));
              }
            }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < cells.size(); k = next++) {
      Cell& c = cells[k];
      const auto& inst = instances[c.instance];
      if (!inst) {
        c.row.status = "invalid";
        continue;
      }
      SolverConfig sc;
      sc.time_limit = cfg.time_limit;
      sc.eps = cfg.eps;
      sc.rule = c.algorithm == "cbss-d-old" ? BranchingRule::Old : BranchingRule::New;
      Solution sol;
      try {
        sol = c.algorithm == "cbss-tpg" ? solve_cbss_tpg(*inst, sc) : solve_cbss_d(*inst, sc);
      } catch (const std::exception&) {
        c.row.status = "invalid";
        continue;
      }
      c.row.status = to_string(sol.status);
      c.row.wall_ms = sol.stats.wall_ms;
      c.row.conflicts_resolved = sol.stats.conflicts_resolved;
      c.row.roots = sol.stats.roots;
      if (sol.status == SolveStatus::Solved) {
        if (verify_solution(*inst, sol.paths, sol.cost).ok()) c.row.cost = sol.cost;
        else c.row.status = "unverified";
      }
    }
  };
  const int threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  BenchReport report;
  for (auto& c : cells) report.rows.push_back(std::move(c.row));
  report.aggregates = aggregate(report.rows);
  return report;
}

BenchReport run_benchmark_file(const std::string& config_path) {
  const auto cfg = parse_bench_config(read_text_file(config_path));
  return run_benchmark(cfg, std::filesystem::path(config_path).parent_path().string());
}

BenchAggregates aggregate(const std::vector<BenchRow>& rows) {
  BenchAggregates agg;
  using InstanceKey = std::tuple<std::string, int, int, int, std::string, std::uint64_t>;
  std::map<InstanceKey, std::map<std::string, const BenchRow*>> by_instance;
  for (const auto& r : rows) {
    auto& s = agg.success[{r.algorithm, r.m, r.tau}];
    s.second += 1;
    if (r.status == "solved" && r.cost) s.first += 1;
    by_instance[{r.map, r.scene, r.n, r.m, r.tau, r.seed}][r.algorithm] = &r;
  }
  std::map<std::pair<int, std::string>, std::pair<double, int>> ratio_sum;
  std::map<int, std::pair<long long, long long>> conflicts;  // N -> old, new
  std::map<int, int> conflict_pairs;
  for (const auto& [key, algs] : by_instance) {
    auto solved = [&](const std::string& a) -> const BenchRow* {
      auto it = algs.find(a);
      return it != algs.end() && it->second->status == "solved" && it->second->cost ? it->second : nullptr;
    };
    const int n = std::get<2>(key), m = std::get<3>(key);
    const std::string& tau = std::get<4>(key);
    if (const auto *d = solved("cbss-d"), *t = solved("cbss-tpg"); d && t && *t->cost > 0) {
      auto& s = ratio_sum[{m, tau}];
      s.first += 100.0 * static_cast<double>(*t->cost - *d->cost) / static_cast<double>(*t->cost);
      s.second += 1;
    }
    if (const auto *nw = solved("cbss-d"), *old = solved("cbss-d-old"); nw && old) {
      conflicts[n].first += old->conflicts_resolved;
      conflicts[n].second += nw->conflicts_resolved;
      conflict_pairs[n] += 1;
    }
  }
  for (const auto& [k, s] : ratio_sum) agg.cost_ratio[k] = {s.first / s.second, s.second};
  for (const auto& [n, c] : conflicts)
    agg.conflict_ratio[n] = {c.first > 0 ? 100.0 * static_cast<double>(c.first - c.second) / static_cast<double>(c.first) : 0.0,
                             conflict_pairs[n]};
  return agg;
}

std::string rows_to_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "map,scene,N,M,tau,seed,algorithm,status,cost,wall_ms,conflicts_resolved,roots\n";
  out << std::fixed << std::setprecision(3);
  for (const auto& r : rows) {
    out << r.map << ',' << r.scene << ',' << r.n << ',' << r.m << ',' << r.tau << ',' << r.seed << ',' << r.algorithm
        << ',' << r.status << ',';
    if (r.cost) out << *r.cost;
    out << ',' << r.wall_ms << ',' << r.conflicts_resolved << ',' << r.roots << '\n';
  }
  return out.str();
}

std::string aggregates_to_csv(const BenchAggregates& agg) {
  std::ostringstream out;
  out << "metric,algorithm,N,M,tau,value,count\n";
  out << std::fixed << std::setprecision(3);
  for (const auto& [k, s] : agg.success)
    out << "success_rate," << std::get<0>(k) << ",," << std::get<1>(k) << ',' << std::get<2>(k) << ','
        << (s.second ? static_cast<double>(s.first) / s.second : 0.0) << ',' << s.second << '\n';
  for (const auto& [k, s] : agg.cost_ratio)
    out << "cost_ratio_pct,cbss-tpg/cbss-d,," << k.first << ',' << k.second << ',' << s.first << ',' << s.second << '\n';
  for (const auto& [n, s] : agg.conflict_ratio)
    out << "conflict_ratio_pct,cbss-d-old/cbss-d," << n << ",,," << s.first << ',' << s.second << '\n';
  return out.str();
}

}  // namespace mcpfd
