#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace mcpfd {

// Flat "key = value" text, '#' starts a comment, lists are comma separated:
//
//   map = maps/random-32-32-20.map, random:16:16:0.2:7
//   scen = maps/random-32-32-20-random-1.scen,
//   scenes = 1, 2
//   agents = 5, 10
//   targets = 10, 20
//   taus = 2, 5, 2-10
//   seeds = 0-9
//   algorithms = cbss-d, cbss-tpg, cbss-d-old
//   time_limit = 60
//   threads = 1
//
// `random:W:H:RATIO:SEED` generates a map and `toy4x4` runs the fixed toy
// instance (scene, agents, targets and taus are ignored for it). An empty scen entry (or a missing
// scen key) generates a scenario per seed; with a scen file, seed s uses the
// pairs from offset s * agents onwards.
struct BenchConfig {
  std::vector<std::string> maps;
  std::vector<std::string> scens;
  std::vector<int> scenes{1};
  std::vector<int> agents{5};
  std::vector<int> targets{10};
  std::vector<std::string> taus{"5"};
  std::vector<std::uint64_t> seeds{0};
  std::vector<std::string> algorithms{"cbss-d", "cbss-tpg"};
  double time_limit = 60.0;
  double eps = 0.0;
  int threads = 1;
};

BenchConfig parse_bench_config(std::istream& in);
BenchConfig parse_bench_config(std::string_view text);

// One (instance, algorithm) cell. cost is set only for verified solutions.
struct BenchRow {
  std::string map;
  int scene = 1;
  int n = 0;
  int m = 0;
  std::string tau;
  std::uint64_t seed = 0;
  std::string algorithm;
  std::string status;  // solved, timeout, infeasible, invalid, unverified
  std::optional<long long> cost;
  double wall_ms = 0;
  long long conflicts_resolved = 0;
  long long roots = 0;
};

struct BenchAggregates {
  std::map<std::tuple<std::string, int, std::string>, std::pair<int, int>> success;  // (alg, M, tau) -> solved, total
  std::map<std::pair<int, std::string>, std::pair<double, int>> cost_ratio;          // (M, tau) -> mean %, pairs
  std::map<int, std::pair<double, int>> conflict_ratio;                              // N -> %, pairs
};

struct BenchReport {
  std::vector<BenchRow> rows;
  BenchAggregates aggregates;
};

// Relative map/scen paths are resolved against base_dir.
BenchReport run_benchmark(const BenchConfig& cfg, const std::string& base_dir = ".");
BenchReport run_benchmark_file(const std::string& config_path);

// Cost ratio (tpg - d) / tpg * 100 over instances both solved; conflict ratio
// (old - new) / old * 100 summed over instances both rules solved.
BenchAggregates aggregate(const std::vector<BenchRow>& rows);

// Column order: map,scene,N,M,tau,seed,algorithm,status,cost,wall_ms,
// conflicts_resolved,roots
std::string rows_to_csv(const std::vector<BenchRow>& rows);
// Columns: metric,algorithm,N,M,tau,value,count
std::string aggregates_to_csv(const BenchAggregates& agg);

}  // namespace mcpfd
