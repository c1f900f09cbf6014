#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mcpfd {

using Vertex = int;
using AgentId = int;  // 0-based everywhere in code and files
using Tick = int;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Occupancy grid. Cell (row, col) has id width * row + col.
struct Grid {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> passable;  // height * width, row-major

  Grid() = default;
  Grid(int w, int h, std::vector<std::uint8_t> cells);

  int id(int row, int col) const { return width * row + col; }
  int row_of(int id) const { return id / width; }
  int col_of(int id) const { return id % width; }
  bool in_bounds(int row, int col) const { return row >= 0 && row < height && col >= 0 && col < width; }
  bool is_passable(int id) const { return passable[static_cast<std::size_t>(id)] != 0; }
  int num_passable() const;
};

// 4-connected unit-cost graph over the passable cells of a grid. Vertex ids are
// the grid cell ids; blocked cells are isolated ids with no neighbors.
class Graph {
 public:
  Graph() = default;
  explicit Graph(Grid grid);

  const Grid& grid() const { return grid_; }
  int num_vertices() const { return static_cast<int>(adj_.size()); }
  bool is_passable(Vertex v) const { return v >= 0 && v < num_vertices() && grid_.is_passable(v); }
  const std::vector<Vertex>& neighbors(Vertex v) const { return adj_[static_cast<std::size_t>(v)]; }
  bool adjacent(Vertex u, Vertex v) const;

  // BFS hop counts from src; -1 where unreachable.
  std::vector<int> distances_from(Vertex src) const;

 private:
  Grid grid_;
  std::vector<std::vector<Vertex>> adj_;
};

// An MCPF-D instance. Targets and goals are "task vertices"; each carries an
// eligible-agent set and per-agent durations.
struct Instance {
  Graph graph;
  std::vector<Vertex> starts;
  std::vector<Vertex> goals;
  std::vector<Vertex> targets;
  std::map<Vertex, std::vector<AgentId>> eligibility;   // sorted, unique agents
  std::map<Vertex, std::map<AgentId, int>> duration;    // defined for eligible pairs

  int num_agents() const { return static_cast<int>(starts.size()); }
  int num_targets() const { return static_cast<int>(targets.size()); }
  // Targets first (in stored order), then goals.
  std::vector<Vertex> task_vertices() const;
  bool is_target(Vertex v) const;
  bool is_goal(Vertex v) const;
  bool is_eligible(AgentId a, Vertex v) const;
  // Throws InstanceError when (a, v) is not an eligible pair.
  int task_duration(AgentId a, Vertex v) const;
};

enum class SceneKind { Scene1 = 1, Scene2 = 2, Scene3 = 3 };

struct SceneConfig {
  SceneKind kind = SceneKind::Scene1;
  int tau_lo = 0;  // Scenes 1-2 use tau_lo == tau_hi
  int tau_hi = 0;
  std::uint64_t seed = 0;
};

// Parses "5", "2-10" or "2..10".
std::pair<int, int> parse_tau_spec(std::string_view spec);

Grid parse_map(std::istream& in);
Grid parse_map(std::string_view text);
std::string write_map(const Grid& grid);

std::vector<std::pair<Vertex, Vertex>> parse_scen(std::istream& in, const Grid& grid);
std::vector<std::pair<Vertex, Vertex>> parse_scen(std::string_view text, const Grid& grid);

// Starts/goals come from the first n_agents scen pairs whose four cells are
// still unused (colliding pairs are skipped). Targets are drawn without
// replacement from the goal cells of the remaining entries.
Instance build_instance(const Grid& grid, const std::vector<std::pair<Vertex, Vertex>>& pairs,
                        int n_agents, int n_targets, const SceneConfig& cfg);

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_instance(const Instance& inst);

// The 4x4 example used throughout the tests and docs: agents 8->11, 1->13,
// 2->14; targets 6, 9, 10. Durations at 6 and 9 are inferred from the
// published example paths, see README.
Instance toy4x4();

// Synthetic benchmark material in MovingAI format.
Grid generate_random_grid(int width, int height, double blocked_ratio, std::uint64_t seed);
std::string generate_scen_text(const Grid& grid, const std::string& map_name, int n_entries,
                               std::uint64_t seed);

}  // namespace mcpfd
