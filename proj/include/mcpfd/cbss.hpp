#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcpfd/low_level.hpp"
#include "mcpfd/sequencing.hpp"

namespace mcpfd {

// First conflict between agents i < j. For an edge conflict i moves v -> w and
// j moves w -> v between t and t + 1. For a vertex conflict at (v, t) the
// window of an agent that is working on v at t is recorded.
struct Conflict {
  enum class Kind { Vertex, Edge };
  Kind kind = Kind::Vertex;
  AgentId i = -1;
  AgentId j = -1;
  Vertex v = -1;
  Vertex w = -1;
  Tick t = 0;
  bool i_executing = false;
  bool j_executing = false;
  TaskWindow i_window;
  TaskWindow j_window;
};

// Scans ticks in increasing order, then pairs (i, j) with i < j, checking the
// vertex case before the edge case. Agents rest at their last vertex.
std::optional<Conflict> detect_conflict(const std::vector<Path>& paths);
int count_conflicts(const std::vector<Path>& paths);

enum class BranchingRule { New, Old };

// Two constraint sets, one per child. The new rule widens a vertex conflict
// against an executing agent to a time range over that agent's task window;
// the old rule (and every edge conflict) yields singleton constraints.
std::pair<std::vector<Constraint>, std::vector<Constraint>> generate_constraints(const Conflict& c, BranchingRule rule);

struct SearchStats {
  long long nodes = 0;  // high-level nodes expanded
  long long conflicts_resolved = 0;
  long long roots = 0;
  long long sequencing_calls = 0;
  double wall_ms = 0;
};

enum class SolveStatus { Solved, Timeout, Infeasible };
std::string to_string(SolveStatus s);

struct Solution {
  std::vector<Path> paths;
  long long cost = 0;
  SearchStats stats;
  std::string algorithm;
  SolveStatus status = SolveStatus::Infeasible;
};

long long sum_of_costs(const std::vector<Path>& paths);

struct SolverConfig {
  double eps = 0.0;          // suboptimality bound for generating new roots
  double time_limit = 60.0;  // seconds; <= 0 disables
  BranchingRule rule = BranchingRule::New;
  SequencingBackend backend = SequencingBackend::Auto;
  std::string external_command;
  bool simplify_anonymous = true;
};

// Called for every expanded conflict with the two generated constraint sets.
using BranchHook = std::function<void(const Conflict&, const std::vector<Constraint>&, const std::vector<Constraint>&)>;

Solution solve_cbss_d(const Instance& inst, const SolverConfig& cfg = {}, const BranchHook& hook = {});

// Per-entry durations of a joint sequence (0 for the start).
std::vector<int> sequence_durations(const Instance& inst, AgentId a, const std::vector<Vertex>& seq);

}  // namespace mcpfd
