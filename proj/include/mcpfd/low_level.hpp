#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "mcpfd/deadline.hpp"
#include "mcpfd/workspace.hpp"

namespace mcpfd {

inline constexpr Tick kForever = std::numeric_limits<Tick>::max() / 2;

// Vertex constraint: agent may not occupy v at tick t. Edge constraint: agent
// may not traverse {v, w} (either direction) between ticks t and t + 1.
struct Constraint {
  enum class Kind { Vertex, Edge };
  Kind kind = Kind::Vertex;
  AgentId agent = -1;
  Vertex v = -1;
  Vertex w = -1;
  Tick t = 0;

  static Constraint vertex(AgentId a, Vertex v, Tick t) { return {Kind::Vertex, a, v, -1, t}; }
  static Constraint edge(AgentId a, Vertex u, Vertex w, Tick t) {
    return {Kind::Edge, a, std::min(u, w), std::max(u, w), t};
  }
  friend auto operator<=>(const Constraint&, const Constraint&) = default;
};

// The agent stays at `v` during ticks [start, end] while working on it.
struct TaskWindow {
  Vertex v = -1;
  Tick start = 0;
  Tick end = 0;
  friend bool operator==(const TaskWindow&, const TaskWindow&) = default;
};

// locs[t] is the agent's vertex at tick t; the agent stays at locs.back()
// afterwards. The cost is the completion tick, locs.size() - 1.
struct Path {
  std::vector<Vertex> locs;
  std::vector<TaskWindow> tasks;

  Tick cost() const { return static_cast<Tick>(locs.size()) - 1; }
  Vertex at(Tick t) const {
    return t < static_cast<Tick>(locs.size()) ? locs[static_cast<std::size_t>(t)] : locs.back();
  }
};

// Safe intervals of one agent: maximal tick ranges not hit by a vertex
// constraint. The last interval of every vertex is open-ended.
class SafeIntervalTable {
 public:
  SafeIntervalTable() = default;
  SafeIntervalTable(AgentId agent, const std::vector<Constraint>& constraints);

  // Intervals at v in increasing order; [0, kForever] when unconstrained.
  const std::vector<std::pair<Tick, Tick>>& intervals(Vertex v) const;
  bool edge_blocked(Vertex u, Vertex w, Tick t) const;

 private:
  std::map<Vertex, std::vector<std::pair<Tick, Tick>>> intervals_;
  std::set<std::tuple<Vertex, Vertex, Tick>> edges_;
};

// Minimum-completion-time path visiting sequence[1..] in order, staying
// durations[j] ticks at sequence[j] (the window must lie inside one safe
// interval) and then resting at sequence.back() forever. durations[0] is
// ignored. A* over (vertex, safe interval, progress) states; exact. Ties on f
// prefer the larger g. Returns nullopt when no such path exists.
std::optional<Path> plan_agent_path(const Graph& graph, AgentId agent, const std::vector<Vertex>& sequence,
                                    const std::vector<int>& durations, const std::vector<Constraint>& constraints,
                                    const Deadline& deadline = {});

}  // namespace mcpfd
