#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mcpfd/deadline.hpp"
#include "mcpfd/workspace.hpp"

namespace mcpfd {

using Cost = std::int64_t;
inline constexpr Cost kNoArc = std::numeric_limits<Cost>::max() / 4;

class SequencingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Complete graph over starts, targets and goals (in that order) with the
// shortest-path metric of the workspace.
struct TargetGraph {
  std::vector<Vertex> keys;  // starts, then targets, then goals
  std::vector<Cost> cost;    // keys.size()^2, kNoArc when disconnected
  int num_agents = 0;

  int size() const { return static_cast<int>(keys.size()); }
  Cost at(int a, int b) const { return cost[static_cast<std::size_t>(a) * keys.size() + static_cast<std::size_t>(b)]; }
  int index_of(Vertex v) const;
  Cost between(Vertex u, Vertex v) const { return at(index_of(u), index_of(v)); }
};

// One BFS per key vertex. Throws InstanceError when an agent cannot reach an
// eligible task vertex.
TargetGraph compute_target_graph(const Instance& inst);

// Per-agent ordered visits: start, assigned targets, goal.
struct JointSequence {
  std::vector<std::vector<Vertex>> seqs;
  Cost cost = 0;

  friend bool operator==(const JointSequence&, const JointSequence&) = default;
};

// Metric legs plus the duration of every visited task (goal included).
Cost joint_sequence_cost(const Instance& inst, const TargetGraph& tg, const std::vector<std::vector<Vertex>>& seqs);

struct TransformOptions {
  // When every task is eligible for every agent with an agent-independent
  // duration, use one node per task instead of one copy per agent.
  bool simplify_anonymous = false;
};

// Single-tour encoding of the assignment-constrained multi-agent sequencing
// problem. Nodes 0..N-1 are the agents' starts; every task vertex v (targets,
// then goals) owns a cluster of copies v^i, one per eligible agent, linked in a
// zero-cost cycle in ascending agent order. A tour enters a cluster at the copy
// of the agent performing the task, walks the cycle and leaves from the
// entered copy's cycle predecessor, so arcs out of copy x belong to the owner
// of x's cycle successor:
//
//   start_i        -> v^i            big_m + C(start_i, v) + tau^i(v)
//   exit_k(v)      -> w^k            big_m + C(v, w) + tau^k(w)      (v a target)
//   exit_k(goal g) -> start_{k+1}    big_m
//
// A proper tour uses exactly M + 2N big_m arcs; splitting a cluster costs at
// least one more, so proper tours are exactly those below offset + big_m.
struct TransformedGraph {
  struct Task {
    Vertex vertex = -1;
    bool is_goal = false;
    std::vector<AgentId> agents;  // ascending
  };
  struct Node {
    bool is_start = false;
    int task = -1;        // index into tasks for copies
    AgentId agent = -1;   // start owner or copy owner; -1 for a shared (simplified) node
  };

  int num_agents = 0;
  bool simplified = false;
  std::vector<Vertex> starts;
  std::vector<Task> tasks;
  std::vector<Node> nodes;
  std::vector<std::vector<int>> clusters;  // node ids per task, cycle order
  std::vector<int> cluster_pos;            // node -> index in its cluster
  std::vector<Cost> arc;                   // size()^2, kNoArc where absent
  Cost big_m = 0;
  Cost offset = 0;
  TargetGraph metric;
  std::vector<std::vector<Cost>> task_duration;  // [task][agent], kNoArc if ineligible

  int size() const { return static_cast<int>(nodes.size()); }
  Cost cost(int u, int v) const { return arc[static_cast<std::size_t>(u) * nodes.size() + static_cast<std::size_t>(v)]; }
  int cycle_next(int node) const;
  int cycle_prev(int node) const;
  // Agent whose task is being performed when the tour leaves `node`.
  AgentId exit_owner(int node) const;
  // Copy of task t for agent a, or -1.
  int copy_of(int task, AgentId a) const;
  // Tours at or above this cost split some cluster.
  Cost proper_cutoff() const { return offset + big_m; }
};

TransformedGraph transform(const Instance& inst, const TargetGraph& tg, const TransformOptions& opts = {});

using Arc = std::pair<int, int>;

struct ArcConstraints {
  std::vector<Arc> include;  // must form vertex-disjoint partial paths
  std::vector<Arc> exclude;
};

// Node order starting at node 0; the closing arc back to node 0 is implied.
struct Tour {
  std::vector<int> nodes;
  Cost cost = 0;
};

std::vector<Arc> tour_arcs(const Tour& tour);

// A plain ATSP for the branch-and-bound backend. When `clusters` is given the
// search never leaves a partially visited cluster; this is exact whenever the
// cutoff excludes cluster-splitting tours.
struct AtspProblem {
  int n = 0;
  std::vector<Cost> cost;  // n^2, kNoArc where absent
  std::vector<std::vector<int>> clusters;
  Cost cutoff = kNoArc;  // only tours strictly cheaper are returned
};

// Depth-first branch and bound, children in ascending node order, bounded by
// the sum of the cheapest admissible out-arcs of the unfinished nodes. Among
// optimal tours returns the lexicographically smallest node sequence.
std::optional<Tour> solve_atsp_branch_and_bound(const AtspProblem& problem, const ArcConstraints& constraints,
                                                const Deadline& deadline = {});

// Exact solver that works on the joint-sequence structure of a general
// (non-simplified) transformed graph: per-agent Held-Karp over eligible
// targets, combined by a layered assignment DP. Arc constraints are mapped to
// ownership and successor constraints. Deterministic, but ties are not broken
// lexicographically.
std::optional<Tour> solve_assignment_dp(const TransformedGraph& tfg, const ArcConstraints& constraints,
                                        const Deadline& deadline = {});

enum class SequencingBackend { Auto, BranchAndBound, AssignmentDp, External };

struct SequencingOptions {
  SequencingBackend backend = SequencingBackend::Auto;
  int auto_bnb_max_nodes = 24;  // Auto: branch and bound up to this size
  // External: shell command with {problem} and {tour} placeholders; the
  // solver must write a TSPLIB tour file.
  std::string external_command;
  Deadline deadline;
};

// Minimum-cost proper tour containing every included arc and no excluded
// arc, or nullopt when none exists.
std::optional<Tour> solve_sequencing(const TransformedGraph& tfg, const ArcConstraints& constraints,
                                     const SequencingOptions& opts = {});

// Splits a proper tour at the start nodes and keeps the first (entered) copy
// of every cluster. Throws SequencingError if the tour is not proper.
JointSequence untransform(const Tour& tour, const TransformedGraph& tfg);

// Lawler-style partitioning over tours: the cheapest pool entry is emitted and
// replaced by children that force a prefix of its free arcs and forbid the
// next one.
class KBestSequencer {
 public:
  KBestSequencer(const Instance& inst, SequencingOptions opts = {}, TransformOptions topts = {});

  // Next-best joint sequence without consuming it.
  const JointSequence* peek();
  std::optional<JointSequence> next();

  int emitted() const { return emitted_; }
  int solver_calls() const { return solver_calls_; }
  const TransformedGraph& graph() const { return tfg_; }
  const TargetGraph& target_graph() const { return tg_; }

 private:
  struct Entry {
    ArcConstraints constraints;
    Tour tour;
    std::uint64_t id = 0;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.tour.cost != b.tour.cost ? a.tour.cost > b.tour.cost : a.id > b.id;
    }
  };

  void push_solved(ArcConstraints c);
  bool advance();

  TargetGraph tg_;
  TransformedGraph tfg_;
  SequencingOptions opts_;
  std::priority_queue<Entry, std::vector<Entry>, Later> pool_;
  std::optional<JointSequence> lookahead_;
  std::set<std::vector<std::vector<Vertex>>> seen_;  // simplified mode emits each sequence once
  std::uint64_t next_id_ = 0;
  int emitted_ = 0;
  int solver_calls_ = 0;
};

}  // namespace mcpfd
