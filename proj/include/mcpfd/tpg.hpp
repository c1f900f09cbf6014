#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcpfd/cbss.hpp"

namespace mcpfd {

// Event "agent enters v" on the agent's route (its path without waits).
struct TpgEvent {
  AgentId agent = -1;
  int index = 0;     // position on the route
  Vertex v = -1;
  Tick tick = 0;     // entry tick in the source plan
  int wait_ticks = 0;  // extra ticks the source plan stays at v
  int task_ticks = 0;  // duration of the task started at this event, if any
  int D = 0;           // remaining ticks to spend at v
  bool is_task = false;
};

struct TpgEdge {
  int from = -1;
  int to = -1;
  int type = 1;  // 1: same route, 2: same location on different routes
};

// Temporal plan graph: Type 1 edges chain every route, Type 2 edges order two
// agents entering the same location by their entry ticks.
struct Tpg {
  std::vector<TpgEvent> events;
  std::vector<std::vector<int>> routes;  // per agent, event ids in order
  std::vector<TpgEdge> edges;
  std::vector<std::vector<int>> out;     // event -> outgoing edge ids
  std::vector<int> in_degree;
};

// Task ticks come from the plan's task windows and the instance durations.
Tpg build_tpg(const Instance& inst, const std::vector<Path>& plan);

class DeadlockError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deletion test for a zero in-degree event: its D is spent and the next
// location on the route is not held by another agent in `current`, unless
// that agent is marked in `leaving` (it departs in the same tick, so this
// agent follows it in). The last event of a route only needs D == 0.
bool check_delete(const Tpg& g, int event, const std::vector<Vertex>& current,
                  const std::vector<char>& leaving = {});

// Replays the TPG tick by tick, keeping each agent at an event for D + 1
// ticks and moving only when the next location is free. Returns the joint
// path with task windows placed at the start of every task event.
std::vector<Path> tpg_d_postprocess(const Instance& inst, const std::vector<Path>& plan);
std::vector<Path> tpg_d_postprocess(Tpg g);

// The same replay with an extra hold: `stall` is asked once per event, when
// it first passes check_delete, for the number of ticks to wait before
// leaving. Throws DeadlockError after max_ticks iterations (when >= 0).
using StallFn = std::function<int(const TpgEvent&)>;
std::vector<Path> tpg_replay(Tpg g, const StallFn& stall = {}, long long max_ticks = -1);

// Both plans visit the same routes and every location is entered by agents in
// the same order.
bool same_visiting_order(const std::vector<Path>& a, const std::vector<Path>& b);

std::string tpg_to_dot(const Tpg& g);

// CBSS on the instance with all durations set to zero, followed by TPG-D with
// the real durations. The duration-free plan is copied to `pre_plan` if given.
Solution solve_cbss_tpg(const Instance& inst, const SolverConfig& cfg = {}, std::vector<Path>* pre_plan = nullptr);

}  // namespace mcpfd
