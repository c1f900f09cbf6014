#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mcpfd/low_level.hpp"
#include "mcpfd/workspace.hpp"

namespace mcpfd {

// Disturbances applied while executing a plan.
struct DelayModel {
  double move_delay_prob = 0.0;  // chance that a ready agent stalls before moving on
  int delay_lo = 1;              // stall length range, ticks
  int delay_hi = 1;
  double duration_noise = 0.0;   // actual tau = round(tau * (1 + U(-noise, noise)))
  std::uint64_t seed = 0;
};

struct ExecutionResult {
  std::vector<Path> paths;                         // executed, with actual task windows
  std::vector<std::map<Vertex, int>> actual_duration;  // [agent][vertex]
  Tick makespan = 0;
};

// Executes `plan` through its temporal plan graph: agents keep the planned
// precedence, work for the sampled durations and stall at random before
// leaving a location. The final location of an agent is never delayed.
// Throws DeadlockError once the run exceeds ten times the planned makespan.
ExecutionResult simulate_execution(const Instance& inst, const std::vector<Path>& plan, const DelayModel& model);

ValidationReport verify_trace(const Instance& inst, const ExecutionResult& result);

// One JSON object per tick: {"t": t, "locations": [...]}.
std::string trace_to_jsonl(const ExecutionResult& result);

}  // namespace mcpfd
