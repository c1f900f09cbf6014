#pragma once

#include <map>
#include <optional>
#include <vector>

#include "mcpfd/low_level.hpp"
#include "mcpfd/workspace.hpp"

namespace mcpfd {

// Checks a joint path against the instance: starts, unit moves, no vertex or
// swap conflicts, every target worked on by an eligible agent for its full
// duration, and every agent resting at a distinct eligible goal after its goal
// duration. Task windows on the paths are checked when present; otherwise
// they are inferred from runs at task vertices. `claimed_cost` is compared to
// the sum of completion ticks.
ValidationReport verify_solution(const Instance& inst, const std::vector<Path>& paths,
                                 std::optional<long long> claimed_cost = {});

// Same checks with per-window durations that may differ from the instance
// (execution traces). actual[a][v] is agent a's duration at v.
ValidationReport verify_paths(const Instance& inst, const std::vector<Path>& paths,
                              const std::vector<std::map<Vertex, int>>& actual);

}  // namespace mcpfd
