#pragma once

#include <optional>
#include <vector>

#include "mcpfd/low_level.hpp"

namespace oracle {

// Minimum completion tick of one agent by breadth-first search over
// (vertex, tick, progress, work left), with the same task and constraint
// semantics as the low-level planner. Independent of safe intervals.
std::optional<mcpfd::Tick> time_expanded_cost(const mcpfd::Graph& graph, mcpfd::AgentId agent,
                                              const std::vector<mcpfd::Vertex>& sequence,
                                              const std::vector<int>& durations,
                                              const std::vector<mcpfd::Constraint>& constraints);

}  // namespace oracle
