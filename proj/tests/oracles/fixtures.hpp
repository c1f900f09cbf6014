#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mcpfd/workspace.hpp"

namespace oracle {

// Random instance on a generated map; nullopt when the draw is unusable.
inline std::optional<mcpfd::Instance> random_instance(int width, int height, double blocked, int agents, int targets,
                                                      mcpfd::SceneKind scene, int tau_lo, int tau_hi,
                                                      std::uint64_t seed) {
  using namespace mcpfd;
  try {
    const Grid grid = generate_random_grid(width, height, blocked, seed);
    const auto pairs = parse_scen(generate_scen_text(grid, "gen.map", 4 * (agents + targets) + 16, seed), grid);
    const Instance inst = build_instance(grid, pairs, agents, targets, {scene, tau_lo, tau_hi, seed});
    if (!validate_instance(inst).ok()) return std::nullopt;
    return inst;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace oracle
