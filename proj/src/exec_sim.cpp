#include "mcpfd/exec_sim.hpp"

#include <cmath>

#include "json.hpp"

#include "mcpfd/rng.hpp"
#include "mcpfd/tpg.hpp"
#include "mcpfd/verify.hpp"

namespace mcpfd {

ExecutionResult simulate_execution(const Instance& inst, const std::vector<Path>& plan, const DelayModel& model) {
  if (model.delay_lo < 0 || model.delay_hi < model.delay_lo) throw std::invalid_argument("bad delay range");
  SplitMix64 rng(model.seed);
  Tpg g = build_tpg(inst, plan);
  ExecutionResult result;
  result.actual_duration.resize(plan.size());
  for (auto& ev : g.events) {
    if (!ev.is_task) continue;
    int tau = ev.task_ticks;
    if (model.duration_noise > 0 && tau > 0) {
      const double f = 1.0 + model.duration_noise * (2.0 * rng.uniform_real() - 1.0);
      tau = std::max(0, static_cast<int>(std::lround(tau * f)));
    }
    ev.task_ticks = tau;
    ev.D = ev.wait_ticks + tau;
    result.actual_duration[static_cast<std::size_t>(ev.agent)][ev.v] = tau;
  }
  Tick planned = 0;
  for (const auto& p : plan) planned = std::max(planned, p.cost());

  StallFn stall = [&](const TpgEvent& ev) {
    const auto& route = g.routes[static_cast<std::size_t>(ev.agent)];
    if (ev.index + 1 == static_cast<int>(route.size())) return 0;
    if (!rng.bernoulli(model.move_delay_prob)) return 0;
    return static_cast<int>(rng.uniform_int(model.delay_lo, model.delay_hi));
  };
  result.paths = tpg_replay(g, stall, 10LL * (planned + 1));
  for (const auto& p : result.paths) result.makespan = std::max(result.makespan, p.cost());
  return result;
}

ValidationReport verify_trace(const Instance& inst, const ExecutionResult& result) {
  return verify_paths(inst, result.paths, result.actual_duration);
}

std::string trace_to_jsonl(const ExecutionResult& result) {
  std::string out;
  for (Tick t = 0; t <= result.makespan; ++t) {
    nlohmann::json row;
    row["t"] = t;
    auto& locs = row["locations"] = nlohmann::json::array();
    for (const auto& p : result.paths) locs.push_back(p.at(t));
    out += row.dump();
    out += '\n';
  }
  return out;
}

}  // namespace mcpfd
