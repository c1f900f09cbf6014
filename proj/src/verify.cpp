#include "mcpfd/verify.hpp"

#include <functional>
#include <set>
#include <sstream>

namespace mcpfd {

namespace {

using DurationFn = std::function<int(AgentId, Vertex)>;

ValidationReport check(const Instance& inst, const std::vector<Path>& paths, const DurationFn& dur,
                       std::optional<long long> claimed_cost) {
  ValidationReport rep;
  auto fail = [&](const std::string& msg) { rep.violations.push_back(msg); };
  const int n = inst.num_agents();
  if (static_cast<int>(paths.size()) != n) {
    fail("expected " + std::to_string(n) + " paths, got " + std::to_string(paths.size()));
    return rep;
  }
  for (int a = 0; a < n; ++a)
    if (paths[static_cast<std::size_t>(a)].locs.empty()) {
      fail("agent " + std::to_string(a) + " has an empty path");
      return rep;
    }

  Tick horizon = 0;
  bool any_windows = false;
  for (int a = 0; a < n; ++a) {
    const auto& p = paths[static_cast<std::size_t>(a)];
    horizon = std::max(horizon, p.cost());
    any_windows = any_windows || !p.tasks.empty();
    if (p.locs.front() != inst.starts[static_cast<std::size_t>(a)])
      fail("agent " + std::to_string(a) + " does not begin at its start");
    for (std::size_t t = 0; t < p.locs.size(); ++t) {
      if (!inst.graph.is_passable(p.locs[t])) fail("agent " + std::to_string(a) + " on a blocked cell at tick " + std::to_string(t));
      if (t > 0 && p.locs[t] != p.locs[t - 1] && !inst.graph.adjacent(p.locs[t - 1], p.locs[t]))
        fail("agent " + std::to_string(a) + " jumps at tick " + std::to_string(t));
    }
  }

  for (Tick t = 0; t <= horizon; ++t)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const auto& pi = paths[static_cast<std::size_t>(i)];
        const auto& pj = paths[static_cast<std::size_t>(j)];
        if (pi.at(t) == pj.at(t))
          fail("vertex conflict between " + std::to_string(i) + " and " + std::to_string(j) + " at " +
               std::to_string(pi.at(t)) + ", tick " + std::to_string(t));
        if (t < horizon && pi.at(t) != pi.at(t + 1) && pi.at(t) == pj.at(t + 1) && pj.at(t) == pi.at(t + 1))
          fail("swap conflict between " + std::to_string(i) + " and " + std::to_string(j) + " at tick " + std::to_string(t));
      }

  std::set<Vertex> goals_used;
  for (int a = 0; a < n; ++a) {
    const auto& p = paths[static_cast<std::size_t>(a)];
    const Vertex g = p.locs.back();
    if (!inst.is_goal(g) || !inst.is_eligible(a, g)) {
      fail("agent " + std::to_string(a) + " does not end on an eligible goal");
      continue;
    }
    if (!goals_used.insert(g).second) fail("goal " + std::to_string(g) + " used twice");
    std::size_t run = 1;
    while (run < p.locs.size() && p.locs[p.locs.size() - 1 - run] == g) ++run;
    if (static_cast<int>(run) < dur(a, g) + 1) fail("agent " + std::to_string(a) + " leaves no time for its goal task");
  }

  if (any_windows) {
    std::set<Vertex> done;
    for (int a = 0; a < n; ++a)
      for (const auto& w : paths[static_cast<std::size_t>(a)].tasks) {
        const std::string who = "agent " + std::to_string(a) + " at " + std::to_string(w.v);
        if (!inst.is_eligible(a, w.v)) {
          fail(who + ": not an eligible task");
          continue;
        }
        if (w.end - w.start != dur(a, w.v)) fail(who + ": window length differs from the duration");
        for (Tick t = w.start; t <= w.end; ++t)
          if (paths[static_cast<std::size_t>(a)].at(t) != w.v) {
            fail(who + ": away during its task window");
            break;
          }
        if (inst.is_target(w.v)) done.insert(w.v);
      }
    for (Vertex v : inst.targets)
      if (!done.count(v)) fail("task not executed: target " + std::to_string(v));
  } else {
    for (Vertex v : inst.targets) {
      bool ok = false;
      for (int a = 0; a < n && !ok; ++a) {
        if (!inst.is_eligible(a, v)) continue;
        const auto& locs = paths[static_cast<std::size_t>(a)].locs;
        int run = 0;
        for (Vertex u : locs) {
          run = u == v ? run + 1 : 0;
          if (run >= dur(a, v) + 1) ok = true;
        }
      }
      if (!ok) fail("task not executed: target " + std::to_string(v));
    }
  }

  long long total = 0;
  for (const auto& p : paths) total += p.cost();
  if (claimed_cost && *claimed_cost != total)
    fail("claimed cost " + std::to_string(*claimed_cost) + " but paths cost " + std::to_string(total));
  return rep;
}

}  // namespace

ValidationReport verify_solution(const Instance& inst, const std::vector<Path>& paths, std::optional<long long> claimed_cost) {
  return check(inst, paths, [&](AgentId a, Vertex v) { return inst.task_duration(a, v); }, claimed_cost);
}

ValidationReport verify_paths(const Instance& inst, const std::vector<Path>& paths,
                              const std::vector<std::map<Vertex, int>>& actual) {
  return check(
      inst, paths,
      [&](AgentId a, Vertex v) {
        if (a < static_cast<AgentId>(actual.size())) {
          auto it = actual[static_cast<std::size_t>(a)].find(v);
          if (it != actual[static_cast<std::size_t>(a)].end()) return it->second;
        }
        return inst.task_duration(a, v);
      },
      std::nullopt);
}

}  // namespace mcpfd
