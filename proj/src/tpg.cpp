#include "mcpfd/tpg.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <sstream>

namespace mcpfd {

Tpg build_tpg(const Instance& inst, const std::vector<Path>& plan) {
  Tpg g;
  g.routes.resize(plan.size());
  for (std::size_t a = 0; a < plan.size(); ++a) {
    const auto& locs = plan[a].locs;
    std::size_t t = 0;
    while (t < locs.size()) {
      std::size_t end = t;
      while (end + 1 < locs.size() && locs[end + 1] == locs[t]) ++end;
      TpgEvent ev;
      ev.agent = static_cast<AgentId>(a);
      ev.index = static_cast<int>(g.routes[a].size());
      ev.v = locs[t];
      ev.tick = static_cast<Tick>(t);
      ev.wait_ticks = static_cast<int>(end - t);
      for (const auto& w : plan[a].tasks) {
        if (w.v != ev.v || w.start < static_cast<Tick>(t) || w.start > static_cast<Tick>(end)) continue;
        // Planned work inside the run is replaced by the task's duration.
        ev.wait_ticks -= w.end - w.start;
        ev.task_ticks = inst.task_duration(ev.agent, w.v);
        ev.is_task = true;
      }
      ev.D = ev.wait_ticks + ev.task_ticks;
      g.routes[a].push_back(static_cast<int>(g.events.size()));
      g.events.push_back(ev);
      t = end + 1;
    }
  }
  g.out.resize(g.events.size());
  g.in_degree.assign(g.events.size(), 0);
  auto add_edge = [&](int from, int to, int type) {
    g.out[static_cast<std::size_t>(from)].push_back(static_cast<int>(g.edges.size()));
    g.edges.push_back({from, to, type});
    ++g.in_degree[static_cast<std::size_t>(to)];
  };
  for (const auto& route : g.routes)
    for (std::size_t k = 1; k < route.size(); ++k) add_edge(route[k - 1], route[k], 1);
  std::map<Vertex, std::vector<int>> by_location;
  for (std::size_t e = 0; e < g.events.size(); ++e) by_location[g.events[e].v].push_back(static_cast<int>(e));
  for (const auto& [v, ids] : by_location)
    for (int x : ids)
      for (int y : ids) {
        const auto& ex = g.events[static_cast<std::size_t>(x)];
        const auto& ey = g.events[static_cast<std::size_t>(y)];
        if (ex.agent != ey.agent && ex.tick < ey.tick) add_edge(x, y, 2);
      }
  return g;
}

bool check_delete(const Tpg& g, int event, const std::vector<Vertex>& current, const std::vector<char>& leaving) {
  const auto& ev = g.events[static_cast<std::size_t>(event)];
  if (g.in_degree[static_cast<std::size_t>(event)] != 0 || ev.D != 0) return false;
  const auto& route = g.routes[static_cast<std::size_t>(ev.agent)];
  if (ev.index + 1 == static_cast<int>(route.size())) return true;
  const Vertex next = g.events[static_cast<std::size_t>(route[static_cast<std::size_t>(ev.index) + 1])].v;
  for (std::size_t a = 0; a < current.size(); ++a)
    if (static_cast<AgentId>(a) != ev.agent && current[a] == next && !(a < leaving.size() && leaving[a])) return false;
  return true;
}

std::vector<Path> tpg_replay(Tpg g, const StallFn& stall, long long max_ticks) {
  const std::size_t n = g.routes.size();
  std::vector<Path> out(n);
  std::vector<Vertex> current(n, -1);
  std::vector<int> remaining(n);
  for (std::size_t a = 0; a < n; ++a) {
    remaining[a] = static_cast<int>(g.routes[a].size());
    if (!g.routes[a].empty()) current[a] = g.events[static_cast<std::size_t>(g.routes[a][0])].v;
  }
  std::vector<char> alive(g.events.size(), 1);
  std::vector<char> seen(g.events.size(), 0);
  std::vector<int> held(g.events.size(), -1);  // stall ticks left, -1 before the first roll
  long long ticks = 0;
  std::size_t left = g.events.size();
  while (left > 0) {
    std::vector<int> zero;
    for (std::size_t e = 0; e < g.events.size(); ++e)
      if (alive[e] && g.in_degree[e] == 0) zero.push_back(static_cast<int>(e));
    if (zero.empty()) throw DeadlockError("temporal plan graph has a cycle");
    if (max_ticks >= 0 && ++ticks > max_ticks) throw DeadlockError("execution exceeded the tick limit");
    std::vector<char> active(n, 0);
    for (std::size_t a = 0; a < n; ++a) active[a] = remaining[a] > 0;
    for (int e : zero) {
      const auto& ev = g.events[static_cast<std::size_t>(e)];
      current[static_cast<std::size_t>(ev.agent)] = ev.v;
      if (!seen[static_cast<std::size_t>(e)]) {
        seen[static_cast<std::size_t>(e)] = 1;
        if (ev.is_task) {
          const auto start = static_cast<Tick>(out[static_cast<std::size_t>(ev.agent)].locs.size());
          out[static_cast<std::size_t>(ev.agent)].tasks.push_back({ev.v, start, start + ev.task_ticks});
        }
      }
    }
    // Least fixpoint: an event may follow an agent that leaves in this tick.
    std::vector<int> doomed;
    std::vector<char> leaving(n, 0), settled(g.events.size(), 0);
    bool progress = false;
    for (bool changed = true; changed;) {
      changed = false;
      for (int e : zero) {
        if (settled[static_cast<std::size_t>(e)] || !check_delete(g, e, current, leaving)) continue;
        settled[static_cast<std::size_t>(e)] = 1;
        changed = true;
        auto& h = held[static_cast<std::size_t>(e)];
        if (h < 0) h = stall ? stall(g.events[static_cast<std::size_t>(e)]) : 0;
        if (h > 0) {
          --h;
          progress = true;
        } else {
          doomed.push_back(e);
          const auto& ev = g.events[static_cast<std::size_t>(e)];
          if (ev.index + 1 < static_cast<int>(g.routes[static_cast<std::size_t>(ev.agent)].size()))
            leaving[static_cast<std::size_t>(ev.agent)] = 1;
        }
      }
    }
    progress = progress || !doomed.empty();
    for (int e : zero) {
      auto& ev = g.events[static_cast<std::size_t>(e)];
      if (ev.D > 0 && std::find(doomed.begin(), doomed.end(), e) == doomed.end()) {
        --ev.D;
        progress = true;
      }
    }
    if (!progress) throw DeadlockError("no event can advance");
    for (int e : doomed) {
      alive[static_cast<std::size_t>(e)] = 0;
      --left;
      --remaining[static_cast<std::size_t>(g.events[static_cast<std::size_t>(e)].agent)];
      for (int id : g.out[static_cast<std::size_t>(e)]) --g.in_degree[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(id)].to)];
    }
    for (std::size_t a = 0; a < n; ++a)
      if (active[a]) out[a].locs.push_back(current[a]);
  }
  return out;
}

std::vector<Path> tpg_d_postprocess(Tpg g) { return tpg_replay(std::move(g)); }

std::vector<Path> tpg_d_postprocess(const Instance& inst, const std::vector<Path>& plan) {
  return tpg_d_postprocess(build_tpg(inst, plan));
}

namespace {

std::vector<std::pair<Vertex, Tick>> route_of(const Path& p) {
  std::vector<std::pair<Vertex, Tick>> r;
  for (std::size_t t = 0; t < p.locs.size(); ++t)
    if (t == 0 || p.locs[t] != p.locs[t - 1]) r.emplace_back(p.locs[t], static_cast<Tick>(t));
  return r;
}

// location -> (agent, route index) in order of entry.
std::map<Vertex, std::vector<std::pair<AgentId, int>>> entry_orders(const std::vector<Path>& plan) {
  std::map<Vertex, std::vector<std::tuple<Tick, AgentId, int>>> raw;
  for (std::size_t a = 0; a < plan.size(); ++a) {
    const auto r = route_of(plan[a]);
    for (std::size_t k = 0; k < r.size(); ++k)
      raw[r[k].first].emplace_back(r[k].second, static_cast<AgentId>(a), static_cast<int>(k));
  }
  std::map<Vertex, std::vector<std::pair<AgentId, int>>> out;
  for (auto& [v, entries] : raw) {
    std::sort(entries.begin(), entries.end());
    for (auto [t, a, k] : entries) out[v].emplace_back(a, k);
  }
  return out;
}

}  // namespace

bool same_visiting_order(const std::vector<Path>& a, const std::vector<Path>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto ra = route_of(a[i]), rb = route_of(b[i]);
    if (ra.size() != rb.size()) return false;
    for (std::size_t k = 0; k < ra.size(); ++k)
      if (ra[k].first != rb[k].first) return false;
  }
  return entry_orders(a) == entry_orders(b);
}

std::string tpg_to_dot(const Tpg& g) {
  std::ostringstream out;
  out << "digraph tpg {\n  rankdir=LR;\n";
  for (std::size_t e = 0; e < g.events.size(); ++e) {
    const auto& ev = g.events[e];
    out << "  e" << e << " [label=\"a" << ev.agent << " v" << ev.v << " t" << ev.tick << "\\nD=" << ev.D << "\"];\n";
  }
  for (const auto& edge : g.edges)
    out << "  e" << edge.from << " -> e" << edge.to << " [color=" << (edge.type == 1 ? "orange" : "red") << "];\n";
  out << "}\n";
  return out.str();
}

Solution solve_cbss_tpg(const Instance& inst, const SolverConfig& cfg, std::vector<Path>* pre_plan) {
  const auto t0 = std::chrono::steady_clock::now();
  Instance plain = inst;
  for (auto& [v, per_agent] : plain.duration)
    for (auto& [a, tau] : per_agent) tau = 0;
  Solution sol = solve_cbss_d(plain, cfg);
  sol.algorithm = "cbss-tpg";
  if (sol.status == SolveStatus::Solved) {
    if (pre_plan) *pre_plan = sol.paths;
    sol.paths = tpg_d_postprocess(inst, sol.paths);
    sol.cost = sum_of_costs(sol.paths);
  }
  sol.stats.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

}  // namespace mcpfd
