#include <algorithm>
#include <map>

#include "mcpfd/sequencing.hpp"

namespace mcpfd {

namespace {

constexpr Cost kInf = kNoArc;

// Constraints on the joint sequence, derived from arc constraints on the
// transformed graph.
struct SequenceRules {
  std::vector<std::uint32_t> owners;  // [task] allowed agents
  std::vector<int> first_forced;      // [agent] task or -1
  std::vector<char> first_forbid;     // [agent * T + task]
  std::vector<int> succ_forced;       // [task] successor task or -1
  std::vector<char> succ_forbid;      // [(task * N + agent) * T + task]
  bool feasible = true;
};

SequenceRules map_constraints(const TransformedGraph& g, const ArcConstraints& cons) {
  const int n = g.num_agents;
  const int t_count = static_cast<int>(g.tasks.size());
  SequenceRules r;
  r.owners.assign(static_cast<std::size_t>(t_count), 0);
  for (int t = 0; t < t_count; ++t)
    for (AgentId a : g.tasks[static_cast<std::size_t>(t)].agents) r.owners[static_cast<std::size_t>(t)] |= 1u << a;
  r.first_forced.assign(static_cast<std::size_t>(n), -1);
  r.first_forbid.assign(static_cast<std::size_t>(n * t_count), 0);
  r.succ_forced.assign(static_cast<std::size_t>(t_count), -1);
  r.succ_forbid.assign(static_cast<std::size_t>(t_count * n * t_count), 0);

  auto apply = [&](const Arc& arc, bool include) {
    const auto [u, v] = arc;
    if (u < 0 || v < 0 || u >= g.size() || v >= g.size() || g.cost(u, v) >= kNoArc) {
      if (include) r.feasible = false;
      return;
    }
    const auto& nu = g.nodes[static_cast<std::size_t>(u)];
    const auto& nv = g.nodes[static_cast<std::size_t>(v)];
    if (nu.is_start) {
      const AgentId k = nu.agent;
      const int t = nv.task;
      if (include) {
        if (r.first_forced[static_cast<std::size_t>(k)] >= 0 && r.first_forced[static_cast<std::size_t>(k)] != t)
          r.feasible = false;
        r.first_forced[static_cast<std::size_t>(k)] = t;
        r.owners[static_cast<std::size_t>(t)] &= 1u << k;
      } else {
        r.first_forbid[static_cast<std::size_t>(k * t_count + t)] = 1;
      }
      return;
    }
    const int t = nu.task;
    if (!nv.is_start && nv.task == t) {
      // Cycle arc u -> v is used unless the cluster was entered at v.
      if (include) r.owners[static_cast<std::size_t>(t)] &= ~(1u << nv.agent);
      else r.owners[static_cast<std::size_t>(t)] &= 1u << nv.agent;
      return;
    }
    const AgentId k = g.exit_owner(u);
    if (nv.is_start) {
      if (include) r.owners[static_cast<std::size_t>(t)] &= 1u << k;
      else r.owners[static_cast<std::size_t>(t)] &= ~(1u << k);
      return;
    }
    const int w = nv.task;
    if (include) {
      if (r.succ_forced[static_cast<std::size_t>(t)] >= 0 && r.succ_forced[static_cast<std::size_t>(t)] != w)
        r.feasible = false;
      r.succ_forced[static_cast<std::size_t>(t)] = w;
      r.owners[static_cast<std::size_t>(t)] &= 1u << k;
      r.owners[static_cast<std::size_t>(w)] &= 1u << k;
    } else {
      r.succ_forbid[static_cast<std::size_t>((t * n + k) * t_count + w)] = 1;
    }
  };
  for (const Arc& a : cons.include) apply(a, true);
  for (const Arc& a : cons.exclude) apply(a, false);
  for (auto o : r.owners)
    if (o == 0) r.feasible = false;
  return r;
}

// Best orders for one agent over subsets of its admissible targets.
struct AgentTable {
  std::vector<int> local;   // local index -> task
  std::vector<int> goals;   // admissible goal tasks
  std::vector<Cost> best;   // [local mask * goals + goal] total cost
  std::vector<int> best_last;
  std::vector<Cost> h;      // [mask * e + last]
  std::vector<int> h_prev;
};

}  // namespace

std::optional<Tour> solve_assignment_dp(const TransformedGraph& g, const ArcConstraints& cons, const Deadline& deadline) {
  if (g.simplified) throw SequencingError("assignment DP needs the general transformation");
  const int n = g.num_agents;
  const int t_count = static_cast<int>(g.tasks.size());
  const int m = t_count - n;
  if (n > 31 || m + n > 63) throw SequencingError("instance too large for the assignment DP");

  const SequenceRules rules = map_constraints(g, cons);
  if (!rules.feasible) return std::nullopt;

  std::vector<Cost> leg(static_cast<std::size_t>(t_count * t_count), kInf);
  std::vector<Cost> from_start(static_cast<std::size_t>(n * t_count), kInf);
  for (int a = 0; a < t_count; ++a)
    for (int b = 0; b < t_count; ++b)
      leg[static_cast<std::size_t>(a * t_count + b)] =
          g.metric.between(g.tasks[static_cast<std::size_t>(a)].vertex, g.tasks[static_cast<std::size_t>(b)].vertex);
  for (int k = 0; k < n; ++k)
    for (int t = 0; t < t_count; ++t)
      from_start[static_cast<std::size_t>(k * t_count + t)] =
          g.metric.between(g.starts[static_cast<std::size_t>(k)], g.tasks[static_cast<std::size_t>(t)].vertex);

  auto dur = [&](int t, int k) { return g.task_duration[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)]; };
  auto allowed_first = [&](int k, int t) {
    const int f = rules.first_forced[static_cast<std::size_t>(k)];
    return (f < 0 || f == t) && !rules.first_forbid[static_cast<std::size_t>(k * t_count + t)];
  };
  auto allowed_succ = [&](int k, int t, int w) {
    const int f = rules.succ_forced[static_cast<std::size_t>(t)];
    return (f < 0 || f == w) && !rules.succ_forbid[static_cast<std::size_t>((t * n + k) * t_count + w)];
  };
  auto add = [](Cost a, Cost b) { return a >= kInf || b >= kInf ? kInf : a + b; };

  std::vector<AgentTable> tables(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    auto& tb = tables[static_cast<std::size_t>(k)];
    for (int t = 0; t < t_count; ++t) {
      if (!(rules.owners[static_cast<std::size_t>(t)] & (1u << k))) continue;
      (t < m ? tb.local : tb.goals).push_back(t);
    }
    const int e = static_cast<int>(tb.local.size());
    if (e > 20) throw SequencingError("too many eligible targets per agent for the assignment DP");
    const std::size_t masks = std::size_t{1} << e;
    tb.h.assign(masks * static_cast<std::size_t>(e), kInf);
    tb.h_prev.assign(masks * static_cast<std::size_t>(e), -1);
    for (int j = 0; j < e; ++j) {
      const int t = tb.local[static_cast<std::size_t>(j)];
      if (allowed_first(k, t))
        tb.h[(std::size_t{1} << j) * static_cast<std::size_t>(e) + static_cast<std::size_t>(j)] =
            add(from_start[static_cast<std::size_t>(k * t_count + t)], dur(t, k));
    }
    for (std::size_t mask = 1; mask < masks; ++mask) {
      if ((mask & 255) == 0) deadline.check();
      for (int j = 0; j < e; ++j) {
        const Cost base = tb.h[mask * static_cast<std::size_t>(e) + static_cast<std::size_t>(j)];
        if (base >= kInf) continue;
        const int t = tb.local[static_cast<std::size_t>(j)];
        for (int j2 = 0; j2 < e; ++j2) {
          if (mask & (std::size_t{1} << j2)) continue;
          const int w = tb.local[static_cast<std::size_t>(j2)];
          if (!allowed_succ(k, t, w)) continue;
          const Cost c = add(base, add(leg[static_cast<std::size_t>(t * t_count + w)], dur(w, k)));
          const std::size_t idx = (mask | (std::size_t{1} << j2)) * static_cast<std::size_t>(e) + static_cast<std::size_t>(j2);
          if (c < tb.h[idx]) {
            tb.h[idx] = c;
            tb.h_prev[idx] = j;
          }
        }
      }
    }
    const std::size_t ng = tb.goals.size();
    tb.best.assign(masks * ng, kInf);
    tb.best_last.assign(masks * ng, -1);
    for (std::size_t gi = 0; gi < ng; ++gi) {
      const int goal = tb.goals[gi];
      if (allowed_first(k, goal))
        tb.best[gi] = add(from_start[static_cast<std::size_t>(k * t_count + goal)], dur(goal, k));
      for (std::size_t mask = 1; mask < masks; ++mask)
        for (int j = 0; j < e; ++j) {
          const Cost base = tb.h[mask * static_cast<std::size_t>(e) + static_cast<std::size_t>(j)];
          const int t = tb.local[static_cast<std::size_t>(j)];
          if (base >= kInf || !allowed_succ(k, t, goal)) continue;
          const Cost c = add(base, add(leg[static_cast<std::size_t>(t * t_count + goal)], dur(goal, k)));
          if (c < tb.best[mask * ng + gi]) {
            tb.best[mask * ng + gi] = c;
            tb.best_last[mask * ng + gi] = j;
          }
        }
    }
  }

  // must_cover[k]: tasks whose admissible owners are all <= k.
  std::vector<std::uint64_t> must_cover(static_cast<std::size_t>(n), 0);
  for (int t = 0; t < t_count; ++t) {
    int last_owner = 31 - __builtin_clz(rules.owners[static_cast<std::size_t>(t)]);
    for (int k = last_owner; k < n; ++k) must_cover[static_cast<std::size_t>(k)] |= std::uint64_t{1} << t;
  }

  struct Rec {
    Cost cost;
    std::uint64_t parent;
    std::uint64_t local_mask;
    int goal_index;
  };
  std::vector<std::map<std::uint64_t, Rec>> layers(static_cast<std::size_t>(n) + 1);
  layers[0][0] = Rec{0, 0, 0, -1};
  std::uint64_t steps = 0;
  for (int k = 0; k < n; ++k) {
    const auto& tb = tables[static_cast<std::size_t>(k)];
    const int e = static_cast<int>(tb.local.size());
    const std::size_t ng = tb.goals.size();
    auto& next = layers[static_cast<std::size_t>(k) + 1];
    for (const auto& [key, rec] : layers[static_cast<std::size_t>(k)]) {
      std::uint64_t avail = 0;
      for (int j = 0; j < e; ++j)
        if (!(key & (std::uint64_t{1} << tb.local[static_cast<std::size_t>(j)]))) avail |= std::uint64_t{1} << j;
      for (std::uint64_t sub = avail;; sub = (sub - 1) & avail) {
        if ((++steps & 4095) == 0) deadline.check();
        std::uint64_t covered = key;
        for (int j = 0; j < e; ++j)
          if (sub & (std::uint64_t{1} << j)) covered |= std::uint64_t{1} << tb.local[static_cast<std::size_t>(j)];
        for (std::size_t gi = 0; gi < ng; ++gi) {
          const Cost c = tb.best[sub * ng + gi];
          const std::uint64_t gbit = std::uint64_t{1} << tb.goals[gi];
          if (c >= kInf || (covered & gbit)) continue;
          const std::uint64_t nkey = covered | gbit;
          if ((nkey & must_cover[static_cast<std::size_t>(k)]) != must_cover[static_cast<std::size_t>(k)]) continue;
          const Cost total = rec.cost + c;
          auto it = next.find(nkey);
          if (it == next.end() || total < it->second.cost) next[nkey] = Rec{total, key, sub, static_cast<int>(gi)};
        }
        if (sub == 0) break;
      }
    }
  }
  const std::uint64_t full = t_count == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << t_count) - 1;
  auto fin = layers[static_cast<std::size_t>(n)].find(full);
  if (fin == layers[static_cast<std::size_t>(n)].end()) return std::nullopt;

  std::vector<std::vector<int>> order(static_cast<std::size_t>(n));
  std::uint64_t key = full;
  for (int k = n - 1; k >= 0; --k) {
    const Rec& rec = layers[static_cast<std::size_t>(k) + 1].at(key);
    const auto& tb = tables[static_cast<std::size_t>(k)];
    const int e = static_cast<int>(tb.local.size());
    const std::size_t ng = tb.goals.size();
    std::vector<int> seq{tb.goals[static_cast<std::size_t>(rec.goal_index)]};
    std::uint64_t mask = rec.local_mask;
    int j = tb.best_last[mask * ng + static_cast<std::size_t>(rec.goal_index)];
    while (mask) {
      seq.push_back(tb.local[static_cast<std::size_t>(j)]);
      const int pj = tb.h_prev[mask * static_cast<std::size_t>(e) + static_cast<std::size_t>(j)];
      mask &= ~(std::uint64_t{1} << j);
      j = pj;
    }
    std::reverse(seq.begin(), seq.end());
    order[static_cast<std::size_t>(k)] = std::move(seq);
    key = rec.parent;
  }

  Tour tour;
  for (int k = 0; k < n; ++k) {
    tour.nodes.push_back(k);
    for (int t : order[static_cast<std::size_t>(k)]) {
      int node = g.copy_of(t, k);
      for (std::size_t s = 0; s < g.clusters[static_cast<std::size_t>(t)].size(); ++s) {
        tour.nodes.push_back(node);
        node = g.cycle_next(node);
      }
    }
  }
  const auto arcs = tour_arcs(tour);
  for (const Arc& a : arcs) tour.cost += g.cost(a.first, a.second);
  std::set<Arc> used(arcs.begin(), arcs.end());
  for (const Arc& a : cons.include)
    if (!used.count(a)) throw SequencingError("assignment DP dropped an included arc");
  for (const Arc& a : cons.exclude)
    if (used.count(a)) throw SequencingError("assignment DP used an excluded arc");
  if (tour.cost != g.offset + fin->second.cost) throw SequencingError("assignment DP cost mismatch");
  return tour;
}

}  // namespace mcpfd
