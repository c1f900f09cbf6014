#include "mcpfd/low_level.hpp"

#include <queue>
#include <stdexcept>
#include <unordered_map>

namespace mcpfd {

SafeIntervalTable::SafeIntervalTable(AgentId agent, const std::vector<Constraint>& constraints) {
  std::map<Vertex, std::set<Tick>> blocked;
  for (const auto& c : constraints) {
    if (c.agent != agent) continue;
    if (c.kind == Constraint::Kind::Vertex) blocked[c.v].insert(c.t);
    else edges_.emplace(c.v, c.w, c.t);
  }
  for (const auto& [v, ticks] : blocked) {
    auto& out = intervals_[v];
    Tick lo = 0;
    for (Tick t : ticks) {
      if (t >= lo) {
        if (t > lo) out.emplace_back(lo, t - 1);
        lo = t + 1;
      }
    }
    out.emplace_back(lo, kForever);
  }
}

const std::vector<std::pair<Tick, Tick>>& SafeIntervalTable::intervals(Vertex v) const {
  static const std::vector<std::pair<Tick, Tick>> whole{{0, kForever}};
  auto it = intervals_.find(v);
  return it == intervals_.end() ? whole : it->second;
}

bool SafeIntervalTable::edge_blocked(Vertex u, Vertex w, Tick t) const {
  return !edges_.empty() && edges_.count({std::min(u, w), std::max(u, w), t}) > 0;
}

namespace {

struct Node {
  Vertex v;
  int interval;
  int progress;  // sequence[progress] is the last finished item
  Tick g;
  int parent;
  bool executed;  // reached from the parent by working on v
};

struct Open {
  Tick f;
  Tick g;
  int id;
  bool operator>(const Open& o) const {
    if (f != o.f) return f > o.f;
    if (g != o.g) return g < o.g;
    return id > o.id;
  }
};

}  // namespace

std::optional<Path> plan_agent_path(const Graph& graph, AgentId agent, const std::vector<Vertex>& sequence,
                                    const std::vector<int>& durations, const std::vector<Constraint>& constraints,
                                    const Deadline& deadline) {
  if (sequence.size() < 2 || durations.size() != sequence.size())
    throw std::invalid_argument("sequence needs a start and a goal, with one duration per entry");
  const int last = static_cast<int>(sequence.size()) - 1;
  const SafeIntervalTable sit(agent, constraints);

  std::vector<std::vector<int>> dist(sequence.size());
  for (int j = 1; j <= last; ++j) dist[static_cast<std::size_t>(j)] = graph.distances_from(sequence[static_cast<std::size_t>(j)]);
  // rest[j]: lower bound on the time from finishing item j - 1 at its vertex
  // to finishing the goal, excluding the leg to item j.
  std::vector<Tick> rest(sequence.size() + 1, 0);
  for (int j = last; j >= 1; --j) {
    Tick leg = 0;
    if (j < last) {
      const int d = dist[static_cast<std::size_t>(j) + 1][static_cast<std::size_t>(sequence[static_cast<std::size_t>(j)])];
      if (d < 0) return std::nullopt;
      leg = d;
    }
    rest[static_cast<std::size_t>(j)] = durations[static_cast<std::size_t>(j)] + leg + rest[static_cast<std::size_t>(j) + 1];
  }
  auto heuristic = [&](Vertex v, int progress) -> Tick {
    if (progress == last) return 0;
    const int d = dist[static_cast<std::size_t>(progress) + 1][static_cast<std::size_t>(v)];
    return d < 0 ? -1 : d + rest[static_cast<std::size_t>(progress) + 1];
  };

  std::vector<Node> nodes;
  std::priority_queue<Open, std::vector<Open>, std::greater<>> open;
  std::unordered_map<std::uint64_t, Tick> best;
  auto key_of = [](Vertex v, int interval, int progress) {
    return (static_cast<std::uint64_t>(v) << 40) | (static_cast<std::uint64_t>(interval) << 16) |
           static_cast<std::uint64_t>(progress);
  };
  auto push = [&](Vertex v, int interval, int progress, Tick g, int parent, bool executed) {
    const Tick h = heuristic(v, progress);
    if (h < 0) return;
    const auto key = key_of(v, interval, progress);
    auto it = best.find(key);
    if (it != best.end() && it->second <= g) return;
    best[key] = g;
    nodes.push_back({v, interval, progress, g, parent, executed});
    const int id = static_cast<int>(nodes.size()) - 1;
    open.push({g + h, g, id});
  };

  const Vertex start = sequence[0];
  const auto& start_iv = sit.intervals(start);
  if (start_iv.empty() || start_iv[0].first != 0) return std::nullopt;
  push(start, 0, 0, 0, -1, false);

  std::uint64_t expansions = 0;
  int goal_node = -1;
  while (!open.empty()) {
    if ((++expansions & 1023) == 0) deadline.check();
    const Open top = open.top();
    open.pop();
    const Node cur = nodes[static_cast<std::size_t>(top.id)];
    if (best[key_of(cur.v, cur.interval, cur.progress)] < cur.g) continue;
    if (cur.progress == last) {
      goal_node = top.id;
      break;
    }
    const auto [lo, hi] = sit.intervals(cur.v)[static_cast<std::size_t>(cur.interval)];
    (void)lo;

    const int next_item = cur.progress + 1;
    if (cur.v == sequence[static_cast<std::size_t>(next_item)]) {
      const Tick tau = durations[static_cast<std::size_t>(next_item)];
      const bool fits = next_item == last ? hi == kForever : cur.g + tau <= hi;
      if (fits) push(cur.v, cur.interval, next_item, cur.g + tau, top.id, true);
    }

    for (Vertex u : graph.neighbors(cur.v)) {
      const auto& ivs = sit.intervals(u);
      for (std::size_t k = 0; k < ivs.size(); ++k) {
        const auto [c, d] = ivs[k];
        if (c > hi + 1) break;
        if (d < cur.g + 1) continue;
        Tick arrive = std::max(cur.g + 1, c);
        while (arrive <= d && arrive - 1 <= hi && sit.edge_blocked(cur.v, u, arrive - 1)) ++arrive;
        if (arrive <= d && arrive - 1 <= hi) push(u, static_cast<int>(k), cur.progress, arrive, top.id, false);
      }
    }
  }
  if (goal_node < 0) return std::nullopt;

  std::vector<int> chain;
  for (int id = goal_node; id >= 0; id = nodes[static_cast<std::size_t>(id)].parent) chain.push_back(id);
  std::reverse(chain.begin(), chain.end());
  Path path;
  path.locs.push_back(start);
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const Node& p = nodes[static_cast<std::size_t>(chain[i - 1])];
    const Node& c = nodes[static_cast<std::size_t>(chain[i])];
    if (c.executed) {
      for (Tick t = p.g + 1; t <= c.g; ++t) path.locs.push_back(c.v);
      path.tasks.push_back({c.v, p.g, c.g});
    } else {
      for (Tick t = p.g + 1; t < c.g; ++t) path.locs.push_back(p.v);
      path.locs.push_back(c.v);
    }
  }
  return path;
}

}  // namespace mcpfd
