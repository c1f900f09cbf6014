#include "mcpfd/sequencing.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "mcpfd/tsplib.hpp"

namespace mcpfd {

int TargetGraph::index_of(Vertex v) const {
  auto it = std::find(keys.begin(), keys.end(), v);
  if (it == keys.end()) throw SequencingError("vertex " + std::to_string(v) + " is not a key vertex");
  return static_cast<int>(it - keys.begin());
}

TargetGraph compute_target_graph(const Instance& inst) {
  TargetGraph tg;
  tg.num_agents = inst.num_agents();
  tg.keys = inst.starts;
  tg.keys.insert(tg.keys.end(), inst.targets.begin(), inst.targets.end());
  tg.keys.insert(tg.keys.end(), inst.goals.begin(), inst.goals.end());
  const std::size_t k = tg.keys.size();
  tg.cost.assign(k * k, kNoArc);
  for (std::size_t a = 0; a < k; ++a) {
    const auto dist = inst.graph.distances_from(tg.keys[a]);
    for (std::size_t b = 0; b < k; ++b) {
      const int d = dist[static_cast<std::size_t>(tg.keys[b])];
      if (d >= 0) tg.cost[a * k + b] = d;
    }
  }
  for (int i = 0; i < inst.num_agents(); ++i)
    for (Vertex v : inst.task_vertices())
      if (inst.is_eligible(i, v) && tg.between(inst.starts[static_cast<std::size_t>(i)], v) >= kNoArc)
        throw InstanceError("no path between start " + std::to_string(inst.starts[static_cast<std::size_t>(i)]) +
                            " and vertex " + std::to_string(v));
  return tg;
}

Cost joint_sequence_cost(const Instance& inst, const TargetGraph& tg, const std::vector<std::vector<Vertex>>& seqs) {
  Cost total = 0;
  for (std::size_t a = 0; a < seqs.size(); ++a) {
    const auto& s = seqs[a];
    for (std::size_t j = 1; j < s.size(); ++j) {
      total += tg.between(s[j - 1], s[j]);
      total += inst.task_duration(static_cast<AgentId>(a), s[j]);
    }
  }
  return total;
}

int TransformedGraph::cycle_next(int node) const {
  const auto& c = clusters[static_cast<std::size_t>(nodes[static_cast<std::size_t>(node)].task)];
  const int p = cluster_pos[static_cast<std::size_t>(node)];
  return c[static_cast<std::size_t>((p + 1) % static_cast<int>(c.size()))];
}

int TransformedGraph::cycle_prev(int node) const {
  const auto& c = clusters[static_cast<std::size_t>(nodes[static_cast<std::size_t>(node)].task)];
  const int sz = static_cast<int>(c.size());
  const int p = cluster_pos[static_cast<std::size_t>(node)];
  return c[static_cast<std::size_t>((p + sz - 1) % sz)];
}

AgentId TransformedGraph::exit_owner(int node) const {
  const auto& nd = nodes[static_cast<std::size_t>(node)];
  if (nd.is_start) return nd.agent;
  return nodes[static_cast<std::size_t>(cycle_next(node))].agent;
}

int TransformedGraph::copy_of(int task, AgentId a) const {
  for (int node : clusters[static_cast<std::size_t>(task)])
    if (nodes[static_cast<std::size_t>(node)].agent == a) return node;
  return -1;
}

namespace {

bool anonymous_instance(const Instance& inst) {
  const int n = inst.num_agents();
  for (Vertex v : inst.task_vertices()) {
    auto it = inst.eligibility.find(v);
    if (it == inst.eligibility.end() || static_cast<int>(it->second.size()) != n) return false;
    const int tau = inst.task_duration(0, v);
    for (AgentId a = 1; a < n; ++a)
      if (inst.task_duration(a, v) != tau) return false;
  }
  return true;
}

}  // namespace

TransformedGraph transform(const Instance& inst, const TargetGraph& tg, const TransformOptions& opts) {
  TransformedGraph g;
  const int n_agents = inst.num_agents();
  g.num_agents = n_agents;
  g.starts = inst.starts;
  g.metric = tg;
  g.simplified = opts.simplify_anonymous && anonymous_instance(inst);

  const auto task_vertices = inst.task_vertices();
  for (Vertex v : task_vertices) {
    auto it = inst.eligibility.find(v);
    if (it == inst.eligibility.end() || it->second.empty())
      throw InstanceError("vertex " + std::to_string(v) + " has no eligible agent");
    g.tasks.push_back({v, inst.is_goal(v), it->second});
  }

  for (AgentId a = 0; a < n_agents; ++a) g.nodes.push_back({true, -1, a});
  g.clusters.resize(g.tasks.size());
  g.task_duration.assign(g.tasks.size(), std::vector<Cost>(static_cast<std::size_t>(n_agents), kNoArc));
  for (std::size_t t = 0; t < g.tasks.size(); ++t) {
    for (AgentId a : g.tasks[t].agents) g.task_duration[t][static_cast<std::size_t>(a)] = inst.task_duration(a, g.tasks[t].vertex);
    if (g.simplified) {
      g.clusters[t].push_back(g.size());
      g.nodes.push_back({false, static_cast<int>(t), -1});
    } else {
      for (AgentId a : g.tasks[t].agents) {
        g.clusters[t].push_back(g.size());
        g.nodes.push_back({false, static_cast<int>(t), a});
      }
    }
  }
  g.cluster_pos.assign(g.nodes.size(), -1);
  for (const auto& c : g.clusters)
    for (std::size_t p = 0; p < c.size(); ++p) g.cluster_pos[static_cast<std::size_t>(c[p])] = static_cast<int>(p);

  // big_m strictly dominates the metric-plus-duration mass of any proper tour.
  Cost mass = 1;
  for (Cost c : tg.cost)
    if (c < kNoArc) mass += c;
  for (const auto& row : g.task_duration)
    for (Cost d : row)
      if (d < kNoArc) mass += d;
  g.big_m = mass;
  const Cost big_arcs = static_cast<Cost>(inst.num_targets()) + 2 * n_agents;
  if (mass > (Cost{1} << 40) || big_arcs > (Cost{1} << 16))
    throw SequencingError("big-M constant would overflow the arc cost range");
  g.offset = big_arcs * g.big_m;

  const std::size_t n = g.nodes.size();
  g.arc.assign(n * n, kNoArc);
  auto set_arc = [&](int u, int v, Cost c) { g.arc[static_cast<std::size_t>(u) * n + static_cast<std::size_t>(v)] = c; };
  auto metric = [&](Vertex u, Vertex v) { return tg.between(u, v); };

  if (g.simplified) {
    for (AgentId i = 0; i < n_agents; ++i)
      for (std::size_t t = 0; t < g.tasks.size(); ++t) {
        const Cost c = metric(g.starts[static_cast<std::size_t>(i)], g.tasks[t].vertex);
        if (c < kNoArc) set_arc(i, g.clusters[t][0], g.big_m + c + g.task_duration[t][0]);
      }
    for (std::size_t t = 0; t < g.tasks.size(); ++t) {
      const int x = g.clusters[t][0];
      if (g.tasks[t].is_goal) {
        for (AgentId j = 0; j < n_agents; ++j) set_arc(x, j, g.big_m);
        continue;
      }
      for (std::size_t w = 0; w < g.tasks.size(); ++w) {
        if (w == t) continue;
        const Cost c = metric(g.tasks[t].vertex, g.tasks[w].vertex);
        if (c < kNoArc) set_arc(x, g.clusters[w][0], g.big_m + c + g.task_duration[w][0]);
      }
    }
    return g;
  }

  for (AgentId i = 0; i < n_agents; ++i)
    for (std::size_t t = 0; t < g.tasks.size(); ++t) {
      const int y = g.copy_of(static_cast<int>(t), i);
      if (y < 0) continue;
      const Cost c = metric(g.starts[static_cast<std::size_t>(i)], g.tasks[t].vertex);
      if (c < kNoArc) set_arc(i, y, g.big_m + c + g.task_duration[t][static_cast<std::size_t>(i)]);
    }
  for (std::size_t t = 0; t < g.tasks.size(); ++t) {
    for (int x : g.clusters[t]) {
      if (g.clusters[t].size() > 1) set_arc(x, g.cycle_next(x), 0);
      const AgentId k = g.exit_owner(x);
      if (g.tasks[t].is_goal) {
        set_arc(x, (k + 1) % n_agents, g.big_m);
        continue;
      }
      for (std::size_t w = 0; w < g.tasks.size(); ++w) {
        if (w == t) continue;
        const int y = g.copy_of(static_cast<int>(w), k);
        if (y < 0) continue;
        const Cost c = metric(g.tasks[t].vertex, g.tasks[w].vertex);
        if (c < kNoArc) set_arc(x, y, g.big_m + c + g.task_duration[w][static_cast<std::size_t>(k)]);
      }
    }
  }
  return g;
}

std::vector<Arc> tour_arcs(const Tour& tour) {
  std::vector<Arc> arcs;
  const std::size_t n = tour.nodes.size();
  for (std::size_t i = 0; i < n; ++i) arcs.emplace_back(tour.nodes[i], tour.nodes[(i + 1) % n]);
  return arcs;
}

namespace {

class BranchAndBound {
 public:
  BranchAndBound(const AtspProblem& p, const ArcConstraints& cons, const Deadline& deadline)
      : p_(p), deadline_(deadline), n_(p.n), cost_(p.cost) {
    const auto un = static_cast<std::size_t>(n_);
    succ_.assign(un, -1);
    pred_.assign(un, -1);
    cluster_of_.assign(un, -1);
    for (std::size_t c = 0; c < p.clusters.size(); ++c)
      for (int v : p.clusters[c]) cluster_of_[static_cast<std::size_t>(v)] = static_cast<int>(c);
    cluster_left_.resize(p.clusters.size());
    for (std::size_t c = 0; c < p.clusters.size(); ++c) cluster_left_[c] = static_cast<int>(p.clusters[c].size());

    for (auto [u, v] : cons.exclude) at(u, v) = kNoArc;
    for (auto [u, v] : cons.include) {
      if (u == v || at(u, v) >= kNoArc) feasible_ = false;
      else if (succ_[static_cast<std::size_t>(u)] >= 0 && succ_[static_cast<std::size_t>(u)] != v) feasible_ = false;
      else if (pred_[static_cast<std::size_t>(v)] >= 0 && pred_[static_cast<std::size_t>(v)] != u) feasible_ = false;
      else {
        succ_[static_cast<std::size_t>(u)] = v;
        pred_[static_cast<std::size_t>(v)] = u;
      }
    }
    // Forced chains must not close early.
    for (int s = 0; s < n_ && feasible_; ++s) {
      int v = s, steps = 0;
      while (succ_[static_cast<std::size_t>(v)] >= 0 && steps <= n_) {
        v = succ_[static_cast<std::size_t>(v)];
        ++steps;
        if (v == s && steps < n_) feasible_ = false;
      }
    }
    min_out_.assign(un, kNoArc);
    for (int u = 0; u < n_; ++u) {
      if (succ_[static_cast<std::size_t>(u)] >= 0) {
        min_out_[static_cast<std::size_t>(u)] = at(u, succ_[static_cast<std::size_t>(u)]);
        continue;
      }
      for (int v = 0; v < n_; ++v) {
        if (v == u) continue;
        const int pv = pred_[static_cast<std::size_t>(v)];
        if (pv >= 0 && pv != u) continue;
        min_out_[static_cast<std::size_t>(u)] = std::min(min_out_[static_cast<std::size_t>(u)], at(u, v));
      }
      if (min_out_[static_cast<std::size_t>(u)] >= kNoArc) feasible_ = false;
    }
  }

  std::optional<Tour> run() {
    if (!feasible_ || n_ == 0) return std::nullopt;
    if (n_ == 1) return Tour{{0}, 0};
    best_ = p_.cutoff;
    visited_.assign(static_cast<std::size_t>(n_), 0);
    path_.assign(1, 0);
    visited_[0] = 1;
    enter(0);
    Cost rest = 0;
    for (Cost c : min_out_) rest += c;
    dfs(0, 0, rest);
    if (best_path_.empty()) return std::nullopt;
    return Tour{best_path_, best_};
  }

 private:
  Cost& at(int u, int v) { return cost_[static_cast<std::size_t>(u) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v)]; }

  void enter(int v) {
    const int c = cluster_of_[static_cast<std::size_t>(v)];
    if (c >= 0) --cluster_left_[static_cast<std::size_t>(c)];
  }
  void leave(int v) {
    const int c = cluster_of_[static_cast<std::size_t>(v)];
    if (c >= 0) ++cluster_left_[static_cast<std::size_t>(c)];
  }

  // rest = sum of min_out over nodes whose out-arc is still open (incl. u).
  void dfs(int u, Cost cost, Cost rest) {
    if ((++expansions_ & 1023) == 0) deadline_.check();
    if (static_cast<int>(path_.size()) == n_) {
      const int p0 = pred_[0];
      if (p0 >= 0 && p0 != u) return;
      const Cost c = at(u, 0);
      if (c >= kNoArc) return;
      if (cost + c < best_) {
        best_ = cost + c;
        best_path_ = path_;
      }
      return;
    }
    const int cu = cluster_of_[static_cast<std::size_t>(u)];
    const bool stay_in_cluster = cu >= 0 && cluster_left_[static_cast<std::size_t>(cu)] > 0;
    const Cost rest_after = rest - min_out_[static_cast<std::size_t>(u)];
    auto try_move = [&](int v) {
      if (visited_[static_cast<std::size_t>(v)]) return;
      const int pv = pred_[static_cast<std::size_t>(v)];
      if (pv >= 0 && pv != u) return;
      if (stay_in_cluster && cluster_of_[static_cast<std::size_t>(v)] != cu) return;
      const Cost c = at(u, v);
      if (c >= kNoArc) return;
      if (cost + c + rest_after >= best_) return;
      visited_[static_cast<std::size_t>(v)] = 1;
      path_.push_back(v);
      enter(v);
      dfs(v, cost + c, rest_after);
      leave(v);
      path_.pop_back();
      visited_[static_cast<std::size_t>(v)] = 0;
    };
    const int forced = succ_[static_cast<std::size_t>(u)];
    if (forced >= 0) {
      if (forced != 0) try_move(forced);
      return;
    }
    for (int v = 1; v < n_; ++v) try_move(v);
  }

  const AtspProblem& p_;
  const Deadline& deadline_;
  int n_;
  std::vector<Cost> cost_;
  std::vector<int> succ_, pred_, cluster_of_, cluster_left_;
  std::vector<Cost> min_out_;
  std::vector<char> visited_;
  std::vector<int> path_, best_path_;
  Cost best_ = kNoArc;
  bool feasible_ = true;
  std::uint64_t expansions_ = 0;
};

}  // namespace

std::optional<Tour> solve_atsp_branch_and_bound(const AtspProblem& problem, const ArcConstraints& constraints,
                                                const Deadline& deadline) {
  return BranchAndBound(problem, constraints, deadline).run();
}

std::optional<Tour> solve_sequencing(const TransformedGraph& tfg, const ArcConstraints& constraints,
                                     const SequencingOptions& opts) {
  auto backend = opts.backend;
  if (backend == SequencingBackend::Auto)
    backend = (tfg.simplified || tfg.size() <= opts.auto_bnb_max_nodes) ? SequencingBackend::BranchAndBound
                                                                        : SequencingBackend::AssignmentDp;
  switch (backend) {
    case SequencingBackend::AssignmentDp:
      if (tfg.simplified) throw SequencingError("assignment DP needs the general transformation");
      return solve_assignment_dp(tfg, constraints, opts.deadline);
    case SequencingBackend::External:
      return solve_external(tfg, constraints, opts.external_command, opts.deadline);
    default: {
      AtspProblem p{tfg.size(), tfg.arc, tfg.clusters, tfg.proper_cutoff()};
      return solve_atsp_branch_and_bound(p, constraints, opts.deadline);
    }
  }
}

JointSequence untransform(const Tour& tour, const TransformedGraph& tfg) {
  const int n = tfg.size();
  const int n_agents = tfg.num_agents;
  if (static_cast<int>(tour.nodes.size()) != n || tour.nodes.empty() || tour.nodes[0] != 0)
    throw SequencingError("tour must list every node once, starting at node 0");
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int v : tour.nodes) {
    if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]) throw SequencingError("tour is not a permutation");
    seen[static_cast<std::size_t>(v)] = 1;
  }

  JointSequence js;
  js.seqs.assign(static_cast<std::size_t>(n_agents), {});
  std::vector<char> cluster_done(tfg.clusters.size(), 0);
  AgentId current = -1;
  AgentId expected_start = 0;
  bool open = false;
  Cost cost = 0;
  int i = 0;
  while (i < n) {
    const int node = tour.nodes[static_cast<std::size_t>(i)];
    const auto& nd = tfg.nodes[static_cast<std::size_t>(node)];
    if (nd.is_start) {
      if (open) throw SequencingError("segment of agent " + std::to_string(current) + " has no goal");
      if (!tfg.simplified && nd.agent != expected_start)
        throw SequencingError("start order broken at agent " + std::to_string(nd.agent));
      current = nd.agent;
      open = true;
      js.seqs[static_cast<std::size_t>(current)] = {tfg.starts[static_cast<std::size_t>(current)]};
      ++i;
      continue;
    }
    if (!open) throw SequencingError("task copy outside of any agent segment");
    const int t = nd.task;
    if (cluster_done[static_cast<std::size_t>(t)]) throw SequencingError("cluster visited twice");
    cluster_done[static_cast<std::size_t>(t)] = 1;
    const auto& cluster = tfg.clusters[static_cast<std::size_t>(t)];
    int walk = node;
    for (std::size_t k = 0; k < cluster.size(); ++k) {
      if (i + static_cast<int>(k) >= n || tour.nodes[static_cast<std::size_t>(i) + k] != walk)
        throw SequencingError("cluster of vertex " + std::to_string(tfg.tasks[static_cast<std::size_t>(t)].vertex) +
                              " not traversed contiguously");
      walk = tfg.cycle_next(walk);
    }
    if (!tfg.simplified && nd.agent != current)
      throw SequencingError("copy owner differs from segment agent");
    const auto dur = tfg.task_duration[static_cast<std::size_t>(t)][static_cast<std::size_t>(current)];
    if (dur >= kNoArc) throw SequencingError("agent not eligible for visited task");
    auto& seq = js.seqs[static_cast<std::size_t>(current)];
    cost += tfg.metric.between(seq.back(), tfg.tasks[static_cast<std::size_t>(t)].vertex) + dur;
    seq.push_back(tfg.tasks[static_cast<std::size_t>(t)].vertex);
    i += static_cast<int>(cluster.size());
    if (tfg.tasks[static_cast<std::size_t>(t)].is_goal) {
      open = false;
      expected_start = (current + 1) % n_agents;
    }
  }
  if (open) throw SequencingError("last segment has no goal");
  if (!tfg.simplified && expected_start != 0) throw SequencingError("tour does not close at agent 0's start");
  js.cost = cost;
  if (tour.cost != tfg.offset + cost)
    throw SequencingError("tour cost " + std::to_string(tour.cost) + " does not match offset + sequence cost " +
                          std::to_string(tfg.offset + cost));
  return js;
}

KBestSequencer::KBestSequencer(const Instance& inst, SequencingOptions opts, TransformOptions topts)
    : tg_(compute_target_graph(inst)), tfg_(transform(inst, tg_, topts)), opts_(std::move(opts)) {
  push_solved({});
}

void KBestSequencer::push_solved(ArcConstraints c) {
  ++solver_calls_;
  auto tour = solve_sequencing(tfg_, c, opts_);
  if (tour) pool_.push(Entry{std::move(c), std::move(*tour), next_id_++});
}

bool KBestSequencer::advance() {
  while (!pool_.empty()) {
    Entry e = pool_.top();
    pool_.pop();
    std::set<Arc> forced(e.constraints.include.begin(), e.constraints.include.end());
    std::vector<Arc> free;
    for (const Arc& a : tour_arcs(e.tour))
      if (!forced.count(a)) free.push_back(a);
    ArcConstraints child = e.constraints;
    for (const Arc& a : free) {
      ArcConstraints c = child;
      c.exclude.push_back(a);
      push_solved(std::move(c));
      child.include.push_back(a);
    }
    JointSequence js = untransform(e.tour, tfg_);
    if (tfg_.simplified && !seen_.insert(js.seqs).second) continue;
    lookahead_ = std::move(js);
    return true;
  }
  return false;
}

const JointSequence* KBestSequencer::peek() {
  if (!lookahead_ && !advance()) return nullptr;
  return &*lookahead_;
}

std::optional<JointSequence> KBestSequencer::next() {
  if (!peek()) return std::nullopt;
  std::optional<JointSequence> out = std::move(lookahead_);
  lookahead_.reset();
  ++emitted_;
  return out;
}

}  // namespace mcpfd
