#include "mcpfd/cbss.hpp"

#include <chrono>
#include <queue>

namespace mcpfd {

namespace {

const TaskWindow* window_at(const Path& p, Vertex v, Tick t) {
  for (const auto& w : p.tasks)
    if (w.v == v && w.start <= t && t <= w.end) return &w;
  return nullptr;
}

Tick horizon(const std::vector<Path>& paths) {
  Tick h = 0;
  for (const auto& p : paths) h = std::max(h, p.cost());
  return h;
}

template <typename Visit>
void scan_conflicts(const std::vector<Path>& paths, Visit&& visit) {
  const int n = static_cast<int>(paths.size());
  const Tick h = horizon(paths);
  for (Tick t = 0; t <= h; ++t)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const auto& pi = paths[static_cast<std::size_t>(i)];
        const auto& pj = paths[static_cast<std::size_t>(j)];
        const Vertex vi = pi.at(t), vj = pj.at(t);
        if (vi == vj) {
          Conflict c;
          c.kind = Conflict::Kind::Vertex;
          c.i = i;
          c.j = j;
          c.v = vi;
          c.t = t;
          if (const auto* w = window_at(pi, vi, t)) c.i_executing = true, c.i_window = *w;
          if (const auto* w = window_at(pj, vj, t)) c.j_executing = true, c.j_window = *w;
          if (!visit(c)) return;
        }
        if (t < h && vi != pi.at(t + 1) && vi == pj.at(t + 1) && vj == pi.at(t + 1)) {
          Conflict c;
          c.kind = Conflict::Kind::Edge;
          c.i = i;
          c.j = j;
          c.v = vi;
          c.w = vj;
          c.t = t;
          if (!visit(c)) return;
        }
      }
}

}  // namespace

std::optional<Conflict> detect_conflict(const std::vector<Path>& paths) {
  std::optional<Conflict> found;
  scan_conflicts(paths, [&](const Conflict& c) {
    found = c;
    return false;
  });
  return found;
}

int count_conflicts(const std::vector<Path>& paths) {
  int count = 0;
  scan_conflicts(paths, [&](const Conflict&) {
    ++count;
    return true;
  });
  return count;
}

std::pair<std::vector<Constraint>, std::vector<Constraint>> generate_constraints(const Conflict& c, BranchingRule rule) {
  std::vector<Constraint> a, b;
  if (c.kind == Conflict::Kind::Edge) {
    a.push_back(Constraint::edge(c.i, c.v, c.w, c.t));
    b.push_back(Constraint::edge(c.j, c.v, c.w, c.t));
    return {a, b};
  }
  if (rule == BranchingRule::New && c.i_executing) {
    for (Tick t1 = c.i_window.start; t1 <= c.t; ++t1) a.push_back(Constraint::vertex(c.i, c.v, t1));
    for (Tick t2 = c.t; t2 <= c.i_window.end; ++t2) b.push_back(Constraint::vertex(c.j, c.v, t2));
  } else if (rule == BranchingRule::New && c.j_executing) {
    for (Tick t1 = c.t; t1 <= c.j_window.end; ++t1) a.push_back(Constraint::vertex(c.i, c.v, t1));
    for (Tick t2 = c.j_window.start; t2 <= c.t; ++t2) b.push_back(Constraint::vertex(c.j, c.v, t2));
  } else {
    a.push_back(Constraint::vertex(c.i, c.v, c.t));
    b.push_back(Constraint::vertex(c.j, c.v, c.t));
  }
  return {a, b};
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Solved: return "solved";
    case SolveStatus::Timeout: return "timeout";
    default: return "infeasible";
  }
}

long long sum_of_costs(const std::vector<Path>& paths) {
  long long total = 0;
  for (const auto& p : paths) total += p.cost();
  return total;
}

std::vector<int> sequence_durations(const Instance& inst, AgentId a, const std::vector<Vertex>& seq) {
  std::vector<int> d(seq.size(), 0);
  for (std::size_t j = 1; j < seq.size(); ++j) d[j] = inst.task_duration(a, seq[j]);
  return d;
}

namespace {

struct HighNode {
  std::vector<std::vector<Vertex>> seqs;
  std::vector<Constraint> constraints;
  std::vector<Path> paths;
  long long g = 0;
  int conflicts = 0;
  std::uint64_t id = 0;
};

struct NodeOrder {
  bool operator()(const HighNode& a, const HighNode& b) const {
    if (a.g != b.g) return a.g > b.g;
    if (a.conflicts != b.conflicts) return a.conflicts > b.conflicts;
    return a.id > b.id;
  }
};

}  // namespace

Solution solve_cbss_d(const Instance& inst, const SolverConfig& cfg, const BranchHook& hook) {
  const auto t0 = std::chrono::steady_clock::now();
  Solution sol;
  sol.algorithm = cfg.rule == BranchingRule::New ? "cbss-d" : "cbss-d-old";
  const Deadline deadline(cfg.time_limit);
  auto finish = [&](SolveStatus status) {
    sol.status = status;
    sol.stats.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return sol;
  };

  try {
    SequencingOptions sopts;
    sopts.backend = cfg.backend;
    sopts.external_command = cfg.external_command;
    sopts.deadline = deadline;
    TransformOptions topts;
    topts.simplify_anonymous = cfg.simplify_anonymous;
    KBestSequencer kbest(inst, sopts, topts);

    std::priority_queue<HighNode, std::vector<HighNode>, NodeOrder> open;
    std::uint64_t next_id = 0;
    auto make_root = [&](const JointSequence& js) {
      ++sol.stats.roots;
      HighNode node;
      node.seqs = js.seqs;
      for (std::size_t a = 0; a < js.seqs.size(); ++a) {
        const auto agent = static_cast<AgentId>(a);
        auto p = plan_agent_path(inst.graph, agent, js.seqs[a], sequence_durations(inst, agent, js.seqs[a]), {}, deadline);
        if (!p) return;
        node.paths.push_back(std::move(*p));
      }
      node.g = sum_of_costs(node.paths);
      node.conflicts = count_conflicts(node.paths);
      node.id = next_id++;
      open.push(std::move(node));
    };

    auto first = kbest.next();
    if (!first) {
      sol.stats.sequencing_calls = kbest.solver_calls();
      return finish(SolveStatus::Infeasible);
    }
    make_root(*first);

    while (true) {
      deadline.check();
      // Add roots for every sequence whose lower bound beats the best node.
      while (true) {
        const JointSequence* peek = kbest.peek();
        if (!peek) break;
        if (!open.empty() && static_cast<double>(open.top().g) <= (1.0 + cfg.eps) * static_cast<double>(peek->cost)) break;
        make_root(*kbest.next());
      }
      sol.stats.sequencing_calls = kbest.solver_calls();
      if (open.empty()) return finish(SolveStatus::Infeasible);

      HighNode node = open.top();
      open.pop();
      ++sol.stats.nodes;
      const auto conflict = detect_conflict(node.paths);
      if (!conflict) {
        sol.paths = std::move(node.paths);
        sol.cost = node.g;
        return finish(SolveStatus::Solved);
      }
      ++sol.stats.conflicts_resolved;
      auto [left, right] = generate_constraints(*conflict, cfg.rule);
      if (hook) hook(*conflict, left, right);
      for (auto* branch : {&left, &right}) {
        const AgentId agent = branch->front().agent;
        HighNode child;
        child.seqs = node.seqs;
        child.constraints = node.constraints;
        child.constraints.insert(child.constraints.end(), branch->begin(), branch->end());
        const auto& seq = node.seqs[static_cast<std::size_t>(agent)];
        auto p = plan_agent_path(inst.graph, agent, seq, sequence_durations(inst, agent, seq), child.constraints, deadline);
        if (!p) continue;
        child.paths = node.paths;
        child.paths[static_cast<std::size_t>(agent)] = std::move(*p);
        child.g = sum_of_costs(child.paths);
        child.conflicts = count_conflicts(child.paths);
        child.id = next_id++;
        open.push(std::move(child));
      }
    }
  } catch (const TimeoutError&) {
    return finish(SolveStatus::Timeout);
  }
}

}  // namespace mcpfd
