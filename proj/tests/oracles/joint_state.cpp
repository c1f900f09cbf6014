#include "oracles/joint_state.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

namespace oracle {

using mcpfd::Instance;
using mcpfd::Vertex;

namespace {

enum Kind : int { Free = 0, WorkTarget = 1, WorkGoal = 2, Done = 3 };

struct AgentState {
  int pos = 0;
  int kind = Free;
  int r = 0;  // ticks of work left after the current one
};

struct State {
  std::vector<AgentState> agents;
  std::uint32_t claimed = 0;  // bit per target index
};

constexpr int kPosBits = 7;
constexpr int kRBits = 6;
constexpr int kAgentBits = kPosBits + 2 + kRBits;

// Claimed-target bits first, then one field per agent.
std::uint64_t pack(const State& s, int m) {
  std::uint64_t key = s.claimed;
  int shift = m;
  for (const auto& a : s.agents) {
    const std::uint64_t bits = static_cast<std::uint64_t>(a.pos) | static_cast<std::uint64_t>(a.kind) << kPosBits |
                               static_cast<std::uint64_t>(a.r) << (kPosBits + 2);
    key |= bits << shift;
    shift += kAgentBits;
  }
  return key;
}

State unpack(std::uint64_t key, int n, int m) {
  State s;
  s.claimed = static_cast<std::uint32_t>(key & ((1ULL << m) - 1));
  int shift = m;
  for (int a = 0; a < n; ++a) {
    const std::uint64_t bits = key >> shift;
    s.agents.push_back({static_cast<int>(bits & ((1u << kPosBits) - 1)), static_cast<int>((bits >> kPosBits) & 3),
                        static_cast<int>((bits >> (kPosBits + 2)) & ((1u << kRBits) - 1))});
    shift += kAgentBits;
  }
  return s;
}

class Search {
 public:
  explicit Search(const Instance& inst) : inst_(inst), n_(inst.num_agents()), m_(inst.num_targets()) {
    const int cells = inst.graph.num_vertices();
    if (cells > (1 << kPosBits) || m_ > 20 || m_ + n_ * kAgentBits > 64)
      throw std::invalid_argument("joint-state oracle: instance too large");
    for (Vertex v : inst.task_vertices()) {
      dist_[v] = inst.graph.distances_from(v);
      for (auto [a, tau] : inst.duration.at(v))
        if (tau >= (1 << kRBits)) throw std::invalid_argument("joint-state oracle: duration too large");
    }
    for (int k = 0; k < m_; ++k) {
      int best = 1 << 20;
      for (auto [a, tau] : inst.duration.at(inst.targets[static_cast<std::size_t>(k)])) best = std::min(best, tau);
      min_target_tau_.push_back(best);
    }
  }

  JointStateResult run(long long max_expansions) {
    State init;
    for (int a = 0; a < n_; ++a) init.agents.push_back({inst_.starts[static_cast<std::size_t>(a)], Free, 0});
    const std::uint64_t k0 = pack(init, m_);
    using Item = std::tuple<long long, long long, std::uint64_t>;  // f, -g, key
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    std::unordered_map<std::uint64_t, long long> g;
    g[k0] = 0;
    open.emplace(h(init), 0, k0);
    JointStateResult res;
    while (!open.empty()) {
      auto [f, neg_g, key] = open.top();
      open.pop();
      const long long gk = -neg_g;
      if (g[key] < gk) continue;
      const State s = unpack(key, n_, m_);
      if (terminal(s)) {
        res.cost = gk;
        return res;
      }
      if (++res.expansions > max_expansions) {
        res.exhausted = true;
        return res;
      }
      successors(s, [&](const State& nxt, int step_cost) {
        const long long ng = gk + step_cost;
        const std::uint64_t nk = pack(nxt, m_);
        auto it = g.find(nk);
        if (it != g.end() && it->second <= ng) return;
        g[nk] = ng;
        open.emplace(ng + h(nxt), -ng, nk);
      });
    }
    return res;
  }

 private:
  bool terminal(const State& s) const {
    if (s.claimed != (m_ == 0 ? 0u : (1u << m_) - 1)) return false;
    return std::all_of(s.agents.begin(), s.agents.end(), [](const AgentState& a) { return a.kind == Done; });
  }

  int target_index(Vertex v) const {
    for (int k = 0; k < m_; ++k)
      if (inst_.targets[static_cast<std::size_t>(k)] == v) return k;
    return -1;
  }

  bool goal_taken(const State& s, Vertex g, int self) const {
    for (int a = 0; a < n_; ++a)
      if (a != self && (s.agents[static_cast<std::size_t>(a)].kind == WorkGoal || s.agents[static_cast<std::size_t>(a)].kind == Done) &&
          s.agents[static_cast<std::size_t>(a)].pos == g)
        return true;
    return false;
  }

  long long h(const State& s) const {
    long long total = 0;
    for (int a = 0; a < n_; ++a) {
      const auto& st = s.agents[static_cast<std::size_t>(a)];
      if (st.kind == Done) continue;
      if (st.kind == WorkGoal) {
        total += st.r + 1;
        continue;
      }
      long long best = 1LL << 40;
      for (Vertex g : inst_.goals) {
        if (!inst_.is_eligible(a, g) || goal_taken(s, g, a)) continue;
        const int d = dist_.at(g)[static_cast<std::size_t>(st.pos)];
        if (d < 0) continue;
        best = std::min<long long>(best, d + inst_.task_duration(a, g));
      }
      total += best + (st.kind == WorkTarget ? st.r + 1 : 0);
    }
    for (int k = 0; k < m_; ++k)
      if (!(s.claimed >> k & 1u)) total += min_target_tau_[static_cast<std::size_t>(k)];
    return total;
  }

  // One option of one agent for the coming tick.
  struct Option {
    AgentState next;
    int claim = -1;   // target index claimed now
    bool pays = true;  // agent unfinished during this tick
  };

  std::vector<Option> options(const State& s, int a) const {
    const auto& st = s.agents[static_cast<std::size_t>(a)];
    std::vector<Option> out;
    if (st.kind == Done) {
      out.push_back({st, -1, false});
      return out;
    }
    if (st.kind == WorkTarget || st.kind == WorkGoal) {
      AgentState nx = st;
      if (st.r > 0) {
        --nx.r;
      } else {
        nx.kind = st.kind == WorkGoal ? Done : Free;
      }
      out.push_back({nx, -1, true});
      return out;
    }
    auto moves = [&](int claim) {
      out.push_back({{st.pos, Free, 0}, claim, true});
      for (Vertex w : inst_.graph.neighbors(st.pos)) out.push_back({{w, Free, 0}, claim, true});
    };
    moves(-1);
    const Vertex v = st.pos;
    const int k = target_index(v);
    if (k >= 0 && !(s.claimed >> k & 1u) && inst_.is_eligible(a, v)) {
      const int tau = inst_.task_duration(a, v);
      if (tau == 0) {
        moves(k);
      } else {
        out.push_back({{v, tau == 1 ? Free : WorkTarget, tau == 1 ? 0 : tau - 2}, k, true});
      }
    }
    if (inst_.is_goal(v) && inst_.is_eligible(a, v)) {
      const int tau = inst_.task_duration(a, v);
      if (tau == 0)
        out.push_back({{v, Done, 0}, -1, false});
      else
        out.push_back({{v, tau == 1 ? Done : WorkGoal, tau == 1 ? 0 : tau - 2}, -1, true});
    }
    return out;
  }

  template <class Emit>
  void successors(const State& s, Emit&& emit) {
    std::vector<std::vector<Option>> opts;
    for (int a = 0; a < n_; ++a) opts.push_back(options(s, a));
    State nxt = s;
    auto rec = [&](auto&& self, int a, int cost, std::uint32_t claimed) -> void {
      if (a == n_) {
        nxt.claimed = claimed;
        emit(nxt, cost);
        return;
      }
      for (const Option& o : opts[static_cast<std::size_t>(a)]) {
        const int from = s.agents[static_cast<std::size_t>(a)].pos;
        const int to = o.next.pos;
        bool ok = true;
        for (int b = 0; b < a && ok; ++b) {
          const int bf = s.agents[static_cast<std::size_t>(b)].pos;
          const int bt = nxt.agents[static_cast<std::size_t>(b)].pos;
          if (bt == to || (from != to && bf == to && bt == from)) ok = false;
        }
        if (!ok) continue;
        nxt.agents[static_cast<std::size_t>(a)] = o.next;
        self(self, a + 1, cost + (o.pays ? 1 : 0), o.claim >= 0 ? claimed | 1u << o.claim : claimed);
      }
    };
    rec(rec, 0, 0, s.claimed);
  }

  const Instance& inst_;
  int n_;
  int m_;
  std::map<Vertex, std::vector<int>> dist_;
  std::vector<int> min_target_tau_;
};

}  // namespace

JointStateResult joint_state_optimum(const Instance& inst, long long max_expansions) {
  return Search(inst).run(max_expansions);
}

}  // namespace oracle
