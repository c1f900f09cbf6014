#include "oracles/sequence_enum.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace oracle {

using mcpfd::Instance;
using mcpfd::Vertex;

std::vector<long long> all_sequence_costs(const Instance& inst) {
  const int n = inst.num_agents();
  std::map<Vertex, std::vector<int>> dist;
  for (Vertex v : inst.starts) dist[v] = inst.graph.distances_from(v);
  for (Vertex v : inst.task_vertices()) dist[v] = inst.graph.distances_from(v);
  auto leg = [&](Vertex a, Vertex b) -> long long {
    const int d = dist.at(a)[static_cast<std::size_t>(b)];
    if (d < 0) throw std::invalid_argument("sequence enumeration: unreachable task");
    return d;
  };

  std::vector<std::vector<Vertex>> seqs(static_cast<std::size_t>(n));
  std::vector<long long> out;

  // Goal matchings do not depend on the target orders, so list them once.
  std::vector<std::vector<Vertex>> matchings;
  std::vector<Vertex> current;
  std::vector<bool> used(inst.goals.size(), false);
  auto match = [&](auto&& self, int a) -> void {
    if (a == n) {
      matchings.push_back(current);
      return;
    }
    for (std::size_t g = 0; g < inst.goals.size(); ++g) {
      if (used[g] || !inst.is_eligible(a, inst.goals[g])) continue;
      used[g] = true;
      current.push_back(inst.goals[g]);
      self(self, a + 1);
      current.pop_back();
      used[g] = false;
    }
  };
  match(match, 0);

  auto finish = [&] {
    for (const auto& goals : matchings) {
      long long total = 0;
      for (int a = 0; a < n; ++a) {
        Vertex at = inst.starts[static_cast<std::size_t>(a)];
        for (Vertex v : seqs[static_cast<std::size_t>(a)]) {
          total += leg(at, v) + inst.task_duration(a, v);
          at = v;
        }
        const Vertex g = goals[static_cast<std::size_t>(a)];
        total += leg(at, g) + inst.task_duration(a, g);
      }
      out.push_back(total);
    }
  };
  auto place = [&](auto&& self, std::size_t k) -> void {
    if (k == inst.targets.size()) {
      finish();
      return;
    }
    const Vertex v = inst.targets[k];
    for (int a = 0; a < n; ++a) {
      if (!inst.is_eligible(a, v)) continue;
      auto& s = seqs[static_cast<std::size_t>(a)];
      for (std::size_t pos = 0; pos <= s.size(); ++pos) {
        s.insert(s.begin() + static_cast<std::ptrdiff_t>(pos), v);
        self(self, k + 1);
        s.erase(s.begin() + static_cast<std::ptrdiff_t>(pos));
      }
    }
  };
  place(place, 0);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace oracle
