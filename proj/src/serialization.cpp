#include "mcpfd/serialization.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace mcpfd {

using nlohmann::json;

json instance_to_json(const Instance& inst) {
  const Grid& grid = inst.graph.grid();
  json j;
  j["width"] = grid.width;
  j["height"] = grid.height;
  auto& blocked = j["blocked"] = json::array();
  for (int v = 0; v < grid.width * grid.height; ++v)
    if (!grid.is_passable(v)) blocked.push_back(v);
  j["starts"] = inst.starts;
  j["goals"] = inst.goals;
  j["targets"] = inst.targets;
  auto& elig = j["eligibility"] = json::object();
  for (const auto& [v, agents] : inst.eligibility) elig[std::to_string(v)] = agents;
  auto& dur = j["duration"] = json::object();
  for (const auto& [v, per_agent] : inst.duration) {
    auto& row = dur[std::to_string(v)] = json::object();
    for (const auto& [a, tau] : per_agent) row[std::to_string(a)] = tau;
  }
  return j;
}

Instance instance_from_json(const json& j) {
  try {
    const int w = j.at("width").get<int>();
    const int h = j.at("height").get<int>();
    if (w <= 0 || h <= 0) throw InstanceError("grid dimensions must be positive");
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 1);
    for (int v : j.at("blocked").get<std::vector<int>>()) {
      if (v < 0 || v >= w * h) throw InstanceError("blocked cell " + std::to_string(v) + " out of range");
      cells[static_cast<std::size_t>(v)] = 0;
    }
    Instance inst;
    inst.graph = Graph(Grid(w, h, std::move(cells)));
    inst.starts = j.at("starts").get<std::vector<Vertex>>();
    inst.goals = j.at("goals").get<std::vector<Vertex>>();
    inst.targets = j.at("targets").get<std::vector<Vertex>>();
    for (const auto& [key, agents] : j.at("eligibility").items()) {
      auto list = agents.get<std::vector<AgentId>>();
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
      inst.eligibility[std::stoi(key)] = list;
    }
    for (const auto& [key, row] : j.at("duration").items())
      for (const auto& [agent, tau] : row.items()) inst.duration[std::stoi(key)][std::stoi(agent)] = tau.get<int>();
    return inst;
  } catch (const json::exception& e) {
    throw InstanceError(std::string("malformed instance JSON: ") + e.what());
  }
}

json solution_to_json(const Solution& sol) {
  json j;
  j["algorithm"] = sol.algorithm;
  j["status"] = to_string(sol.status);
  j["cost"] = sol.cost;
  auto& paths = j["paths"] = json::array();
  auto& tasks = j["tasks"] = json::array();
  for (const auto& p : sol.paths) {
    paths.push_back(p.locs);
    auto& row = tasks.emplace_back(json::array());
    for (const auto& w : p.tasks) row.push_back({w.v, w.start, w.end});
  }
  j["stats"] = {{"nodes", sol.stats.nodes},
                {"conflicts_resolved", sol.stats.conflicts_resolved},
                {"roots", sol.stats.roots},
                {"sequencing_calls", sol.stats.sequencing_calls},
                {"wall_ms", sol.stats.wall_ms}};
  return j;
}

Solution solution_from_json(const json& j) {
  try {
    Solution sol;
    sol.algorithm = j.value("algorithm", "");
    const std::string status = j.value("status", "solved");
    sol.status = status == "solved" ? SolveStatus::Solved : status == "timeout" ? SolveStatus::Timeout : SolveStatus::Infeasible;
    sol.cost = j.at("cost").get<long long>();
    for (const auto& p : j.at("paths")) sol.paths.push_back(Path{p.get<std::vector<Vertex>>(), {}});
    if (j.contains("tasks")) {
      const auto& tasks = j.at("tasks");
      for (std::size_t a = 0; a < tasks.size() && a < sol.paths.size(); ++a)
        for (const auto& w : tasks[a]) sol.paths[a].tasks.push_back({w.at(0).get<Vertex>(), w.at(1).get<Tick>(), w.at(2).get<Tick>()});
    }
    if (j.contains("stats")) {
      const auto& s = j.at("stats");
      sol.stats.nodes = s.value("nodes", 0LL);
      sol.stats.conflicts_resolved = s.value("conflicts_resolved", 0LL);
      sol.stats.roots = s.value("roots", 0LL);
      sol.stats.sequencing_calls = s.value("sequencing_calls", 0LL);
      sol.stats.wall_ms = s.value("wall_ms", 0.0);
    }
    return sol;
  } catch (const json::exception& e) {
    throw InstanceError(std::string("malformed solution JSON: ") + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::string& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace mcpfd
