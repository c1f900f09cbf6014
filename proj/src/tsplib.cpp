#include "mcpfd/tsplib.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace mcpfd {

TsplibAtsp make_tsplib_atsp(const std::string& name, int n, const std::vector<Cost>& cost,
                            const ArcConstraints& constraints) {
  const auto un = static_cast<std::size_t>(n);
  Cost max_arc = 0;
  for (Cost c : cost)
    if (c < kNoArc) max_arc = std::max(max_arc, c);
  const Cost penalty = (static_cast<Cost>(n) + 1) * max_arc + 1;

  TsplibAtsp p{name, n, std::vector<Cost>(un * un, 0)};
  std::vector<int> succ(un, -1), pred(un, -1);
  for (auto [u, v] : constraints.include) {
    succ[static_cast<std::size_t>(u)] = v;
    pred[static_cast<std::size_t>(v)] = u;
  }
  std::vector<char> banned(un * un, 0);
  for (auto [u, v] : constraints.exclude) banned[static_cast<std::size_t>(u) * un + static_cast<std::size_t>(v)] = 1;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      const std::size_t k = static_cast<std::size_t>(u) * un + static_cast<std::size_t>(v);
      Cost w = cost[k];
      if (w >= kNoArc || banned[k]) w = penalty;
      else {
        const int su = succ[static_cast<std::size_t>(u)];
        const int pv = pred[static_cast<std::size_t>(v)];
        if ((su >= 0 && su != v) || (pv >= 0 && pv != u)) w += penalty;
      }
      p.weights[k] = w;
    }
  return p;
}

std::string write_tsplib_atsp(const TsplibAtsp& p) {
  std::ostringstream out;
  out << "NAME: " << p.name << "\nTYPE: ATSP\nDIMENSION: " << p.n
      << "\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n";
  for (int u = 0; u < p.n; ++u) {
    for (int v = 0; v < p.n; ++v) {
      if (v) out << ' ';
      out << p.weights[static_cast<std::size_t>(u) * static_cast<std::size_t>(p.n) + static_cast<std::size_t>(v)];
    }
    out << '\n';
  }
  out << "EOF\n";
  return out.str();
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

// Splits "KEY : value" header lines; returns false for section markers.
bool header_field(const std::string& line, std::string& key, std::string& value) {
  const auto colon = line.find(':');
  if (colon == std::string::npos) {
    key = trim(line);
    value.clear();
    return false;
  }
  key = trim(line.substr(0, colon));
  value = trim(line.substr(colon + 1));
  return true;
}

}  // namespace

TsplibAtsp read_tsplib_atsp(std::istream& in) {
  TsplibAtsp p;
  std::string line, key, value;
  int line_no = 0;
  bool in_section = false;
  while (!in_section && std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!header_field(line, key, value)) {
      if (key == "EDGE_WEIGHT_SECTION") in_section = true;
      else if (key == "EOF") break;
      else throw ParseError("unexpected section " + key, line_no);
      continue;
    }
    if (key == "NAME") p.name = value;
    else if (key == "TYPE" && value != "ATSP") throw ParseError("only TYPE ATSP is supported", line_no);
    else if (key == "DIMENSION") p.n = std::stoi(value);
    else if (key == "EDGE_WEIGHT_TYPE" && value != "EXPLICIT") throw ParseError("only EXPLICIT weights", line_no);
    else if (key == "EDGE_WEIGHT_FORMAT" && value != "FULL_MATRIX") throw ParseError("only FULL_MATRIX", line_no);
  }
  if (!in_section) throw ParseError("missing EDGE_WEIGHT_SECTION", line_no);
  if (p.n <= 0) throw ParseError("missing or invalid DIMENSION", line_no);
  const auto total = static_cast<std::size_t>(p.n) * static_cast<std::size_t>(p.n);
  p.weights.reserve(total);
  Cost w;
  while (p.weights.size() < total && in >> w) p.weights.push_back(w);
  if (p.weights.size() != total) throw ParseError("EDGE_WEIGHT_SECTION is short", line_no);
  return p;
}

std::string write_tsplib_tour(const std::string& name, const std::vector<int>& nodes) {
  std::ostringstream out;
  out << "NAME: " << name << "\nTYPE: TOUR\nDIMENSION: " << nodes.size() << "\nTOUR_SECTION\n";
  for (int v : nodes) out << v + 1 << '\n';
  out << "-1\nEOF\n";
  return out.str();
}

std::vector<int> read_tsplib_tour(std::istream& in) {
  std::string line, key, value;
  int line_no = 0;
  bool in_section = false;
  while (!in_section && std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!header_field(line, key, value) && key == "TOUR_SECTION") in_section = true;
  }
  if (!in_section) throw ParseError("missing TOUR_SECTION", line_no);
  std::vector<int> nodes;
  long long id;
  while (in >> id && id != -1) {
    if (id < 1) throw ParseError("invalid node id in tour", line_no);
    nodes.push_back(static_cast<int>(id - 1));
  }
  return nodes;
}

namespace {

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
}

}  // namespace

std::optional<Tour> solve_external(const TransformedGraph& tfg, const ArcConstraints& constraints,
                                   const std::string& command, const Deadline& deadline) {
  if (command.empty()) throw SequencingError("external backend needs a command");
  deadline.check();
  static std::atomic<unsigned> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("mcpfd-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(dir);
  const auto problem_path = dir / "problem.atsp";
  const auto tour_path = dir / "problem.tour";
  {
    std::ofstream out(problem_path);
    out << write_tsplib_atsp(make_tsplib_atsp("mcpfd", tfg.size(), tfg.arc, constraints));
  }
  std::string cmd = command;
  replace_all(cmd, "{problem}", problem_path.string());
  replace_all(cmd, "{tour}", tour_path.string());
  const int rc = std::system(cmd.c_str());
  std::vector<int> nodes;
  if (rc == 0) {
    std::ifstream in(tour_path);
    if (in) nodes = read_tsplib_tour(in);
  }
  std::error_code ec;
  std::filesystem::remove_all(dir, ec);
  if (rc != 0) throw SequencingError("external solver failed: " + cmd);

  const int n = tfg.size();
  if (static_cast<int>(nodes.size()) != n) throw SequencingError("external tour has wrong length");
  auto zero = std::find(nodes.begin(), nodes.end(), 0);
  if (zero == nodes.end()) throw SequencingError("external tour misses node 1");
  std::rotate(nodes.begin(), zero, nodes.end());
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int v : nodes) {
    if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]) throw SequencingError("external tour is not a permutation");
    seen[static_cast<std::size_t>(v)] = 1;
  }

  Tour tour{nodes, 0};
  const auto arcs = tour_arcs(tour);
  for (const Arc& a : arcs) {
    const Cost c = tfg.cost(a.first, a.second);
    if (c >= kNoArc) return std::nullopt;
    tour.cost += c;
  }
  for (const Arc& a : constraints.include)
    if (std::find(arcs.begin(), arcs.end(), a) == arcs.end()) return std::nullopt;
  for (const Arc& a : constraints.exclude)
    if (std::find(arcs.begin(), arcs.end(), a) != arcs.end()) return std::nullopt;
  if (tour.cost >= tfg.proper_cutoff()) return std::nullopt;
  return tour;
}

}  // namespace mcpfd
