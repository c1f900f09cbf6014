#include "mcpfd/workspace.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <istream>
#include <set>
#include <sstream>

#include "mcpfd/rng.hpp"

namespace mcpfd {

Grid::Grid(int w, int h, std::vector<std::uint8_t> cells) : width(w), height(h), passable(std::move(cells)) {
  if (w <= 0 || h <= 0) throw InstanceError("grid dimensions must be positive");
  if (static_cast<std::size_t>(w) * static_cast<std::size_t>(h) != passable.size())
    throw InstanceError("grid cell count does not match width*height");
}

int Grid::num_passable() const {
  return static_cast<int>(std::count(passable.begin(), passable.end(), std::uint8_t{1}));
}

Graph::Graph(Grid grid) : grid_(std::move(grid)) {
  const int n = grid_.width * grid_.height;
  adj_.assign(static_cast<std::size_t>(n), {});
  static constexpr int kDr[4] = {-1, 0, 0, 1};
  static constexpr int kDc[4] = {0, -1, 1, 0};
  for (int v = 0; v < n; ++v) {
    if (!grid_.is_passable(v)) continue;
    const int r = grid_.row_of(v), c = grid_.col_of(v);
    for (int k = 0; k < 4; ++k) {
      const int nr = r + kDr[k], nc = c + kDc[k];
      if (grid_.in_bounds(nr, nc) && grid_.is_passable(grid_.id(nr, nc)))
        adj_[static_cast<std::size_t>(v)].push_back(grid_.id(nr, nc));
    }
  }
}

bool Graph::adjacent(Vertex u, Vertex v) const {
  const auto& n = neighbors(u);
  return std::find(n.begin(), n.end(), v) != n.end();
}

std::vector<int> Graph::distances_from(Vertex src) const {
  std::vector<int> dist(static_cast<std::size_t>(num_vertices()), -1);
  if (!is_passable(src)) return dist;
  std::deque<Vertex> queue{src};
  dist[static_cast<std::size_t>(src)] = 0;
  while (!queue.empty()) {
    const Vertex u = queue.front();
    queue.pop_front();
    for (Vertex w : neighbors(u)) {
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

std::vector<Vertex> Instance::task_vertices() const {
  std::vector<Vertex> out = targets;
  out.insert(out.end(), goals.begin(), goals.end());
  return out;
}

bool Instance::is_target(Vertex v) const { return std::find(targets.begin(), targets.end(), v) != targets.end(); }
bool Instance::is_goal(Vertex v) const { return std::find(goals.begin(), goals.end(), v) != goals.end(); }

bool Instance::is_eligible(AgentId a, Vertex v) const {
  auto it = eligibility.find(v);
  if (it == eligibility.end()) return false;
  return std::binary_search(it->second.begin(), it->second.end(), a);
}

int Instance::task_duration(AgentId a, Vertex v) const {
  auto it = duration.find(v);
  if (it != duration.end()) {
    auto jt = it->second.find(a);
    if (jt != it->second.end()) return jt->second;
  }
  throw InstanceError("no duration for agent " + std::to_string(a) + " at vertex " + std::to_string(v));
}

namespace {

int parse_int(std::string_view s, int line, const char* what) {
  int value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw ParseError(std::string("expected integer for ") + what, line);
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

std::pair<int, int> parse_tau_spec(std::string_view spec) {
  spec = trim(spec);
  auto split_at = [&](std::size_t pos, std::size_t len) {
    const int lo = parse_int(trim(spec.substr(0, pos)), 0, "tau range");
    const int hi = parse_int(trim(spec.substr(pos + len)), 0, "tau range");
    if (lo < 0 || hi < lo) throw ParseError("invalid tau range", 0);
    return std::pair{lo, hi};
  };
  if (auto p = spec.find(".."); p != std::string_view::npos) return split_at(p, 2);
  if (auto p = spec.find('-'); p != std::string_view::npos && p > 0) return split_at(p, 1);
  const int v = parse_int(spec, 0, "tau");
  if (v < 0) throw ParseError("tau must be nonnegative", 0);
  return {v, v};
}

Grid parse_map(std::istream& in) {
  std::string line;
  int line_no = 0;
  int width = -1, height = -1;
  bool saw_type = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto tok = split_ws(t);
    if (tok[0] == "type") {
      if (tok.size() != 2) throw ParseError("malformed type line", line_no);
      saw_type = true;
    } else if (tok[0] == "height" || tok[0] == "width") {
      if (!saw_type) throw ParseError("header must start with 'type'", line_no);
      if (tok.size() != 2) throw ParseError("malformed dimension line", line_no);
      const int v = parse_int(tok[1], line_no, "dimension");
      if (v <= 0) throw ParseError("dimension must be positive", line_no);
      (tok[0] == "height" ? height : width) = v;
    } else if (tok[0] == "map") {
      if (!saw_type || width < 0 || height < 0) throw ParseError("'map' before complete header", line_no);
      break;
    } else {
      throw ParseError("unexpected header line '" + std::string(t) + "'", line_no);
    }
  }
  if (width < 0 || height < 0) throw ParseError("missing map header", line_no);

  std::vector<std::uint8_t> cells;
  cells.reserve(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  int rows = 0;
  while (rows < height && std::getline(in, line)) {
    ++line_no;
    std::string_view row = line;
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    if (static_cast<int>(row.size()) != width)
      throw ParseError("row length " + std::to_string(row.size()) + " != width " + std::to_string(width), line_no);
    for (char g : row) {
      switch (g) {
        case '.':
        case 'G': cells.push_back(1); break;
        case '@':
        case 'O':
        case 'T':
        case 'W': cells.push_back(0); break;
        default: throw ParseError(std::string("unknown glyph '") + g + "'", line_no);
      }
    }
    ++rows;
  }
  if (rows != height)
    throw ParseError("expected " + std::to_string(height) + " rows, found " + std::to_string(rows), line_no);
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) throw ParseError("trailing content after map rows", line_no);
  }
  Grid grid(width, height, std::move(cells));
  if (grid.num_passable() == 0) throw ParseError("map has no passable cell", line_no);
  return grid;
}

Grid parse_map(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_map(in);
}

std::string write_map(const Grid& grid) {
  std::ostringstream out;
  out << "type octile\nheight " << grid.height << "\nwidth " << grid.width << "\nmap\n";
  for (int r = 0; r < grid.height; ++r) {
    for (int c = 0; c < grid.width; ++c) out << (grid.is_passable(grid.id(r, c)) ? '.' : '@');
    out << '\n';
  }
  return out.str();
}

std::vector<std::pair<Vertex, Vertex>> parse_scen(std::istream& in, const Grid& grid) {
  std::string line;
  int line_no = 0;
  bool saw_version = false;
  int entry = 0;
  std::vector<std::pair<Vertex, Vertex>> pairs;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (!saw_version) {
      const auto tok = split_ws(t);
      if (tok.size() != 2 || tok[0] != "version" || !(tok[1] == "1" || tok[1] == "1.0"))
        throw ParseError("expected 'version 1' header", line_no);
      saw_version = true;
      continue;
    }
    // Fields are tab separated; the map name may contain spaces.
    std::vector<std::string_view> f;
    std::string_view rest = t;
    while (true) {
      const auto p = rest.find('\t');
      f.push_back(trim(rest.substr(0, p)));
      if (p == std::string_view::npos) break;
      rest = rest.substr(p + 1);
    }
    if (f.size() != 9) {
      f = split_ws(t);
      if (f.size() != 9) throw ParseError("scen entry " + std::to_string(entry) + " needs 9 fields", line_no);
    }
    const int mw = parse_int(f[2], line_no, "map width");
    const int mh = parse_int(f[3], line_no, "map height");
    if (mw != grid.width || mh != grid.height)
      throw ParseError("scen entry " + std::to_string(entry) + " map size differs from grid", line_no);
    const int sx = parse_int(f[4], line_no, "start x"), sy = parse_int(f[5], line_no, "start y");
    const int gx = parse_int(f[6], line_no, "goal x"), gy = parse_int(f[7], line_no, "goal y");
    auto cell = [&](int x, int y) {
      if (!grid.in_bounds(y, x))
        throw ParseError("scen entry " + std::to_string(entry) + " coordinate out of range", line_no);
      const int id = grid.id(y, x);
      if (!grid.is_passable(id))
        throw ParseError("scen entry " + std::to_string(entry) + " references blocked cell", line_no);
      return id;
    };
    pairs.emplace_back(cell(sx, sy), cell(gx, gy));
    ++entry;
  }
  if (!saw_version) throw ParseError("missing 'version 1' header", line_no);
  return pairs;
}

std::vector<std::pair<Vertex, Vertex>> parse_scen(std::string_view text, const Grid& grid) {
  std::istringstream in{std::string(text)};
  return parse_scen(in, grid);
}

Instance build_instance(const Grid& grid, const std::vector<std::pair<Vertex, Vertex>>& pairs, int n_agents,
                        int n_targets, const SceneConfig& cfg) {
  if (n_agents < 1) throw InstanceError("need at least one agent");
  if (n_targets < 0) throw InstanceError("negative target count");
  if (cfg.tau_lo < 0 || cfg.tau_hi < cfg.tau_lo) throw InstanceError("invalid duration range");
  if (cfg.kind != SceneKind::Scene1 && n_agents < 2)
    throw InstanceError("scenes 2 and 3 need at least two agents (two eligible agents per target)");
  if (cfg.kind != SceneKind::Scene3 && cfg.tau_lo != cfg.tau_hi)
    throw InstanceError("scenes 1 and 2 use a single duration value");

  Instance inst{Graph(grid), {}, {}, {}, {}, {}};
  std::set<Vertex> used;
  std::size_t next = 0;
  for (; next < pairs.size() && inst.num_agents() < n_agents; ++next) {
    const auto [s, g] = pairs[next];
    if (s == g || used.count(s) || used.count(g)) continue;
    used.insert(s);
    used.insert(g);
    inst.starts.push_back(s);
    inst.goals.push_back(g);
  }
  if (inst.num_agents() < n_agents) throw InstanceError("insufficient distinct start/goal locations");

  std::vector<Vertex> candidates;
  std::set<Vertex> seen;
  for (; next < pairs.size(); ++next) {
    const Vertex g = pairs[next].second;
    if (!used.count(g) && seen.insert(g).second) candidates.push_back(g);
  }
  if (static_cast<int>(candidates.size()) < n_targets) throw InstanceError("insufficient distinct target locations");

  SplitMix64 rng(cfg.seed);
  rng.shuffle(candidates);
  inst.targets.assign(candidates.begin(), candidates.begin() + n_targets);

  const int n = n_agents;
  std::vector<AgentId> all(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) all[static_cast<std::size_t>(a)] = a;

  for (Vertex t : inst.targets) {
    std::vector<AgentId> agents;
    if (cfg.kind == SceneKind::Scene1) {
      agents = all;
    } else {
      const auto a = static_cast<AgentId>(rng.uniform_int(0, n - 1));
      auto b = static_cast<AgentId>(rng.uniform_int(0, n - 2));
      if (b >= a) ++b;
      agents = {std::min(a, b), std::max(a, b)};
    }
    inst.eligibility[t] = agents;
    for (AgentId a : agents) {
      const int tau = cfg.kind == SceneKind::Scene3 ? static_cast<int>(rng.uniform_int(cfg.tau_lo, cfg.tau_hi))
                                                    : cfg.tau_lo;
      inst.duration[t][a] = tau;
    }
  }
  for (int i = 0; i < n; ++i) {
    const Vertex g = inst.goals[static_cast<std::size_t>(i)];
    inst.eligibility[g] = cfg.kind == SceneKind::Scene1 ? all : std::vector<AgentId>{i};
    for (AgentId a : inst.eligibility[g]) inst.duration[g][a] = 0;
  }
  return inst;
}

ValidationReport validate_instance(const Instance& inst) {
  ValidationReport rep;
  auto& v = rep.violations;
  const Graph& g = inst.graph;
  const int n = inst.num_agents();
  if (n == 0) v.push_back("no agents");
  if (inst.goals.size() != inst.starts.size()) v.push_back("|starts| != |goals|");

  auto check_passable = [&](const std::vector<Vertex>& vs, const char* what) {
    for (Vertex x : vs)
      if (!g.is_passable(x)) v.push_back(std::string(what) + " vertex " + std::to_string(x) + " not passable");
  };
  check_passable(inst.starts, "start");
  check_passable(inst.goals, "goal");
  check_passable(inst.targets, "target");

  auto dup_within = [&](const std::vector<Vertex>& vs, const char* what) {
    std::set<Vertex> s(vs.begin(), vs.end());
    if (s.size() != vs.size()) v.push_back(std::string("duplicate ") + what);
  };
  dup_within(inst.starts, "starts");
  dup_within(inst.goals, "goals");
  dup_within(inst.targets, "targets");
  auto disjoint = [&](const std::vector<Vertex>& a, const std::vector<Vertex>& b, const char* what) {
    for (Vertex x : a)
      if (std::find(b.begin(), b.end(), x) != b.end()) {
        v.push_back(std::string(what) + " not disjoint");
        return;
      }
  };
  disjoint(inst.starts, inst.goals, "starts/goals");
  disjoint(inst.targets, inst.goals, "targets/goals");
  disjoint(inst.targets, inst.starts, "targets/starts");

  for (Vertex t : inst.task_vertices()) {
    auto it = inst.eligibility.find(t);
    if (it == inst.eligibility.end() || it->second.empty()) {
      v.push_back("vertex " + std::to_string(t) + " has no eligible agent");
      continue;
    }
    for (AgentId a : it->second) {
      if (a < 0 || a >= n) {
        v.push_back("vertex " + std::to_string(t) + " lists unknown agent " + std::to_string(a));
        continue;
      }
      auto dt = inst.duration.find(t);
      if (dt == inst.duration.end() || !dt->second.count(a))
        v.push_back("missing duration for agent " + std::to_string(a) + " at " + std::to_string(t));
      else if (dt->second.at(a) < 0)
        v.push_back("negative duration for agent " + std::to_string(a) + " at " + std::to_string(t));
    }
  }
  for (const auto& [vert, m] : inst.duration)
    for (const auto& [a, tau] : m)
      if (!inst.is_eligible(a, vert))
        v.push_back("duration defined for ineligible agent " + std::to_string(a) + " at " + std::to_string(vert));

  // Every agent needs at least one eligible goal; a perfect matching is
  // checked by the sequencing layer.
  for (int a = 0; a < n; ++a) {
    bool any = false;
    for (Vertex goal : inst.goals) any = any || inst.is_eligible(a, goal);
    if (!any) v.push_back("agent " + std::to_string(a) + " has no eligible goal");
  }

  for (int a = 0; a < n && a < static_cast<int>(inst.starts.size()); ++a) {
    const Vertex s = inst.starts[static_cast<std::size_t>(a)];
    if (!g.is_passable(s)) continue;
    const auto dist = g.distances_from(s);
    for (Vertex t : inst.task_vertices()) {
      if (!g.is_passable(t) || !inst.is_eligible(a, t)) continue;
      if (dist[static_cast<std::size_t>(t)] < 0)
        v.push_back("vertex " + std::to_string(t) + " unreachable for agent " + std::to_string(a));
    }
  }
  return rep;
}

Instance toy4x4() {
  Grid grid(4, 4, std::vector<std::uint8_t>(16, 1));
  Instance inst{Graph(grid), {8, 1, 2}, {11, 13, 14}, {6, 9, 10}, {}, {}};
  inst.eligibility[9] = {0};
  inst.duration[9][0] = 2;
  inst.eligibility[10] = {0, 2};
  inst.duration[10][0] = 1;
  inst.duration[10][2] = 4;
  inst.eligibility[6] = {2};
  inst.duration[6][2] = 4;
  for (int a = 0; a < 3; ++a) {
    const Vertex g = inst.goals[static_cast<std::size_t>(a)];
    inst.eligibility[g] = {a};
    inst.duration[g][a] = 0;
  }
  return inst;
}

Grid generate_random_grid(int width, int height, double blocked_ratio, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const int n = width * height;
  std::vector<int> ids(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
  rng.shuffle(ids);
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(n), 1);
  const int blocked = static_cast<int>(blocked_ratio * n);
  for (int i = 0; i < blocked; ++i) cells[static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])] = 0;
  return Grid(width, height, std::move(cells));
}

std::string generate_scen_text(const Grid& grid, const std::string& map_name, int n_entries, std::uint64_t seed) {
  // Sample from the largest connected component so every entry is solvable.
  Graph g(grid);
  std::vector<int> comp(static_cast<std::size_t>(g.num_vertices()), -1);
  std::vector<Vertex> best;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    if (!g.is_passable(v) || comp[static_cast<std::size_t>(v)] >= 0) continue;
    std::vector<Vertex> members{v};
    comp[static_cast<std::size_t>(v)] = v;
    for (std::size_t i = 0; i < members.size(); ++i)
      for (Vertex w : g.neighbors(members[i]))
        if (comp[static_cast<std::size_t>(w)] < 0) {
          comp[static_cast<std::size_t>(w)] = v;
          members.push_back(w);
        }
    if (members.size() > best.size()) best = std::move(members);
  }
  std::sort(best.begin(), best.end());
  if (best.size() < 2) throw InstanceError("grid has no component with two cells");

  SplitMix64 rng(seed);
  std::ostringstream out;
  out << "version 1\n";
  for (int e = 0; e < n_entries; ++e) {
    const auto pick = [&] { return best[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(best.size()) - 1))]; };
    const Vertex s = pick();
    Vertex t = pick();
    while (t == s) t = pick();
    const int d = g.distances_from(s)[static_cast<std::size_t>(t)];
    out << e / 10 << '\t' << map_name << '\t' << grid.width << '\t' << grid.height << '\t' << grid.col_of(s) << '\t'
        << grid.row_of(s) << '\t' << grid.col_of(t) << '\t' << grid.row_of(t) << '\t' << d << '\n';
  }
  return out.str();
}

}  // namespace mcpfd
