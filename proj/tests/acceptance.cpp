// Acceptance checks 1-9. Prints one PASS/FAIL line per criterion; arguments
// select a subset, e.g. `acceptance 2 5`.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mcpfd/cbss.hpp"
#include "mcpfd/exec_sim.hpp"
#include "mcpfd/sequencing.hpp"
#include "mcpfd/tpg.hpp"
#include "mcpfd/verify.hpp"
#include "oracles/fixtures.hpp"
#include "oracles/joint_state.hpp"
#include "oracles/path_enum.hpp"
#include "oracles/sequence_enum.hpp"

using namespace mcpfd;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SceneKind scene_of(int s) { return static_cast<SceneKind>(s); }

// Criterion 1: toy golden costs.
Outcome toy_costs() {
  const Instance inst = toy4x4();
  auto t0 = Clock::now();
  const Solution d = solve_cbss_d(inst);
  const double td = seconds_since(t0);
  t0 = Clock::now();
  const Solution t = solve_cbss_tpg(inst);
  const double tt = seconds_since(t0);
  const bool ok = d.status == SolveStatus::Solved && t.status == SolveStatus::Solved && d.cost == 18 && t.cost == 19 &&
                  td < 1.0 && tt < 1.0 && verify_solution(inst, d.paths, d.cost).ok() &&
                  verify_solution(inst, t.paths, t.cost).ok();
  return {ok, fmt("cbss-d %lld (%.3f s), cbss-tpg %lld (%.3f s)", d.cost, td, t.cost, tt)};
}

// Criterion 2: optimality against the joint-state search.
Outcome optimality() {
  const auto t0 = Clock::now();
  int done = 0, mismatches = 0, skipped = 0;
  std::string first_bad;
  const int taus[] = {0, 2, 5};
  for (std::uint64_t seed = 1; done < 60 && seed < 2000; ++seed) {
    const int k = static_cast<int>(seed % 36);
    const int n = 2 + k % 2, m = 2 + (k / 2) % 3, tau = taus[(k / 6) % 3], scene = 1 + (k / 18) % 2;
    auto inst = oracle::random_instance(6, 6, 0.1, n, m, scene_of(scene), tau, tau, seed);
    if (!inst) continue;
    const auto expect = oracle::joint_state_optimum(*inst, 30'000'000);
    if (!expect.cost) {
      ++skipped;
      continue;
    }
    SolverConfig cfg;
    cfg.time_limit = 30;
    const Solution sol = solve_cbss_d(*inst, cfg);
    ++done;
    const bool ok = sol.status == SolveStatus::Solved && sol.cost == *expect.cost && verify_solution(*inst, sol.paths, sol.cost).ok();
    if (!ok) {
      ++mismatches;
      if (first_bad.empty())
        first_bad = fmt(" first: seed %llu N=%d M=%d tau=%d scene %d got %lld (%s) want %lld", static_cast<unsigned long long>(seed), n, m,
                        tau, scene, sol.cost, to_string(sol.status).c_str(), *expect.cost);
    }
  }
  const double secs = seconds_since(t0);
  return {done == 60 && mismatches == 0 && secs < 300,
          fmt("%d instances, %d mismatches, %d oracle skips, %.1f s", done, mismatches, skipped, secs) + first_bad};
}

// Criterion 3: K-best against exhaustive sequence enumeration.
Outcome kbest() {
  const auto t0 = Clock::now();
  int done = 0, bad = 0;
  std::string first_bad;
  for (std::uint64_t seed = 1; done < 40 && seed < 2000; ++seed) {
    const int n = 1 + static_cast<int>(seed % 3), m = static_cast<int>((seed / 3) % 5);
    const int scene = n >= 2 ? 1 + static_cast<int>((seed / 15) % 3) : 1;
    const int lo = static_cast<int>(seed % 4), hi = scene == 3 ? lo + 4 : lo;
    auto inst = oracle::random_instance(6, 6, 0.1, n, m, scene_of(scene), lo, hi, seed);
    if (!inst) continue;
    ++done;
    const auto all = oracle::all_sequence_costs(*inst);
    TransformOptions topts;
    topts.simplify_anonymous = true;
    KBestSequencer kb(*inst, {}, topts);
    std::vector<long long> got;
    while (got.size() < 8) {
      auto s = kb.next();
      if (!s) break;
      got.push_back(s->cost);
    }
    const std::size_t k = std::min<std::size_t>(8, all.size());
    std::vector<long long> want(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
    std::vector<long long> sorted = got;
    std::sort(sorted.begin(), sorted.end());
    const bool ok = got.size() == k && sorted == want && std::is_sorted(got.begin(), got.end());
    if (!ok) {
      ++bad;
      if (first_bad.empty()) first_bad = fmt(" first: seed %llu N=%d M=%d", static_cast<unsigned long long>(seed), n, m);
    }
  }
  const double secs = seconds_since(t0);
  return {done == 40 && bad == 0 && secs < 120, fmt("%d instances, %d mismatches, %.1f s", done, bad, secs) + first_bad};
}

// Criterion 4: TPG-D output is valid and keeps the visiting order.
Outcome tpg_valid() {
  const auto t0 = Clock::now();
  int done = 0, bad = 0, unsolved = 0;
  for (std::uint64_t seed = 1; done < 100 && seed < 3000; ++seed) {
    const int n = 2 + static_cast<int>(seed % 4), m = 2 + static_cast<int>((seed / 4) % 4);
    const int scene = 1 + static_cast<int>((seed / 16) % 3);
    const int tau = static_cast<int>(seed % 7);
    auto inst = oracle::random_instance(10, 10, 0.15, n, m, scene_of(scene), scene == 3 ? 1 : tau, scene == 3 ? 8 : tau, seed);
    if (!inst) continue;
    SolverConfig cfg;
    cfg.time_limit = 5;
    std::vector<Path> pre;
    const Solution sol = solve_cbss_tpg(*inst, cfg, &pre);
    if (sol.status != SolveStatus::Solved) {
      ++unsolved;
      continue;
    }
    ++done;
    if (!verify_solution(*inst, sol.paths, sol.cost).ok() || !same_visiting_order(pre, sol.paths)) ++bad;
  }
  const double secs = seconds_since(t0);
  return {done == 100 && bad == 0 && secs < 180, fmt("%d solved instances, %d failures, %d unsolved skipped, %.1f s", done, bad, unsolved, secs)};
}

// Criterion 5: no enumerated solution violates both branches of a split.
// Three agents on 3x3 and 4x3 grids; instances solved without any split are
// skipped since they exercise nothing.
Outcome disjunctive() {
  const auto t0 = Clock::now();
  int done = 0, splits = 0, widened = 0, violating_splits = 0, widened_violating = 0, truncated = 0;
  long long solutions = 0, min_gap = -1;
  std::string example;
  for (std::uint64_t seed = 1; done < 20 && seed < 5000; ++seed) {
    const int w = 3 + static_cast<int>(seed % 2);
    const int m = 1 + static_cast<int>((seed / 2) % 2);
    const int tau = 1 + static_cast<int>((seed / 4) % 3);
    auto inst = oracle::random_instance(w, 3, 0.0, 3, m, SceneKind::Scene2, tau, tau, seed);
    if (!inst) continue;
    std::vector<std::pair<std::vector<Constraint>, std::vector<Constraint>>> branches;
    SolverConfig cfg;
    cfg.time_limit = 20;
    const Solution sol = solve_cbss_d(*inst, cfg, [&](const Conflict&, const auto& a, const auto& b) { branches.emplace_back(a, b); });
    if (sol.status != SolveStatus::Solved || branches.empty()) continue;
    const auto best = oracle::joint_state_optimum(*inst);
    if (!best.cost) continue;
    const auto sols = oracle::enumerate_solutions(*inst, *best.cost + 3);
    if (sols.truncated) ++truncated;
    ++done;
    solutions += static_cast<long long>(sols.solutions.size());
    for (const auto& [a, b] : branches) {
      ++splits;
      if (a.size() > 1 || b.size() > 1) ++widened;
      bool hit = false;
      for (const auto& s : sols.solutions)
        if (oracle::violates_any(s, a) && oracle::violates_any(s, b)) {
          const long long gap = sum_of_costs(s) - *best.cost;
          if (min_gap < 0 || gap < min_gap) min_gap = gap;
          if (hit) continue;
          hit = true;
          ++violating_splits;
          if (a.size() > 1 || b.size() > 1) ++widened_violating;
          if (example.empty()) {
            std::ostringstream os;
            os << " example seed " << seed << ": agent " << a.front().agent << " at " << a.front().v << " ticks "
               << a.front().t << ".." << a.back().t << " / agent " << b.front().agent << " ticks " << b.front().t << ".."
               << b.back().t << ", solution cost " << sum_of_costs(s) << " (optimum " << *best.cost << ")";
            example = os.str();
          }
        }
    }
  }
  const double secs = seconds_since(t0);
  return {done == 20 && violating_splits == 0 && truncated == 0 && secs < 300,
          fmt("%d instances, %lld solutions enumerated (optimum + 3), %d splits (%d widened), %d splits violated by some solution "
              "(%d widened, cheapest violator optimum + %lld), %d truncated, %.1f s",
              done, solutions, splits, widened, violating_splits, widened_violating, min_gap, truncated, secs) +
              example};
}

// Criterion 6: new versus old branching rule.
Outcome branching_rules() {
  const auto t0 = Clock::now();
  int pairs = 0, cost_diff = 0, fewer_or_equal = 0, timeouts = 0;
  long long old_total = 0, new_total = 0;
  const int taus[] = {5, 10, 20};
  std::string first_diff;
  for (std::uint64_t seed = 1; pairs < 50 && seed < 1000; ++seed) {
    const int tau = taus[seed % 3];
    auto inst = oracle::random_instance(8, 8, 0.1, 4, 4, SceneKind::Scene2, tau, tau, seed);
    if (!inst) continue;
    SolverConfig nw, old;
    nw.time_limit = old.time_limit = 20;
    old.rule = BranchingRule::Old;
    const Solution a = solve_cbss_d(*inst, nw);
    const Solution b = solve_cbss_d(*inst, old);
    if (a.status != SolveStatus::Solved || b.status != SolveStatus::Solved) {
      ++timeouts;
      continue;
    }
    ++pairs;
    if (a.cost != b.cost) {
      ++cost_diff;
      if (first_diff.empty())
        first_diff = fmt(" first cost difference: seed %llu new %lld old %lld", static_cast<unsigned long long>(seed), a.cost, b.cost);
    }
    new_total += a.stats.conflicts_resolved;
    old_total += b.stats.conflicts_resolved;
    if (a.stats.conflicts_resolved <= b.stats.conflicts_resolved) ++fewer_or_equal;
  }
  const double ratio = old_total > 0 ? 100.0 * static_cast<double>(old_total - new_total) / static_cast<double>(old_total) : 0.0;
  const bool ok = pairs == 50 && cost_diff == 0 && ratio > 0 && fewer_or_equal * 5 >= pairs * 4;
  return {ok, fmt("%d pairs (%d skipped on timeout), %d cost differences, conflicts old %lld new %lld, ratio %.1f%%, new<=old on %d, %.1f s",
                  pairs, timeouts, cost_diff, old_total, new_total, ratio, fewer_or_equal, seconds_since(t0)) +
                  first_diff};
}

// Criterion 7: CBSS-D never costs more than CBSS-TPG; the gap grows with tau.
Outcome cost_ratio_trend() {
  const auto t0 = Clock::now();
  const int taus[] = {2, 5, 10, 20};
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t seed = 1; seeds.size() < 30 && seed < 1000; ++seed)
    if (oracle::random_instance(10, 10, 0.1, 3, 4, SceneKind::Scene1, 2, 2, seed)) seeds.push_back(seed);
  int worse = 0, pairs = 0;
  std::vector<double> means;
  std::string line;
  for (int tau : taus) {
    double sum = 0;
    int count = 0;
    for (auto seed : seeds) {
      auto inst = oracle::random_instance(10, 10, 0.1, 3, 4, SceneKind::Scene1, tau, tau, seed);
      SolverConfig cfg;
      cfg.time_limit = 20;
      const Solution d = solve_cbss_d(*inst, cfg);
      const Solution t = solve_cbss_tpg(*inst, cfg);
      if (d.status != SolveStatus::Solved || t.status != SolveStatus::Solved) continue;
      ++pairs;
      ++count;
      if (d.cost > t.cost) ++worse;
      sum += 100.0 * static_cast<double>(t.cost - d.cost) / static_cast<double>(t.cost);
    }
    means.push_back(count ? sum / count : 0.0);
    line += fmt(" tau=%d: %.2f%% (%d)", tau, means.back(), count);
  }
  const bool mono = std::is_sorted(means.begin(), means.end());
  return {seeds.size() == 30 && worse == 0 && mono && pairs == 120,
          fmt("%d pairs, %d with cbss-d above cbss-tpg, mean ratio", pairs, worse) + line + fmt(", %.1f s", seconds_since(t0))};
}

// Criterion 8: disturbed execution stays collision free.
Outcome execution() {
  const auto t0 = Clock::now();
  int plans = 0, runs = 0, bad = 0;
  for (std::uint64_t seed = 1; plans < 10 && seed < 500; ++seed) {
    auto inst = oracle::random_instance(10, 10, 0.15, 4, 5, SceneKind::Scene2, 3, 3, seed);
    if (!inst) continue;
    SolverConfig cfg;
    cfg.time_limit = 10;
    const Solution sol = solve_cbss_d(*inst, cfg);
    if (sol.status != SolveStatus::Solved) continue;
    ++plans;
    for (std::uint64_t s = 0; s < 10; ++s) {
      ++runs;
      try {
        const auto res = simulate_execution(*inst, sol.paths, {0.2, 1, 3, 0.5, seed * 100 + s});
        if (!verify_trace(*inst, res).ok()) ++bad;
      } catch (const std::exception&) {
        ++bad;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {plans == 10 && runs == 100 && bad == 0 && secs < 120, fmt("%d plans, %d runs, %d failures, %.1f s", plans, runs, bad, secs)};
}

// Criterion 9: one larger Scene 2 instance within a minute.
Outcome scale() {
  auto inst = oracle::random_instance(32, 32, 0.2, 10, 20, SceneKind::Scene2, 5, 5, 1);
  if (!inst) return {false, "instance generation failed"};
  SolverConfig cfg;
  cfg.time_limit = 60;
  const auto t0 = Clock::now();
  const Solution sol = solve_cbss_d(*inst, cfg);
  const double secs = seconds_since(t0);
  const bool ok = sol.status == SolveStatus::Solved && verify_solution(*inst, sol.paths, sol.cost).ok() && secs < 60;
  return {ok, fmt("%s, cost %lld, %lld nodes, %lld conflicts, %lld roots, %.1f s", to_string(sol.status).c_str(), sol.cost,
                  sol.stats.nodes, sol.stats.conflicts_resolved, sol.stats.roots, secs)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> checks{toy_costs, optimality, kbest,           tpg_valid, disjunctive,
                                                     branching_rules, cost_ratio_trend, execution, scale};
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
  int failed = 0;
  for (int k = 1; k <= static_cast<int>(checks.size()); ++k) {
    if (!pick.empty() && !pick.count(k)) continue;
    Outcome o;
    try {
      o = checks[static_cast<std::size_t>(k - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s  %s\n", k, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
