// Command-line front end for the MCPF-D solvers, instance tools and benchmark.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "mcpfd/bench.hpp"
#include "mcpfd/cbss.hpp"
#include "mcpfd/exec_sim.hpp"
#include "mcpfd/serialization.hpp"
#include "mcpfd/tpg.hpp"
#include "mcpfd/tsplib.hpp"
#include "mcpfd/verify.hpp"

using namespace mcpfd;

namespace {

void check_map_matches(const std::string& map_path, const Instance& inst) {
  if (map_path.empty()) return;
  const Grid grid = parse_map(read_text_file(map_path));
  const Grid& g = inst.graph.grid();
  if (grid.width != g.width || grid.height != g.height || grid.passable != g.passable)
    throw InstanceError("map " + map_path + " does not match the instance grid");
}

SequencingBackend parse_backend(const std::string& s) {
  if (s == "bnb") return SequencingBackend::BranchAndBound;
  if (s == "dp") return SequencingBackend::AssignmentDp;
  if (s == "external") return SequencingBackend::External;
  return SequencingBackend::Auto;
}

void print_report(const ValidationReport& rep) {
  if (rep.ok()) {
    std::cout << "ok\n";
    return;
  }
  for (const auto& v : rep.violations) std::cout << "violation: " << v << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MCPF-D solver suite"};
  app.require_subcommand(1);

  std::string map_path, instance_path, solution_path, out_path, algo = "cbss-d", branching = "new";
  std::string backend = "auto", external_cmd, tpg_dot;
  double eps = 0.0, time_limit = 60.0;
  auto* solve = app.add_subcommand("solve", "Solve an instance");
  solve->add_option("--map", map_path, "MovingAI map the instance was built on (checked)");
  solve->add_option("--instance", instance_path)->required();
  solve->add_option("--algo", algo)->check(CLI::IsMember({"cbss-d", "cbss-tpg"}));
  solve->add_option("--branching", branching)->check(CLI::IsMember({"new", "old"}));
  solve->add_option("--eps", eps);
  solve->add_option("--time-limit", time_limit, "Seconds, <= 0 for none");
  solve->add_option("--backend", backend)->check(CLI::IsMember({"auto", "bnb", "dp", "external"}));
  solve->add_option("--external-cmd", external_cmd, "Solver command with {problem} and {tour} placeholders");
  solve->add_option("--tpg-dot", tpg_dot, "Write the TPG of the pre-duration plan (cbss-tpg)");
  solve->add_option("--out", out_path)->required();

  std::string scen_path, tau_spec = "0";
  int scene = 1, agents = 2, targets = 2;
  std::uint64_t seed = 0;
  auto* gen = app.add_subcommand("gen-instance", "Build an instance from a map and scenario");
  gen->add_option("--map", map_path)->required();
  gen->add_option("--scen", scen_path)->required();
  gen->add_option("--scene", scene)->check(CLI::Range(1, 3));
  gen->add_option("--agents", agents)->required();
  gen->add_option("--targets", targets)->required();
  gen->add_option("--tau", tau_spec, "Duration, e.g. 5 or 2-10");
  gen->add_option("--seed", seed);
  gen->add_option("--out", out_path)->required();

  std::string config_path, summary_path;
  auto* bench = app.add_subcommand("bench", "Run a benchmark grid");
  bench->add_option("--config", config_path)->required();
  bench->add_option("--out", out_path)->required();
  bench->add_option("--summary", summary_path, "Aggregates CSV (default: <out>.summary.csv)");

  auto* verify = app.add_subcommand("verify", "Check a solution against an instance");
  verify->add_option("--instance", instance_path)->required();
  verify->add_option("--solution", solution_path)->required();

  bool simplify = false;
  auto* exp = app.add_subcommand("export-tsplib", "Write the transformed sequencing problem as TSPLIB ATSP");
  exp->add_option("--instance", instance_path)->required();
  exp->add_option("--simplify", simplify, "One node per task when all tasks are anonymous");
  exp->add_option("--out", out_path)->required();

  DelayModel delay;
  auto* sim = app.add_subcommand("simulate", "Execute a plan with random delays");
  sim->add_option("--solution", solution_path)->required();
  sim->add_option("--instance", instance_path)->required();
  sim->add_option("--delay-prob", delay.move_delay_prob);
  sim->add_option("--delay-min", delay.delay_lo);
  sim->add_option("--delay-max", delay.delay_hi);
  sim->add_option("--duration-noise", delay.duration_noise, "Relative, e.g. 0.5");
  sim->add_option("--seed", delay.seed);
  sim->add_option("--out", out_path)->required();

  int width = 32, height = 32, count = 100;
  double ratio = 0.2;
  auto* gmap = app.add_subcommand("gen-map", "Generate a random MovingAI map");
  gmap->add_option("--width", width);
  gmap->add_option("--height", height);
  gmap->add_option("--ratio", ratio, "Blocked fraction");
  gmap->add_option("--seed", seed);
  gmap->add_option("--out", out_path)->required();

  auto* gscen = app.add_subcommand("gen-scen", "Generate a MovingAI scenario for a map");
  gscen->add_option("--map", map_path)->required();
  gscen->add_option("--count", count);
  gscen->add_option("--seed", seed);
  gscen->add_option("--out", out_path)->required();

  std::string problem_path, tour_path;
  auto* tsolve = app.add_subcommand("tsplib-solve", "Exact ATSP solve of a TSPLIB file (branch and bound)");
  tsolve->add_option("--problem", problem_path)->required();
  tsolve->add_option("--tour", tour_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      const Instance inst = instance_from_json(read_json_file(instance_path));
      check_map_matches(map_path, inst);
      SolverConfig cfg;
      cfg.eps = eps;
      cfg.time_limit = time_limit;
      cfg.rule = branching == "old" ? BranchingRule::Old : BranchingRule::New;
      cfg.backend = parse_backend(backend);
      cfg.external_command = external_cmd;
      Solution sol;
      if (algo == "cbss-tpg") {
        std::vector<Path> pre;
        sol = solve_cbss_tpg(inst, cfg, &pre);
        if (!tpg_dot.empty() && sol.status == SolveStatus::Solved)
          write_text_file(tpg_dot, tpg_to_dot(build_tpg(inst, pre)));
      } else {
        sol = solve_cbss_d(inst, cfg);
      }
      write_text_file(out_path, solution_to_json(sol).dump(2) + "\n");
      std::cout << sol.algorithm << ' ' << to_string(sol.status);
      if (sol.status == SolveStatus::Solved) std::cout << " cost " << sol.cost;
      std::cout << " (" << sol.stats.wall_ms << " ms)\n";
      return sol.status == SolveStatus::Solved ? 0 : 2;
    }
    if (*gen) {
      const Grid grid = parse_map(read_text_file(map_path));
      const auto pairs = parse_scen(read_text_file(scen_path), grid);
      SceneConfig sc;
      sc.kind = static_cast<SceneKind>(scene);
      std::tie(sc.tau_lo, sc.tau_hi) = parse_tau_spec(tau_spec);
      sc.seed = seed;
      const Instance inst = build_instance(grid, pairs, agents, targets, sc);
      const auto rep = validate_instance(inst);
      if (!rep.ok()) {
        print_report(rep);
        return 1;
      }
      write_text_file(out_path, instance_to_json(inst).dump(2) + "\n");
      return 0;
    }
    if (*bench) {
      const auto report = run_benchmark_file(config_path);
      write_text_file(out_path, rows_to_csv(report.rows));
      const std::string summary = aggregates_to_csv(report.aggregates);
      write_text_file(summary_path.empty() ? out_path + ".summary.csv" : summary_path, summary);
      std::cout << summary;
      return 0;
    }
    if (*verify) {
      const Instance inst = instance_from_json(read_json_file(instance_path));
      const Solution sol = solution_from_json(read_json_file(solution_path));
      const auto rep = verify_solution(inst, sol.paths, sol.cost);
      print_report(rep);
      if (rep.ok()) std::cout << "cost " << sum_of_costs(sol.paths) << '\n';
      return rep.ok() ? 0 : 1;
    }
    if (*exp) {
      const Instance inst = instance_from_json(read_json_file(instance_path));
      const auto tg = compute_target_graph(inst);
      TransformOptions topts;
      topts.simplify_anonymous = simplify;
      const auto tfg = transform(inst, tg, topts);
      write_text_file(out_path, write_tsplib_atsp(make_tsplib_atsp("mcpfd", tfg.size(), tfg.arc)));
      std::cout << "nodes " << tfg.size() << " offset " << tfg.offset << '\n';
      return 0;
    }
    if (*sim) {
      const Instance inst = instance_from_json(read_json_file(instance_path));
      const Solution sol = solution_from_json(read_json_file(solution_path));
      const auto result = simulate_execution(inst, sol.paths, delay);
      write_text_file(out_path, trace_to_jsonl(result));
      const auto rep = verify_trace(inst, result);
      print_report(rep);
      std::cout << "makespan " << result.makespan << '\n';
      return rep.ok() ? 0 : 1;
    }
    if (*gmap) {
      write_text_file(out_path, write_map(generate_random_grid(width, height, ratio, seed)));
      return 0;
    }
    if (*gscen) {
      const Grid grid = parse_map(read_text_file(map_path));
      write_text_file(out_path, generate_scen_text(grid, std::filesystem::path(map_path).filename().string(), count, seed));
      return 0;
    }
    if (*tsolve) {
      std::ifstream in(problem_path);
      if (!in) throw std::runtime_error("cannot open " + problem_path);
      const auto p = read_tsplib_atsp(in);
      AtspProblem problem{p.n, p.weights, {}, kNoArc};
      const auto tour = solve_atsp_branch_and_bound(problem, {});
      if (!tour) throw std::runtime_error("no tour");
      write_text_file(tour_path, write_tsplib_tour(p.name, tour->nodes));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
