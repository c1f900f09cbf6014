#include "doctest.h"

#include <filesystem>
#include <sstream>

#include "mcpfd/sequencing.hpp"
#include "mcpfd/tsplib.hpp"
#include "oracles/fixtures.hpp"
#include "oracles/sequence_enum.hpp"

using namespace mcpfd;

namespace {

std::vector<Cost> first_k(KBestSequencer& kb, int k) {
  std::vector<Cost> out;
  while (static_cast<int>(out.size()) < k) {
    auto s = kb.next();
    if (!s) break;
    out.push_back(s->cost);
  }
  return out;
}

Instance single_agent(int targets) {
  Instance inst;
  inst.graph = Graph(Grid(3, 3, std::vector<std::uint8_t>(9, 1)));
  inst.starts = {0};
  inst.goals = {8};
  inst.eligibility[8] = {0};
  inst.duration[8][0] = 0;
  if (targets > 0) {
    inst.targets = {2};
    inst.eligibility[2] = {0};
    inst.duration[2][0] = 3;
  }
  return inst;
}

}  // namespace

TEST_CASE("target graph holds shortest-path lengths") {
  const Instance inst = toy4x4();
  const TargetGraph tg = compute_target_graph(inst);
  CHECK(tg.between(8, 9) == 1);
  CHECK(tg.between(1, 9) == 2);
  CHECK(tg.between(2, 6) == 1);
  CHECK(tg.between(8, 13) == tg.between(13, 8));
  for (int k = 0; k < tg.size(); ++k) CHECK(tg.at(k, k) == 0);
}

TEST_CASE("toy optimum untransforms to the published joint sequence") {
  const Instance inst = toy4x4();
  const TargetGraph tg = compute_target_graph(inst);
  const TransformedGraph tfg = transform(inst, tg);
  for (auto backend : {SequencingBackend::BranchAndBound, SequencingBackend::AssignmentDp}) {
    SequencingOptions opts;
    opts.backend = backend;
    const auto tour = solve_sequencing(tfg, {}, opts);
    REQUIRE(tour);
    const JointSequence js = untransform(*tour, tfg);
    CHECK(js.seqs == std::vector<std::vector<Vertex>>{{8, 9, 10, 11}, {1, 13}, {2, 6, 14}});
    CHECK(js.cost == 16);
    CHECK(tour->cost == tfg.offset + 16);
    CHECK(joint_sequence_cost(inst, tg, js.seqs) == 16);
  }
}

TEST_CASE("single agent without targets goes straight to its goal") {
  const Instance inst = single_agent(0);
  const TargetGraph tg = compute_target_graph(inst);
  const TransformedGraph tfg = transform(inst, tg);
  const auto tour = solve_sequencing(tfg, {});
  REQUIRE(tour);
  const auto js = untransform(*tour, tfg);
  CHECK(js.seqs == std::vector<std::vector<Vertex>>{{0, 8}});
  CHECK(js.cost == 4);
  const Instance one = single_agent(1);
  const auto tfg1 = transform(one, compute_target_graph(one));
  CHECK(untransform(*solve_sequencing(tfg1, {}), tfg1).cost == 2 + 3 + 2);
}

TEST_CASE("branch and bound on plain ATSPs") {
  // 3 nodes: clockwise 0->1->2->0 costs 1+1+1, the other direction 2+2+2.
  AtspProblem p{3, {kNoArc, 1, 2, 2, kNoArc, 1, 1, 2, kNoArc}, {}, kNoArc};
  const auto tour = solve_atsp_branch_and_bound(p, {});
  REQUIRE(tour);
  CHECK(tour->nodes == std::vector<int>{0, 1, 2});
  CHECK(tour->cost == 3);
  ArcConstraints forbid;
  forbid.exclude = {{1, 0}, {1, 2}};
  CHECK_FALSE(solve_atsp_branch_and_bound(p, forbid));
  ArcConstraints force;
  force.include = {{0, 2}};
  CHECK(solve_atsp_branch_and_bound(p, force)->cost == 6);
}

TEST_CASE("backends agree on random instances and keep the cost bookkeeping") {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 100 && seed < 400; ++seed) {
    const int n = 1 + static_cast<int>(seed % 3);
    const int m = static_cast<int>(seed % 4);
    const auto scene = n >= 2 && seed % 2 ? SceneKind::Scene2 : SceneKind::Scene1;
    auto inst = oracle::random_instance(6, 6, 0.15, n, m, scene, static_cast<int>(seed % 3), static_cast<int>(seed % 3), seed);
    if (!inst) continue;
    ++checked;
    const TargetGraph tg = compute_target_graph(*inst);
    const TransformedGraph tfg = transform(*inst, tg);
    SequencingOptions bnb, dp;
    bnb.backend = SequencingBackend::BranchAndBound;
    dp.backend = SequencingBackend::AssignmentDp;
    const auto a = solve_sequencing(tfg, {}, bnb);
    const auto b = solve_sequencing(tfg, {}, dp);
    REQUIRE(a);
    REQUIRE(b);
    CHECK(a->cost == b->cost);
    const auto ja = untransform(*a, tfg);
    CHECK(ja.cost == a->cost - tfg.offset);
    CHECK(joint_sequence_cost(*inst, tg, ja.seqs) == ja.cost);
    CHECK(ja.cost == oracle::all_sequence_costs(*inst).front());
  }
  CHECK(checked == 100);
}

TEST_CASE("k-best costs are monotone and exhaust") {
  KBestSequencer kb(toy4x4());
  const auto costs = first_k(kb, 4);
  CHECK(costs == std::vector<Cost>{16, 18, 19, 21});
  const Instance tiny = single_agent(1);
  KBestSequencer small(tiny);
  CHECK(first_k(small, 5).size() == 1);
  CHECK_FALSE(small.next());
}

TEST_CASE("k-best matches exhaustive enumeration on an open 5x5 grid") {
  Instance inst;
  inst.graph = Graph(Grid(5, 5, std::vector<std::uint8_t>(25, 1)));
  inst.starts = {0, 4};
  inst.goals = {24, 20};
  inst.targets = {12, 7};
  for (Vertex v : inst.task_vertices()) {
    inst.eligibility[v] = {0, 1};
    inst.duration[v] = {{0, 1}, {1, 2}};
  }
  KBestSequencer kb(inst);
  const auto got = first_k(kb, 5);
  const auto all = oracle::all_sequence_costs(inst);
  CHECK(got == std::vector<Cost>(all.begin(), all.begin() + 5));
}

TEST_CASE("anonymous simplification gives the same k-best costs") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    auto inst = oracle::random_instance(6, 6, 0.1, 3, 2, SceneKind::Scene1, 1, 1, seed);
    if (!inst) continue;
    TransformOptions simple;
    simple.simplify_anonymous = true;
    KBestSequencer a(*inst, {}, simple);
    KBestSequencer b(*inst);
    const auto all = oracle::all_sequence_costs(*inst);
    CHECK(first_k(a, 6) == std::vector<Cost>(all.begin(), all.begin() + 6));
    CHECK(first_k(b, 6) == std::vector<Cost>(all.begin(), all.begin() + 6));
  }
}

TEST_CASE("TSPLIB problems and tours round trip") {
  const Instance inst = toy4x4();
  const auto tfg = transform(inst, compute_target_graph(inst));
  ArcConstraints c;
  c.exclude = {{0, 1}};
  const auto p = make_tsplib_atsp("toy", tfg.size(), tfg.arc, c);
  for (Cost w : p.weights) CHECK(w >= 0);
  std::istringstream in(write_tsplib_atsp(p));
  const auto q = read_tsplib_atsp(in);
  CHECK(q.n == p.n);
  CHECK(q.weights == p.weights);
  std::istringstream tin(write_tsplib_tour("toy", {0, 3, 1, 2}));
  CHECK(read_tsplib_tour(tin) == std::vector<int>{0, 3, 1, 2});
}

#ifdef MCPFD_CLI_PATH
TEST_CASE("external backend through the command-line ATSP solver") {
  const Instance inst = toy4x4();
  const auto tfg = transform(inst, compute_target_graph(inst));
  const std::string cmd = std::string("\"") + MCPFD_CLI_PATH + "\" tsplib-solve --problem {problem} --tour {tour}";
  const auto ext = solve_external(tfg, {}, cmd);
  REQUIRE(ext);
  CHECK(ext->cost == tfg.offset + 16);
  const auto direct = solve_sequencing(tfg, {});
  ArcConstraints c;
  c.exclude = {tour_arcs(*direct).front()};
  const auto ext2 = solve_external(tfg, c, cmd);
  const auto bnb2 = solve_sequencing(tfg, c);
  REQUIRE(ext2);
  REQUIRE(bnb2);
  CHECK(ext2->cost == bnb2->cost);
}
#endif
