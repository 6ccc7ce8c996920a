#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "neurocactus/builtins.hpp"
#include "neurocactus/error.hpp"
#include "neurocactus/resilience.hpp"
#include "neurocactus/scenario.hpp"

using namespace neurocactus;
using testing::edge;

namespace {

LoadedScenario macaque() { return load(*builtin_scenario("macaque")); }

DropoutReport audit(const LoadedScenario& s, const DropoutPlan& plan) {
  return dropout_audit(s.graph, s.decomposition, plan, s.scenario.params, 20, 1);
}

SignedDigraph graph(std::vector<std::string> nodes, std::vector<GraphSpec::EdgeSpec> edges,
                    std::vector<std::string> inputs) {
  GraphSpec gs;
  gs.nodes = std::move(nodes);
  gs.edges = std::move(edges);
  for (auto& i : inputs) gs.inputs.push_back({i, 1.0});
  return build_graph(gs);
}

}  // namespace

TEST_SUITE("resilience") {
  TEST_CASE("V1-V3 lesion keeps the macaque network controllable") {
    const auto s = macaque();
    const auto r = audit(s, v1_v3_lesion());
    CHECK(r.used_replacement);
    CHECK(r.inputs_survive);
    CHECK(r.cactus.accepted);
    CHECK(r.stability.holds);
    CHECK(r.structural.controllable());
    CHECK(r.passed());
    CHECK(!r.flags.empty());  // the declared stem itself breaks
    CHECK(r.survivor.node_count() == s.graph.node_count());
    CHECK(r.survivor.edge_count() == s.graph.edge_count() - 2);
  }

  TEST_CASE("cutting the LGN stem edge breaks the cactus") {
    const auto s = macaque();
    DropoutPlan plan;
    plan.name = "cut";
    plan.edges = {{"LGN", "V1"}};
    const auto r = audit(s, plan);
    CHECK_FALSE(r.cactus.accepted);
    CHECK_FALSE(r.passed());
    CHECK_FALSE(r.flags.empty());
  }

  TEST_CASE("empty plan matches the baseline") {
    const auto s = macaque();
    const auto r = audit(s, DropoutPlan{});
    CHECK(r.survivor == s.graph);
    CHECK(r.survivor_decomposition == s.decomposition);
    CHECK(r.flags.empty());
    CHECK(r.passed());
  }

  TEST_CASE("dropping an input node is flagged") {
    const auto s = macaque();
    DropoutPlan plan;
    plan.nodes = {s.graph.label(s.graph.inputs().front().node)};
    const auto r = audit(s, plan);
    CHECK_FALSE(r.inputs_survive);
    CHECK_FALSE(r.passed());
  }

  TEST_CASE("unknown elements and bad masks are rejected") {
    const auto s = macaque();
    DropoutPlan plan;
    plan.nodes = {"nowhere"};
    CHECK_THROWS_AS(resolve_plan(s.graph, plan), GraphError);
    plan.nodes.clear();
    plan.edges = {{"V1", "LGN"}};
    CHECK_THROWS_AS(resolve_plan(s.graph, plan), GraphError);
    plan.edges = {{"LGN", "V1"}};
    plan.schedule = DropoutSchedule::intermittent;
    plan.dropped = {true, false};
    CHECK_THROWS_AS(resolve_plan(s.graph, plan, 3), ModelError);
  }

  TEST_CASE("intermittent masks zero only the dropped slots") {
    const auto s = macaque();
    DropoutPlan plan;
    plan.edges = {{"LGN", "V1"}};
    plan.schedule = DropoutSchedule::intermittent;
    plan.dropped = {false, true, false};
    const auto masks = dropout_masks(s.graph, plan, 3);
    REQUIRE(masks.size() == 3);
    CHECK_FALSE(masks[0].has_value());
    REQUIRE(masks[1].has_value());
    const auto lgn = s.graph.require_node("LGN");
    const auto v1 = s.graph.require_node("V1");
    CHECK((*masks[1])(static_cast<Eigen::Index>(v1), static_cast<Eigen::Index>(lgn)) == 0.0);
    CHECK(masks[1]->sum() == doctest::Approx(static_cast<double>(masks[1]->size()) - 1.0));
  }

  TEST_CASE("single-input cascade: chain into a three-cycle") {
    CascadeSpec spec;
    spec.upstream = graph({"u1", "u2", "u3"}, {edge("u1", "u2", 0.5), edge("u2", "u3", 0.5)}, {"u1"});
    spec.upstream_status = ComponentStatus::known_controllable;
    spec.downstream = graph({"c1", "c2", "c3"},
                            {edge("c1", "c2", 0.5), edge("c2", "c3", 0.5), edge("c3", "c1", -0.4)}, {});
    spec.entries = {0};
    spec.links = {{2, 0}};
    const auto v = cascade_single_input_check(spec);
    CHECK(v.composable);
    REQUIRE(v.composite.has_value());
    CHECK(v.composite->paths == std::vector<std::vector<NodeId>>{{0, 1, 2}});
    CHECK(v.composite->graph.node_count() == 6);
    CHECK(v.composite->graph.inputs().size() == 1);
    CHECK(v.structural.controllable());
  }

  TEST_CASE("single-input cascade without a path is not composable") {
    CascadeSpec spec;
    spec.upstream = graph({"u1", "u2", "u3"}, {edge("u1", "u2", 0.5)}, {"u1"});
    spec.downstream = graph({"d1", "d2"}, {edge("d1", "d2", 0.5)}, {});
    spec.entries = {0};
    spec.links = {{2, 0}};
    const auto v = cascade_single_input_check(spec);
    CHECK_FALSE(v.composable);
    CHECK_FALSE(v.composite.has_value());
    CHECK(v.message.find("no path") != std::string::npos);
  }

  TEST_CASE("uncontrollable upstream still composes along its path") {
    // u1 feeds two sinks u2, u3: the upstream alone has a dilation.
    CascadeSpec spec;
    spec.upstream = graph({"u1", "u2", "u3"}, {edge("u1", "u2", 0.5), edge("u1", "u3", 0.5)}, {"u1"});
    const auto alone = structural_test(StructurePattern::from_graph(spec.upstream));
    CHECK_FALSE(alone.controllable());
    spec.downstream = graph({"d1", "d2"}, {edge("d1", "d2", 0.5)}, {});
    spec.entries = {0};
    spec.links = {{1, 0}};
    const auto v = cascade_single_input_check(spec);
    CHECK(v.composable);
    CHECK(v.composite->upstream_nodes == std::vector<NodeId>{0, 1});
    CHECK(v.structural.controllable());
  }

  TEST_CASE("cascade spec checks") {
    CascadeSpec spec;
    spec.upstream = graph({"u1"}, {}, {"u1"});
    spec.downstream = graph({"d1"}, {}, {});
    spec.entries = {0};
    spec.links = {{3, 0}};
    CHECK_THROWS_AS(spec.check(), GraphError);
    spec.links = {{0, 0}};
    spec.entries = {0, 0};
    CHECK_THROWS_AS(cascade_single_input_check(spec), ModelError);
  }

  TEST_CASE("multi-input cascade with disjoint paths") {
    CascadeSpec spec;
    spec.upstream = graph({"a1", "a2", "b1", "b2"}, {edge("a1", "a2", 0.5), edge("b1", "b2", 0.5)},
                          {"a1", "b1"});
    spec.downstream = graph({"e1", "e2", "d"}, {edge("e1", "d", 0.5), edge("e2", "d", 0.5)}, {});
    spec.entries = {0, 1};
    spec.links = {{1, 0}, {3, 1}};
    const auto v = cascade_multi_input_check(spec);
    CHECK(v.sufficient_condition_met);
    REQUIRE(v.disjoint_paths.has_value());
    CHECK(v.disjoint_paths->size() == 2);
    CHECK(v.verdict.composite->graph.inputs().size() == 2);
    CHECK(v.verdict.structural.controllable());
  }

  TEST_CASE("multi-input condition is sufficient, not necessary") {
    // One input reaches both entries through u2, so no disjoint pair exists,
    // yet u1 u2 e1 e2 d is a single stem.
    CascadeSpec spec;
    spec.upstream = graph({"u1", "u2"}, {edge("u1", "u2", 0.5)}, {"u1"});
    spec.downstream = graph({"e1", "e2", "d"}, {edge("e1", "e2", 0.5), edge("e2", "d", 0.5)}, {});
    spec.entries = {0, 1};
    spec.links = {{1, 0}, {1, 1}};
    const auto v = cascade_multi_input_check(spec);
    CHECK_FALSE(v.sufficient_condition_met);
    CHECK(v.verdict.composable);
    CHECK(v.verdict.composite->graph.node_count() == 5);
    CHECK(v.verdict.structural.controllable());
    const auto& g = v.verdict.composite->graph;
    const auto pattern = StructurePattern::from_graph(g);
    CHECK(controllability_rank(*v.verdict.structural.witness_a, *v.verdict.structural.witness_b).rank == 5);
    CHECK(pattern.size() == 5);
  }

  TEST_CASE("multi-input cascade with no paths") {
    CascadeSpec spec;
    spec.upstream = graph({"u1", "u2"}, {}, {"u1"});
    spec.downstream = graph({"e1", "e2"}, {}, {});
    spec.entries = {0, 1};
    spec.links = {{1, 0}, {1, 1}};
    const auto v = cascade_multi_input_check(spec);
    CHECK_FALSE(v.sufficient_condition_met);
    CHECK_FALSE(v.verdict.composable);
    CHECK_FALSE(v.verdict.structural.controllable());
    CHECK(v.verdict.structural.certified_negative);
  }

  TEST_CASE("five-part cascade passes the dynamics audit") {
    const auto fc = five_part_cascade();
    REQUIRE(fc.parts.size() == 5);
    CHECK(std::count_if(fc.parts.begin(), fc.parts.end(),
                        [](const CascadePart& p) { return p.is_pure_cycle(); }) == 1);
    const auto comp = compose_cascade(fc.parts, fc.links);
    ModelParams params;
    InputSignal u;
    for (std::size_t i = 0; i < comp.graph.inputs().size(); ++i) u.channels.push_back(Waveform::sine(2.0, 1.0, 0.3 * i));
    const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(comp.graph.node_count()), 0.5);
    const auto r = cascade_dynamics_audit(fc.parts, comp, params, u, x0, 2.0);
    CHECK(r.cactus.accepted);
    CHECK_FALSE(r.stability_flagged);
    CHECK(r.ranks.size() == 10);
    CHECK(r.all_full_rank);
    CHECK(r.passed());
    CHECK(r.max_in_degree_composite >= r.max_in_degree_parts);
  }

  TEST_CASE("in-degree growth that breaks stability is flagged") {
    const auto fc = five_part_cascade();
    const auto comp = compose_cascade(fc.parts, fc.links);
    ModelParams params;
    // A leak below in-degree times the bound leaves no margin.
    params.leak = static_cast<double>(max_in_degree(comp.graph)) * comp.graph.bounds().max_magnitude() - 0.5;
    InputSignal u;
    u.channels.assign(comp.graph.inputs().size(), Waveform{});
    const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(comp.graph.node_count()));
    const auto r = cascade_dynamics_audit(fc.parts, comp, params, u, x0, 1.0);
    CHECK(r.stability_flagged);
    CHECK(r.ranks.empty());
    CHECK_FALSE(r.passed());
  }
}
