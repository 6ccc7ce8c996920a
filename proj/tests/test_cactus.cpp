#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "neurocactus/analysis.hpp"
#include "neurocactus/builtins.hpp"
#include "neurocactus/cactus.hpp"
#include "neurocactus/error.hpp"
#include "neurocactus/resilience.hpp"

using namespace neurocactus;
using testing::chain_spec;
using testing::edge;

namespace {

bool has_violation(const CactusVerdict& v, const std::string& needle) {
  return std::any_of(v.violations.begin(), v.violations.end(),
                     [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

CascadePart chain_part(const std::string& name, int n, bool input) {
  auto spec = chain_spec(n);
  for (auto& l : spec.nodes) l = name + l;
  for (auto& e : spec.edges) e.src = name + e.src, e.dst = name + e.dst;
  spec.inputs.clear();
  if (input) spec.inputs.push_back({spec.nodes.front(), 1.0});
  spec.outputs = {spec.nodes.back()};
  CascadePart p;
  p.name = name;
  p.graph = build_graph(spec);
  DecompositionSpec d;
  d.stems = {spec.nodes};
  p.decomposition = resolve_decomposition(d, p.graph);
  return p;
}

}  // namespace

TEST_SUITE("cactus") {
  TEST_CASE("builtin decompositions are accepted") {
    for (const auto& name : {"sixteen_node", "macaque", "clustering"}) {
      const auto s = *builtin_scenario(name);
      const auto g = build_graph(s.graph);
      const auto v = validate_generalized_cactus(g, resolve_decomposition(s.decomposition, g));
      CHECK_MESSAGE(v.accepted, name);
    }
  }

  TEST_CASE("single input node alone is a cactus") {
    GraphSpec one;
    one.nodes = {"a"};
    one.inputs = {{"a", 1.0}};
    const auto g = build_graph(one);
    DecompositionSpec d;
    d.stems = {{"a"}};
    CHECK(validate_generalized_cactus(g, resolve_decomposition(d, g)).accepted);
  }

  TEST_CASE("violations are reported") {
    const auto g = build_graph(chain_spec(4));
    SUBCASE("node not spanned") {
      DecompositionSpec d;
      d.stems = {{"1", "2", "3"}};
      const auto v = validate_generalized_cactus(g, resolve_decomposition(d, g));
      CHECK_FALSE(v.accepted);
      CHECK(has_violation(v, "node not spanned: 4"));
    }
    SUBCASE("root without input") {
      DecompositionSpec d;
      d.stems = {{"1", "2"}, {"3", "4"}};
      const auto v = validate_generalized_cactus(g, resolve_decomposition(d, g));
      CHECK_FALSE(v.accepted);
      CHECK(has_violation(v, "root 3 is not an input node"));
    }
    SUBCASE("stem edge missing") {
      DecompositionSpec d;
      d.stems = {{"1", "3", "2", "4"}};
      CHECK_FALSE(validate_generalized_cactus(g, resolve_decomposition(d, g)).accepted);
    }
    SUBCASE("unknown label") {
      DecompositionSpec d;
      d.stems = {{"1", "x"}};
      CHECK_THROWS_AS(resolve_decomposition(d, g), GraphError);
    }
  }

  TEST_CASE("bud meeting the stem outside its dangling node is rejected") {
    GraphSpec s = chain_spec(3);
    s.nodes.push_back("4");
    s.edges.push_back(edge("2", "4", .5));
    s.edges.push_back(edge("4", "3", .5));
    s.edges.push_back(edge("3", "4", .5));
    const auto g = build_graph(s);
    DecompositionSpec d;
    d.stems = {{"1", "2", "3"}};
    d.buds = {{{"4", "3"}, "2", "4", "2"}};
    CHECK_FALSE(validate_generalized_cactus(g, resolve_decomposition(d, g)).accepted);
  }

  TEST_CASE("every node of an accepted decomposition is reachable from a root") {
    const auto s = *builtin_scenario("sixteen_node");
    const auto g = build_graph(s.graph);
    const auto d = resolve_decomposition(s.decomposition, g);
    const auto r = reachable_from(g, d.roots);
    CHECK(std::all_of(r.begin(), r.end(), [](bool b) { return b; }));
  }

  TEST_CASE("restriction flags dropped bud nodes and sole roots") {
    const auto s = *builtin_scenario("sixteen_node");
    const auto g = build_graph(s.graph);
    const auto d = resolve_decomposition(s.decomposition, g);
    const NodeId n8 = g.require_node("8");
    const auto survivor = drop_elements(g, {n8}, {});
    const auto r = restrict_decomposition(g, d, survivor, {n8}, {});
    CHECK_FALSE(r.flags.empty());

    const NodeId n1 = g.require_node("1");
    const auto r2 = restrict_decomposition(g, d, drop_elements(g, {n1}, {}), {n1}, {});
    CHECK(std::any_of(r2.flags.begin(), r2.flags.end(),
                      [](const std::string& f) { return f.find("sole root") != std::string::npos; }));
  }

  TEST_CASE("compose_cascade: one part, no links, is unchanged") {
    const auto p = chain_part("a", 3, true);
    const auto c = compose_cascade({p}, {});
    CHECK(c.graph.node_count() == 3);
    CHECK(c.graph.edge_count() == 2);
    CHECK(validate_generalized_cactus(c.graph, c.decomposition).accepted);
  }

  TEST_CASE("compose_cascade prolongs stems and rejects fan-out") {
    const auto a = chain_part("a", 3, true), b = chain_part("b", 2, false), c = chain_part("c", 2, false);
    const auto comp = compose_cascade({a, b}, {{0, 2, 1, 0}});
    CHECK(comp.graph.node_count() == 5);
    CHECK(comp.graph.inputs().size() == 1);
    CHECK(comp.decomposition.stems.size() == 1);
    CHECK(validate_generalized_cactus(comp.graph, comp.decomposition).accepted);

    CHECK_THROWS_AS(compose_cascade({a, b, c}, {{0, 2, 1, 0}, {0, 2, 2, 0}}), GraphError);
    CHECK_THROWS_AS(compose_cascade({a, b}, {}), GraphError);  // b has neither link nor input
  }

  TEST_CASE("five-part cascade validates") {
    const auto f = five_part_cascade();
    CHECK(f.parts.size() == 5);
    const auto c = compose_cascade(f.parts, f.links);
    const auto v = validate_generalized_cactus(c.graph, c.decomposition);
    CHECK(v.accepted);
    CHECK(c.graph.inputs().size() == 2);
  }

  TEST_CASE("random chain cascades stay generalized cacti") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 50; ++trial) {
      const int parts = 2 + static_cast<int>(gen() % 4);
      std::vector<CascadePart> ps;
      std::vector<CascadeLink> links;
      for (int i = 0; i < parts; ++i) {
        const bool fed = i == 0 || gen() % 3 == 0;
        ps.push_back(chain_part("p" + std::to_string(i) + "_", 1 + static_cast<int>(gen() % 4), fed));
        if (!fed) {
          const auto from = static_cast<std::size_t>(i - 1);
          links.push_back({from, ps[from].extremity(), static_cast<std::size_t>(i), 0});
        }
      }
      const auto c = compose_cascade(ps, links);
      CHECK(validate_generalized_cactus(c.graph, c.decomposition).accepted);
    }
  }

  TEST_CASE("disjoint input paths") {
    SUBCASE("two parallel chains feeding two entries") {
      GraphSpec s;
      s.nodes = {"a1", "a2", "b1", "b2"};
      s.edges = {edge("a1", "a2", .5), edge("b1", "b2", .5)};
      s.inputs = {{"a1", 1}, {"b1", 1}};
      const auto g = build_graph(s);
      const auto p = find_disjoint_input_paths(g, {1, 3});
      REQUIRE(p);
      CHECK((*p)[0] == std::vector<NodeId>{0, 1});
      CHECK((*p)[1] == std::vector<NodeId>{2, 3});
    }
    SUBCASE("single chain feeding two entries") {
      const auto g = build_graph(chain_spec(3));
      CHECK_FALSE(find_disjoint_input_paths(g, {1, 2}));
    }
  }
}
