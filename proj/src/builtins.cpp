#include "neurocactus/builtins.hpp"

#include <filesystem>
#include <numbers>

#include "neurocactus/error.hpp"

namespace neurocactus {

namespace {

struct E {
  const char* src;
  const char* dst;
  double w;  // negative = inhibitory
};

void add_edges(GraphSpec& g, std::initializer_list<E> edges) {
  for (const auto& e : edges) {
    g.edges.push_back({e.src, e.dst, e.w < 0 ? EdgeSign::inhibitory : EdgeSign::excitatory, e.w});
  }
}

Scenario sixteen_node() {
  Scenario s;
  s.name = "sixteen_node";
  s.description =
      "Two-cactus 16-neuron network driven at nodes 1 and 10 by 5 sin t and -5 cos t. "
      "Edge set authored to match the published parameters (max in-degree 4).";
  auto& g = s.graph;
  for (int i = 1; i <= 16; ++i) g.nodes.push_back(std::to_string(i));
  add_edges(g, {{"1", "2", .8},   {"2", "3", .7},   {"3", "4", .9},   {"4", "5", .6},
                {"5", "6", .8},   {"4", "7", .5},   {"7", "4", -.4},  {"7", "8", .7},
                {"8", "9", .6},   {"9", "7", .5},   {"10", "11", .8}, {"11", "12", .7},
                {"12", "13", .9}, {"11", "14", .6}, {"14", "11", -.3}, {"14", "15", .7},
                {"15", "16", .5}, {"16", "14", .6}, {"6", "12", .4},  {"13", "5", .3},
                {"8", "5", -.5},  {"6", "5", -.6},  {"3", "2", -.3},  {"16", "3", .2},
                {"9", "15", -.2}, {"12", "1", -.4}});
  g.inputs = {{"1", 1.0}, {"10", 1.0}};
  g.outputs = {"6", "13"};

  auto& d = s.decomposition;
  d.stems = {{"1", "2", "3", "4", "5", "6"}, {"10", "11", "12", "13"}};
  d.buds = {{{"7", "8", "9"}, "4", "7", "4"}, {{"14", "15", "16"}, "11", "14", "11"}};
  d.cross_links = {{"7", "4"},  {"14", "11"}, {"6", "12"},  {"13", "5"}, {"8", "5"},
                   {"6", "5"},  {"3", "2"},   {"16", "3"},  {"9", "15"}, {"12", "1"}};

  s.params.leak = 5.0;
  s.params.u_max = 5.0;
  s.inputs = {{"1", Waveform::sine(5.0, 1.0, 0.0)},
              {"10", Waveform::sine(-5.0, 1.0, std::numbers::pi / 2)}};
  s.x0.assign(16, 1.0);
  s.horizon = 40.0;
  s.seed = 1;
  return s;
}

GraphSpec macaque_graph() {
  GraphSpec g;
  g.nodes = {"SC", "MD",      "FEF",     "PF",      "IT",  "TEO", "LGN", "V1",
             "V3", "MT/MST", "AIP/VIP", "LIP/MIP", "PMd", "V2",  "V4",  "PL"};
  // Solid pathway edges, +-0.5.
  add_edges(g, {{"SC", "MD", .5},          {"MD", "FEF", .5},   {"FEF", "PF", .5},
                {"PF", "IT", .5},          {"IT", "TEO", .5},   {"LGN", "V1", .5},
                {"V1", "V3", .5},          {"V3", "MT/MST", .5}, {"MT/MST", "AIP/VIP", .5},
                {"AIP/VIP", "LIP/MIP", .5}, {"LIP/MIP", "PMd", .5}, {"V1", "V2", .5},
                {"V2", "V1", -.5},         {"V2", "V4", .5},    {"V4", "PL", .5},
                {"PL", "V2", .5},          {"V4", "V2", -.5},   {"PL", "V4", -.5},
                {"V2", "PL", -.5}});
  // Assumed secondary connections, +-0.2 (see data/scenarios/README.md).
  add_edges(g, {{"V3", "V1", -.2},     {"V2", "V3", .2},      {"V4", "IT", .2},
                {"MT/MST", "FEF", .2}, {"LIP/MIP", "FEF", .2}, {"PF", "PMd", .2},
                {"FEF", "SC", -.2},    {"IT", "V4", -.2},     {"PMd", "LIP/MIP", -.2},
                {"MT/MST", "V3", -.2}, {"PL", "MT/MST", .2},  {"SC", "PL", .2}});
  g.inputs = {{"SC", 1.0}, {"LGN", 1.0}};
  g.outputs = {"TEO", "PMd"};
  return g;
}

DecompositionSpec macaque_decomposition() {
  DecompositionSpec d;
  d.stems = {{"SC", "MD", "FEF", "PF", "IT", "TEO"},
             {"LGN", "V1", "V3", "MT/MST", "AIP/VIP", "LIP/MIP", "PMd"}};
  d.buds = {{{"V2", "V4", "PL"}, "V1", "V2", "V1"}};
  d.cross_links = {{"V2", "V1"},      {"V4", "V2"},     {"PL", "V4"},     {"V2", "PL"},
                   {"V3", "V1"},      {"V2", "V3"},     {"V4", "IT"},     {"MT/MST", "FEF"},
                   {"LIP/MIP", "FEF"}, {"PF", "PMd"},   {"FEF", "SC"},    {"IT", "V4"},
                   {"PMd", "LIP/MIP"}, {"MT/MST", "V3"}, {"PL", "MT/MST"}, {"SC", "PL"}};
  return d;
}

Scenario macaque() {
  Scenario s;
  s.name = "macaque";
  s.description =
      "Macaque visual pathways (SC and LGN streams joined by a V2/V4/PL bud), "
      "unit constant stimulation at SC and LGN for 6 s.";
  s.graph = macaque_graph();
  s.decomposition = macaque_decomposition();
  s.params.leak = 5.0;
  s.params.u_max = 1.0;
  s.inputs = {{"SC", Waveform::constant(1.0)}, {"LGN", Waveform::constant(1.0)}};
  s.x0.assign(16, 0.0);
  s.horizon = 6.0;
  s.seed = 1;
  return s;
}

Scenario macaque_lesioned() {
  Scenario s = macaque();
  s.name = "macaque_lesioned";
  s.description = "macaque with both V1 <-> V3 connections permanently removed.";
  s.dropout = v1_v3_lesion();
  return s;
}

Scenario clustering() {
  Scenario s = macaque();
  s.name = "clustering";
  s.description =
      "Sequential presentation of 2-D points as constant SC/LGN stimulation with PMd as readout. "
      "Adds a direct FEF -> PMd connection and drops the dead zone so both streams reach PMd.";
  add_edges(s.graph, {{"FEF", "PMd", .2}});
  s.decomposition.cross_links.emplace_back("FEF", "PMd");
  s.params.leak = 4.0;
  s.params.threshold = 0.0;
  // Faster forgetting and gentler Hebbian steps: weights settle within one dwell.
  s.params.decay_pos = 0.8;
  s.params.decay_neg = 0.8;
  s.params.phi_scale = 0.1;
  s.params.u_max = 12.0;
  s.inputs = {{"SC", Waveform::constant(0.0)}, {"LGN", Waveform::constant(0.0)}};
  s.horizon = 6.0;
  s.audits.ranks = false;
  ClusterConfig c;
  c.stimulus_nodes = {"SC", "LGN"};
  c.readout = "PMd";
  c.dwell = 6.0;
  c.k = 3;
  c.dataset.points = 300;
  c.dataset.centers = {{1.0, 1.0}, {4.0, 4.0}, {7.0, 7.0}};
  c.dataset.sigma = 0.5;
  c.dataset.seed = 7;
  s.cluster = c;
  return s;
}

}  // namespace

DropoutPlan v1_v3_lesion() {
  DropoutPlan p;
  p.name = "V1-V3 lesion";
  p.edges = {{"V1", "V3"}, {"V3", "V1"}};
  p.schedule = DropoutSchedule::permanent;
  DecompositionSpec r;
  r.stems = {{"SC", "MD", "FEF", "PF", "IT", "TEO"},
             {"LGN", "V1", "V2", "V3", "MT/MST", "AIP/VIP", "LIP/MIP", "PMd"}};
  r.buds = {{{"V4", "PL"}, "V2", "V4", "V2"}};
  p.replacement = r;
  return p;
}

std::vector<Scenario> builtin_scenarios() {
  return {sixteen_node(), macaque(), macaque_lesioned(), clustering()};
}

std::vector<std::string> builtin_names() {
  return {"sixteen_node", "macaque", "macaque_lesioned", "clustering"};
}

std::optional<Scenario> builtin_scenario(const std::string& name) {
  for (auto& s : builtin_scenarios()) {
    if (s.name == name) return s;
  }
  return std::nullopt;
}

Scenario resolve_scenario(const std::string& name_or_path) {
  if (auto s = builtin_scenario(name_or_path)) return *s;
  if (!std::filesystem::exists(name_or_path)) {
    throw ScenarioError("", "'" + name_or_path + "' is neither a builtin scenario nor a readable file");
  }
  return parse_scenario_file(name_or_path);
}

}  // namespace neurocactus
