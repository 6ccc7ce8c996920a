#include "neurocactus/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "neurocactus/error.hpp"

namespace neurocactus {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ScenarioError(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ScenarioError(join(path, it.key()), "unknown field");
  }
}

const json& need(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ScenarioError(join(path, key), "missing required field");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ScenarioError(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ScenarioError(path, "expected a finite number");
  return d;
}

std::uint64_t unsigned_int(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ScenarioError(path, "expected a non-negative integer");
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) throw ScenarioError(path, "expected a string");
  return v.get<std::string>();
}

bool boolean(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ScenarioError(path, "expected true or false");
  return v.get<bool>();
}

const json& array(const json& v, const std::string& path) {
  if (!v.is_array()) throw ScenarioError(path, "expected an array");
  return v;
}

std::vector<std::string> strings(const json& v, const std::string& path) {
  std::vector<std::string> out;
  const auto& arr = array(v, path);
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(text(arr[i], at(path, i)));
  return out;
}

std::pair<std::string, std::string> label_pair(const json& v, const std::string& path) {
  const auto& arr = array(v, path);
  if (arr.size() != 2) throw ScenarioError(path, "expected [from, to]");
  return {text(arr[0], at(path, 0)), text(arr[1], at(path, 1))};
}

double number_or(const json& obj, const std::string& path, const char* key, double fallback) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, join(path, key));
}

json parse_json(const std::string& s) {
  try {
    return json::parse(s);
  } catch (const json::parse_error& e) {
    throw ScenarioError("", std::string("malformed JSON: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("", "cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- graph

GraphSpec read_graph(const json& j, const std::string& path) {
  only_keys(j, path, {"nodes", "edges", "bounds", "inputs", "outputs"});
  GraphSpec g;
  g.nodes = strings(need(j, path, "nodes"), join(path, "nodes"));
  const std::string ep = join(path, "edges");
  const auto& edges = array(need(j, path, "edges"), ep);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string p = at(ep, i);
    only_keys(edges[i], p, {"src", "dst", "sign", "w"});
    GraphSpec::EdgeSpec e;
    e.src = text(need(edges[i], p, "src"), join(p, "src"));
    e.dst = text(need(edges[i], p, "dst"), join(p, "dst"));
    const std::string sign = text(need(edges[i], p, "sign"), join(p, "sign"));
    if (sign == "+") {
      e.sign = EdgeSign::excitatory;
    } else if (sign == "-") {
      e.sign = EdgeSign::inhibitory;
    } else {
      throw ScenarioError(join(p, "sign"), "expected \"+\" or \"-\", got \"" + sign + "\"");
    }
    e.weight = number(need(edges[i], p, "w"), join(p, "w"));
    g.edges.push_back(std::move(e));
  }
  if (auto it = j.find("bounds"); it != j.end()) {
    const std::string bp = join(path, "bounds");
    only_keys(*it, bp, {"pos_lo", "pos_hi", "neg_lo", "neg_hi"});
    g.bounds.pos_lo = number(need(*it, bp, "pos_lo"), join(bp, "pos_lo"));
    g.bounds.pos_hi = number(need(*it, bp, "pos_hi"), join(bp, "pos_hi"));
    g.bounds.neg_lo = number(need(*it, bp, "neg_lo"), join(bp, "neg_lo"));
    g.bounds.neg_hi = number(need(*it, bp, "neg_hi"), join(bp, "neg_hi"));
  }
  const std::string ip = join(path, "inputs");
  const auto& inputs = array(need(j, path, "inputs"), ip);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const std::string p = at(ip, i);
    only_keys(inputs[i], p, {"node", "gain"});
    g.inputs.push_back({text(need(inputs[i], p, "node"), join(p, "node")),
                        number_or(inputs[i], p, "gain", 1.0)});
  }
  if (auto it = j.find("outputs"); it != j.end()) g.outputs = strings(*it, join(path, "outputs"));
  return g;
}

ojson write_graph(const GraphSpec& g) {
  ojson j;
  j["nodes"] = g.nodes;
  ojson edges = ojson::array();
  for (const auto& e : g.edges) {
    ojson r;
    r["src"] = e.src;
    r["dst"] = e.dst;
    r["sign"] = e.sign == EdgeSign::excitatory ? "+" : "-";
    r["w"] = e.weight;
    edges.push_back(std::move(r));
  }
  j["edges"] = std::move(edges);
  j["bounds"] = {{"pos_lo", g.bounds.pos_lo},
                 {"pos_hi", g.bounds.pos_hi},
                 {"neg_lo", g.bounds.neg_lo},
                 {"neg_hi", g.bounds.neg_hi}};
  ojson inputs = ojson::array();
  for (const auto& in : g.inputs) inputs.push_back({{"node", in.node}, {"gain", in.gain}});
  j["inputs"] = std::move(inputs);
  j["outputs"] = g.outputs;
  return j;
}

// ---- decomposition

DecompositionSpec read_decomposition(const json& j, const std::string& path) {
  only_keys(j, path, {"stems", "buds", "roots", "extremities", "cross_links"});
  DecompositionSpec d;
  const std::string sp = join(path, "stems");
  const auto& stems = array(need(j, path, "stems"), sp);
  for (std::size_t i = 0; i < stems.size(); ++i) d.stems.push_back(strings(stems[i], at(sp, i)));
  if (auto it = j.find("buds"); it != j.end()) {
    const std::string bp = join(path, "buds");
    const auto& buds = array(*it, bp);
    for (std::size_t i = 0; i < buds.size(); ++i) {
      const std::string p = at(bp, i);
      only_keys(buds[i], p, {"cycle", "edge", "dangling"});
      DecompositionSpec::BudSpec b;
      b.cycle = strings(need(buds[i], p, "cycle"), join(p, "cycle"));
      std::tie(b.edge_from, b.edge_to) = label_pair(need(buds[i], p, "edge"), join(p, "edge"));
      b.dangling = text(need(buds[i], p, "dangling"), join(p, "dangling"));
      d.buds.push_back(std::move(b));
    }
  }
  if (auto it = j.find("roots"); it != j.end()) d.roots = strings(*it, join(path, "roots"));
  if (auto it = j.find("extremities"); it != j.end()) d.extremities = strings(*it, join(path, "extremities"));
  if (auto it = j.find("cross_links"); it != j.end()) {
    const std::string cp = join(path, "cross_links");
    const auto& links = array(*it, cp);
    for (std::size_t i = 0; i < links.size(); ++i) d.cross_links.push_back(label_pair(links[i], at(cp, i)));
  }
  return d;
}

ojson write_decomposition(const DecompositionSpec& d) {
  ojson j;
  j["stems"] = d.stems;
  ojson buds = ojson::array();
  for (const auto& b : d.buds) {
    buds.push_back({{"cycle", b.cycle}, {"edge", {b.edge_from, b.edge_to}}, {"dangling", b.dangling}});
  }
  j["buds"] = std::move(buds);
  if (!d.roots.empty()) j["roots"] = d.roots;
  if (!d.extremities.empty()) j["extremities"] = d.extremities;
  ojson links = ojson::array();
  for (const auto& [s, t] : d.cross_links) links.push_back({s, t});
  j["cross_links"] = std::move(links);
  return j;
}

// ---- params, inputs

ModelParams read_params(const json& j, const std::string& path) {
  only_keys(j, path, {"c_n", "c_a_plus", "c_a_minus", "theta", "tau", "dt", "phi", "phi_scale", "u_max"});
  ModelParams p;
  p.leak = number(need(j, path, "c_n"), join(path, "c_n"));
  p.decay_pos = number(need(j, path, "c_a_plus"), join(path, "c_a_plus"));
  p.decay_neg = number(need(j, path, "c_a_minus"), join(path, "c_a_minus"));
  p.threshold = number(need(j, path, "theta"), join(path, "theta"));
  p.slot = number(need(j, path, "tau"), join(path, "tau"));
  p.dt = number(need(j, path, "dt"), join(path, "dt"));
  p.u_max = number(need(j, path, "u_max"), join(path, "u_max"));
  p.phi_scale = number_or(j, path, "phi_scale", 1.0);
  if (auto it = j.find("phi"); it != j.end()) {
    const std::string name = text(*it, join(path, "phi"));
    if (name == "tanh") {
      p.phi = PhiKind::tanh;
    } else if (name == "softsign") {
      p.phi = PhiKind::softsign;
    } else {
      throw ScenarioError(join(path, "phi"), "expected \"tanh\" or \"softsign\"");
    }
  }
  return p;
}

ojson write_params(const ModelParams& p) {
  ojson j;
  j["c_n"] = p.leak;
  j["c_a_plus"] = p.decay_pos;
  j["c_a_minus"] = p.decay_neg;
  j["theta"] = p.threshold;
  j["tau"] = p.slot;
  j["dt"] = p.dt;
  j["phi"] = p.phi == PhiKind::tanh ? "tanh" : "softsign";
  j["phi_scale"] = p.phi_scale;
  j["u_max"] = p.u_max;
  return j;
}

InputAssignment read_input(const json& j, const std::string& path) {
  only_keys(j, path, {"node", "kind", "value", "amp", "freq", "phase"});
  InputAssignment a;
  a.node = text(need(j, path, "node"), join(path, "node"));
  const std::string kind = text(need(j, path, "kind"), join(path, "kind"));
  if (kind == "zero") {
    a.wave = Waveform{};
  } else if (kind == "constant") {
    a.wave = Waveform::constant(number(need(j, path, "value"), join(path, "value")));
  } else if (kind == "sine") {
    a.wave = Waveform::sine(number(need(j, path, "amp"), join(path, "amp")),
                            number(need(j, path, "freq"), join(path, "freq")),
                            number_or(j, path, "phase", 0.0));
  } else {
    throw ScenarioError(join(path, "kind"), "expected \"zero\", \"constant\" or \"sine\"");
  }
  return a;
}

ojson write_input(const InputAssignment& a) {
  ojson j;
  j["node"] = a.node;
  switch (a.wave.kind) {
    case WaveKind::zero:
      j["kind"] = "zero";
      break;
    case WaveKind::constant:
      j["kind"] = "constant";
      j["value"] = a.wave.amp;
      break;
    case WaveKind::sine:
      j["kind"] = "sine";
      j["amp"] = a.wave.amp;
      j["freq"] = a.wave.freq;
      j["phase"] = a.wave.phase;
      break;
  }
  return j;
}

// ---- plan, cluster

DropoutPlan read_plan(const json& j, const std::string& path) {
  only_keys(j, path, {"name", "nodes", "edges", "schedule", "dropped", "replacement"});
  DropoutPlan p;
  if (auto it = j.find("name"); it != j.end()) p.name = text(*it, join(path, "name"));
  if (auto it = j.find("nodes"); it != j.end()) p.nodes = strings(*it, join(path, "nodes"));
  if (auto it = j.find("edges"); it != j.end()) {
    const std::string ep = join(path, "edges");
    const auto& edges = array(*it, ep);
    for (std::size_t i = 0; i < edges.size(); ++i) p.edges.push_back(label_pair(edges[i], at(ep, i)));
  }
  if (auto it = j.find("schedule"); it != j.end()) {
    const std::string s = text(*it, join(path, "schedule"));
    if (s == "permanent") {
      p.schedule = DropoutSchedule::permanent;
    } else if (s == "intermittent") {
      p.schedule = DropoutSchedule::intermittent;
    } else {
      throw ScenarioError(join(path, "schedule"), "expected \"permanent\" or \"intermittent\"");
    }
  }
  if (auto it = j.find("dropped"); it != j.end()) {
    const std::string dp = join(path, "dropped");
    const auto& arr = array(*it, dp);
    for (std::size_t i = 0; i < arr.size(); ++i) p.dropped.push_back(boolean(arr[i], at(dp, i)));
  }
  if (p.schedule == DropoutSchedule::permanent && !p.dropped.empty()) {
    throw ScenarioError(join(path, "dropped"), "only intermittent plans carry a slot mask");
  }
  if (auto it = j.find("replacement"); it != j.end()) {
    p.replacement = read_decomposition(*it, join(path, "replacement"));
  }
  return p;
}

ojson write_plan_json(const DropoutPlan& p) {
  ojson j;
  j["name"] = p.name;
  j["nodes"] = p.nodes;
  ojson edges = ojson::array();
  for (const auto& [s, t] : p.edges) edges.push_back({s, t});
  j["edges"] = std::move(edges);
  j["schedule"] = p.schedule == DropoutSchedule::permanent ? "permanent" : "intermittent";
  if (p.schedule == DropoutSchedule::intermittent) {
    ojson mask = ojson::array();
    for (bool b : p.dropped) mask.push_back(b);
    j["dropped"] = std::move(mask);
  }
  if (p.replacement) j["replacement"] = write_decomposition(*p.replacement);
  return j;
}

ClusterConfig read_cluster(const json& j, const std::string& path) {
  only_keys(j, path, {"stimulus_nodes", "readout", "dwell", "k", "readout_fraction", "steady_tolerance", "dataset"});
  ClusterConfig c;
  c.stimulus_nodes = strings(need(j, path, "stimulus_nodes"), join(path, "stimulus_nodes"));
  c.readout = text(need(j, path, "readout"), join(path, "readout"));
  c.dwell = number(need(j, path, "dwell"), join(path, "dwell"));
  c.k = static_cast<std::size_t>(unsigned_int(need(j, path, "k"), join(path, "k")));
  c.readout_fraction = number_or(j, path, "readout_fraction", 0.1);
  c.steady_tolerance = number_or(j, path, "steady_tolerance", 1e-2);
  if (auto it = j.find("dataset"); it != j.end()) {
    const std::string dp = join(path, "dataset");
    only_keys(*it, dp, {"points", "centers", "sigma", "seed"});
    c.dataset.points = static_cast<std::size_t>(unsigned_int(need(*it, dp, "points"), join(dp, "points")));
    const std::string cp = join(dp, "centers");
    const auto& centers = array(need(*it, dp, "centers"), cp);
    for (std::size_t i = 0; i < centers.size(); ++i) {
      const std::string p = at(cp, i);
      const auto& xy = array(centers[i], p);
      if (xy.size() != 2) throw ScenarioError(p, "expected [x, y]");
      c.dataset.centers.emplace_back(number(xy[0], at(p, 0)), number(xy[1], at(p, 1)));
    }
    c.dataset.sigma = number(need(*it, dp, "sigma"), join(dp, "sigma"));
    c.dataset.seed = unsigned_int(need(*it, dp, "seed"), join(dp, "seed"));
  }
  return c;
}

ojson write_cluster(const ClusterConfig& c) {
  ojson j;
  j["stimulus_nodes"] = c.stimulus_nodes;
  j["readout"] = c.readout;
  j["dwell"] = c.dwell;
  j["k"] = c.k;
  j["readout_fraction"] = c.readout_fraction;
  j["steady_tolerance"] = c.steady_tolerance;
  ojson centers = ojson::array();
  for (const auto& [x, y] : c.dataset.centers) centers.push_back({x, y});
  j["dataset"] = {{"points", c.dataset.points},
                  {"centers", std::move(centers)},
                  {"sigma", c.dataset.sigma},
                  {"seed", c.dataset.seed}};
  return j;
}

Scenario read_scenario(const json& j) {
  only_keys(j, "", {"schema", "name", "description", "graph", "decomposition", "params", "inputs", "x0",
                    "horizon", "seed", "record_stride", "structural_trials", "audits", "dropout", "cluster"});
  const auto version = unsigned_int(need(j, "", "schema"), "schema");
  if (version != kScenarioSchema) {
    throw ScenarioError("schema", "unsupported schema version " + std::to_string(version));
  }
  Scenario s;
  s.name = text(need(j, "", "name"), "name");
  if (auto it = j.find("description"); it != j.end()) s.description = text(*it, "description");
  s.graph = read_graph(need(j, "", "graph"), "graph");
  s.decomposition = read_decomposition(need(j, "", "decomposition"), "decomposition");
  s.params = read_params(need(j, "", "params"), "params");
  const auto& inputs = array(need(j, "", "inputs"), "inputs");
  for (std::size_t i = 0; i < inputs.size(); ++i) s.inputs.push_back(read_input(inputs[i], at("inputs", i)));
  const auto& x0 = need(j, "", "x0");
  if (x0.is_number()) {
    s.x0.assign(s.graph.nodes.size(), number(x0, "x0"));
  } else {
    const auto& arr = array(x0, "x0");
    for (std::size_t i = 0; i < arr.size(); ++i) s.x0.push_back(number(arr[i], at("x0", i)));
  }
  s.horizon = number(need(j, "", "horizon"), "horizon");
  s.seed = unsigned_int(need(j, "", "seed"), "seed");
  if (auto it = j.find("record_stride"); it != j.end()) {
    s.record_stride = static_cast<std::size_t>(unsigned_int(*it, "record_stride"));
  }
  if (auto it = j.find("structural_trials"); it != j.end()) {
    s.structural_trials = static_cast<std::size_t>(unsigned_int(*it, "structural_trials"));
  }
  if (auto it = j.find("audits"); it != j.end()) {
    only_keys(*it, "audits", {"cactus", "stability", "hurwitz", "ranks", "structural"});
    auto flag = [&](const char* key, bool& out) {
      if (auto f = it->find(key); f != it->end()) out = boolean(*f, join("audits", key));
    };
    flag("cactus", s.audits.cactus);
    flag("stability", s.audits.stability);
    flag("hurwitz", s.audits.hurwitz);
    flag("ranks", s.audits.ranks);
    flag("structural", s.audits.structural);
  }
  if (auto it = j.find("dropout"); it != j.end()) s.dropout = read_plan(*it, "dropout");
  if (auto it = j.find("cluster"); it != j.end()) s.cluster = read_cluster(*it, "cluster");
  return s;
}

}  // namespace

Scenario parse_scenario_text(const std::string& text) {
  Scenario s = read_scenario(parse_json(text));
  load(s);
  return s;
}

Scenario parse_scenario_file(const std::string& path) { return parse_scenario_text(read_file(path)); }

std::string write_scenario(const Scenario& s) {
  ojson j;
  j["schema"] = kScenarioSchema;
  j["name"] = s.name;
  j["description"] = s.description;
  j["graph"] = write_graph(s.graph);
  j["decomposition"] = write_decomposition(s.decomposition);
  j["params"] = write_params(s.params);
  ojson inputs = ojson::array();
  for (const auto& a : s.inputs) inputs.push_back(write_input(a));
  j["inputs"] = std::move(inputs);
  j["x0"] = s.x0;
  j["horizon"] = s.horizon;
  j["seed"] = s.seed;
  j["record_stride"] = s.record_stride;
  j["structural_trials"] = s.structural_trials;
  j["audits"] = {{"cactus", s.audits.cactus},
                 {"stability", s.audits.stability},
                 {"hurwitz", s.audits.hurwitz},
                 {"ranks", s.audits.ranks},
                 {"structural", s.audits.structural}};
  if (s.dropout) j["dropout"] = write_plan_json(*s.dropout);
  if (s.cluster) j["cluster"] = write_cluster(*s.cluster);
  return j.dump(2) + "\n";
}

LoadedScenario load(const Scenario& s) {
  LoadedScenario out;
  out.scenario = s;
  try {
    out.graph = build_graph(s.graph);
  } catch (const GraphError& e) {
    throw ScenarioError("graph", e.what());
  }
  try {
    out.decomposition = resolve_decomposition(s.decomposition, out.graph);
  } catch (const GraphError& e) {
    throw ScenarioError("decomposition", e.what());
  }
  try {
    s.params.validate();
  } catch (const ModelError& e) {
    throw ScenarioError("params", e.what());
  }
  if (out.graph.has_self_loops()) throw ScenarioError("graph.edges", "self-loops are not allowed in the dynamics");

  std::vector<std::optional<Waveform>> waves(out.graph.inputs().size());
  for (std::size_t i = 0; i < s.inputs.size(); ++i) {
    const std::string p = at("inputs", i) + ".node";
    const auto node = out.graph.node_index(s.inputs[i].node);
    if (!node) throw ScenarioError(p, "unknown node '" + s.inputs[i].node + "'");
    std::optional<std::size_t> channel;
    for (std::size_t k = 0; k < out.graph.inputs().size(); ++k) {
      if (out.graph.inputs()[k].node == *node) channel = k;
    }
    if (!channel) throw ScenarioError(p, "node '" + s.inputs[i].node + "' is not an input node");
    if (waves[*channel]) throw ScenarioError(p, "node '" + s.inputs[i].node + "' assigned twice");
    if (s.inputs[i].wave.peak() > s.params.u_max * (1.0 + 1e-12)) {
      throw ScenarioError(at("inputs", i), "amplitude exceeds params.u_max");
    }
    waves[*channel] = s.inputs[i].wave;
  }
  for (std::size_t k = 0; k < waves.size(); ++k) {
    out.signal.channels.push_back(waves[k].value_or(Waveform{}));
  }

  if (s.x0.size() != out.graph.node_count()) {
    throw ScenarioError("x0", "expected " + std::to_string(out.graph.node_count()) + " entries");
  }
  out.x0 = Eigen::Map<const Eigen::VectorXd>(s.x0.data(), static_cast<Eigen::Index>(s.x0.size()));

  const double slots = s.horizon / s.params.slot;
  if (!(s.horizon > 0.0) || std::abs(slots - std::round(slots)) > 1e-9 * std::max(1.0, slots) ||
      std::round(slots) < 1.0) {
    throw ScenarioError("horizon", "must be a positive multiple of params.tau");
  }
  if (s.record_stride == 0) throw ScenarioError("record_stride", "must be at least 1");
  if (s.structural_trials == 0) throw ScenarioError("structural_trials", "must be at least 1");

  if (s.dropout) {
    try {
      resolve_plan(out.graph, *s.dropout, static_cast<std::size_t>(std::round(slots)));
      if (s.dropout->replacement) {
        const auto r = resolve_plan(out.graph, *s.dropout);
        resolve_decomposition(*s.dropout->replacement, drop_elements(out.graph, r.nodes, r.edges));
      }
    } catch (const Error& e) {
      throw ScenarioError("dropout", e.what());
    }
  }
  if (s.cluster) {
    const auto& c = *s.cluster;
    if (c.stimulus_nodes.size() != 2) throw ScenarioError("cluster.stimulus_nodes", "expected two nodes");
    for (std::size_t i = 0; i < 2; ++i) {
      const auto node = out.graph.node_index(c.stimulus_nodes[i]);
      if (!node || !out.graph.is_input(*node)) {
        throw ScenarioError(at("cluster.stimulus_nodes", i), "must name an input node");
      }
    }
    if (!out.graph.node_index(c.readout)) throw ScenarioError("cluster.readout", "unknown node");
    const double q = c.dwell / s.params.slot;
    if (!(c.dwell > 0.0) || std::abs(q - std::round(q)) > 1e-9 * std::max(1.0, q)) {
      throw ScenarioError("cluster.dwell", "must be a positive multiple of params.tau");
    }
    if (c.k == 0) throw ScenarioError("cluster.k", "must be at least 1");
    if (!(c.readout_fraction > 0.0 && c.readout_fraction <= 1.0)) {
      throw ScenarioError("cluster.readout_fraction", "must lie in (0, 1]");
    }
    if (!(c.dataset.sigma >= 0.0)) throw ScenarioError("cluster.dataset.sigma", "must be >= 0");
  }
  return out;
}

RunSetup prepare_run(const LoadedScenario& s) {
  RunSetup r;
  const auto& sc = s.scenario;
  r.slot_count = static_cast<std::size_t>(std::llround(sc.horizon / sc.params.slot));
  r.graph = s.graph;
  r.signal = s.signal;
  r.x0 = s.x0;
  if (!sc.dropout || sc.dropout->empty()) return r;
  if (sc.dropout->schedule == DropoutSchedule::intermittent) {
    r.masks = dropout_masks(s.graph, *sc.dropout, r.slot_count);
    return r;
  }
  const auto plan = resolve_plan(s.graph, *sc.dropout);
  r.graph = drop_elements(s.graph, plan.nodes, plan.edges);
  r.signal.channels.clear();
  for (std::size_t k = 0; k < s.graph.inputs().size(); ++k) {
    if (!plan.nodes.count(s.graph.inputs()[k].node)) r.signal.channels.push_back(s.signal.channels[k]);
  }
  r.x0.resize(static_cast<Eigen::Index>(r.graph.node_count()));
  Eigen::Index j = 0;
  for (NodeId i = 0; i < s.graph.node_count(); ++i) {
    if (!plan.nodes.count(i)) r.x0[j++] = s.x0[static_cast<Eigen::Index>(i)];
  }
  return r;
}

DropoutPlan parse_plan_text(const std::string& text) { return read_plan(parse_json(text), ""); }
DropoutPlan parse_plan_file(const std::string& path) { return parse_plan_text(read_file(path)); }
std::string write_plan(const DropoutPlan& p) { return write_plan_json(p).dump(2) + "\n"; }

std::uint64_t effective_seed(const Scenario& s) {
  const char* env = std::getenv("NEUROCACTUS_SEED");
  if (!env || !*env) return s.seed;
  std::uint64_t v = 0;
  const char* end = env + std::char_traits<char>::length(env);
  auto [ptr, ec] = std::from_chars(env, end, v);
  if (ec != std::errc() || ptr != end) throw ScenarioError("NEUROCACTUS_SEED", "not an unsigned integer");
  return v;
}

}  // namespace neurocactus
