#include "neurocactus/resilience.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <tuple>

#include "neurocactus/error.hpp"

namespace neurocactus {

ResolvedPlan resolve_plan(const SignedDigraph& g, const DropoutPlan& plan, std::size_t slot_count) {
  ResolvedPlan r;
  for (const auto& l : plan.nodes) r.nodes.insert(g.require_node(l));
  for (const auto& [s, t] : plan.edges) {
    const EdgeKey e{g.require_node(s), g.require_node(t)};
    if (!g.has_edge(e.first, e.second)) throw GraphError("dropout edge " + s + "->" + t + " does not exist");
    r.edges.insert(e);
  }
  if (plan.schedule == DropoutSchedule::intermittent && slot_count > 0 &&
      plan.dropped.size() != slot_count) {
    throw ModelError("intermittent dropout mask has " + std::to_string(plan.dropped.size()) +
                     " entries, expected " + std::to_string(slot_count));
  }
  return r;
}

std::vector<std::optional<Eigen::MatrixXd>> dropout_masks(const SignedDigraph& g,
                                                          const DropoutPlan& plan,
                                                          std::size_t slot_count) {
  std::vector<std::optional<Eigen::MatrixXd>> masks;
  if (plan.schedule != DropoutSchedule::intermittent || plan.empty()) return masks;
  const auto r = resolve_plan(g, plan, slot_count);
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(n, n);
  for (auto v : r.nodes) {
    m.row(static_cast<Eigen::Index>(v)).setZero();
    m.col(static_cast<Eigen::Index>(v)).setZero();
  }
  for (const auto& [s, t] : r.edges) m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)) = 0.0;
  masks.resize(slot_count);
  for (std::size_t p = 0; p < slot_count; ++p) {
    if (plan.dropped[p]) masks[p] = m;
  }
  return masks;
}

DropoutReport dropout_audit(const SignedDigraph& g, const CactusDecomposition& d,
                            const DropoutPlan& plan, const ModelParams& params, std::size_t trials,
                            std::uint64_t seed) {
  const auto r = resolve_plan(g, plan);
  DropoutReport rep;
  rep.survivor = drop_elements(g, r.nodes, r.edges);
  rep.inputs_survive = std::none_of(g.inputs().begin(), g.inputs().end(),
                                    [&](const InputChannel& c) { return r.nodes.count(c.node) > 0; });
  auto restricted = restrict_decomposition(g, d, rep.survivor, r.nodes, r.edges);
  rep.flags = std::move(restricted.flags);
  if (!rep.inputs_survive) rep.flags.push_back("an input node was dropped");
  if (plan.replacement) {
    rep.survivor_decomposition = resolve_decomposition(*plan.replacement, rep.survivor);
    rep.used_replacement = true;
  } else {
    rep.survivor_decomposition = std::move(restricted.decomposition);
  }
  rep.cactus = validate_generalized_cactus(rep.survivor, rep.survivor_decomposition);
  rep.stability = stability_condition(rep.survivor, params);
  rep.structural = structural_test(StructurePattern::from_graph(rep.survivor), trials, seed);
  return rep;
}

void CascadeSpec::check() const {
  for (auto e : entries) {
    if (e >= downstream.node_count()) throw GraphError("cascade entry node out of range");
  }
  for (const auto& [s, t] : links) {
    if (s >= upstream.node_count()) throw GraphError("cascade link source out of range");
    if (std::find(entries.begin(), entries.end(), t) == entries.end()) {
      throw GraphError("cascade link must end at a downstream entry node");
    }
  }
  if (!(upstream.bounds() == downstream.bounds())) {
    throw GraphError("cascade components must share weight bounds");
  }
}

namespace {

// BFS over `adj` from the sorted sources; returns parent links.
std::vector<std::optional<NodeId>> bfs_parents(const std::vector<std::vector<NodeId>>& adj,
                                               const std::vector<NodeId>& sources,
                                               std::vector<bool>& seen) {
  std::vector<std::optional<NodeId>> parent(adj.size());
  seen.assign(adj.size(), false);
  std::deque<NodeId> queue;
  for (auto s : sources) {
    if (!seen[s]) {
      seen[s] = true;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (auto v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        parent[v] = u;
        queue.push_back(v);
      }
    }
  }
  return parent;
}

std::vector<NodeId> sorted_inputs(const SignedDigraph& g) {
  std::vector<NodeId> in;
  for (const auto& c : g.inputs()) in.push_back(c.node);
  std::sort(in.begin(), in.end());
  return in;
}

// Shortest path from an upstream input to `target` (upstream id), if any.
std::optional<std::vector<NodeId>> shortest_input_path(const SignedDigraph& g1, NodeId target) {
  std::vector<bool> seen;
  const auto parent = bfs_parents(g1.out_neighbors(), sorted_inputs(g1), seen);
  if (!seen[target]) return std::nullopt;
  std::vector<NodeId> path{target};
  while (parent[path.back()]) path.push_back(*parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

// Path nodes (induced upstream edges) + links from them + downstream. Only the
// first node of each path keeps its input.
CascadeComposition assemble(const CascadeSpec& spec, const std::vector<std::vector<NodeId>>& paths) {
  const auto& g1 = spec.upstream;
  const auto& g2 = spec.downstream;
  std::set<NodeId> keep;
  std::set<NodeId> starts;
  for (const auto& p : paths) {
    keep.insert(p.begin(), p.end());
    if (!p.empty()) starts.insert(p.front());
  }
  CascadeComposition c;
  c.paths = paths;
  c.upstream_nodes.assign(keep.begin(), keep.end());

  GraphSpec gs;
  gs.bounds = g2.bounds();
  auto up = [&](NodeId v) { return "up:" + g1.label(v); };
  auto down = [&](NodeId v) { return "down:" + g2.label(v); };
  for (auto v : c.upstream_nodes) gs.nodes.push_back(up(v));
  for (NodeId v = 0; v < g2.node_count(); ++v) gs.nodes.push_back(down(v));
  for (const auto& e : g1.edges()) {
    if (keep.count(e.src) && keep.count(e.dst)) gs.edges.push_back({up(e.src), up(e.dst), e.sign, e.weight});
  }
  std::set<EdgeKey> linked;
  for (const auto& [s, t] : spec.links) {
    if (keep.count(s) && linked.insert({s, t}).second) {
      gs.edges.push_back({up(s), down(t), spec.link_sign, spec.link_weight});
    }
  }
  for (const auto& e : g2.edges()) gs.edges.push_back({down(e.src), down(e.dst), e.sign, e.weight});
  for (const auto& in : g1.inputs()) {
    if (starts.count(in.node)) gs.inputs.push_back({up(in.node), in.gain});
  }
  for (auto o : g2.outputs()) gs.outputs.push_back(down(o));
  c.graph = build_graph(gs);
  return c;
}

// Upstream graph extended by the entry nodes (ids n1 + k) and the link edges.
SignedDigraph link_graph(const CascadeSpec& spec, std::vector<NodeId>& entry_ids) {
  const auto& g1 = spec.upstream;
  GraphSpec gs = g1.to_spec();
  gs.outputs.clear();
  entry_ids.clear();
  std::map<NodeId, std::string> entry_label;
  for (auto e : spec.entries) {
    entry_label[e] = "entry:" + spec.downstream.label(e);
    entry_ids.push_back(gs.nodes.size());
    gs.nodes.push_back(entry_label[e]);
  }
  for (const auto& [s, t] : spec.links) {
    gs.edges.push_back({g1.label(s), entry_label[t], spec.link_sign, spec.link_weight});
  }
  return build_graph(gs);
}

}  // namespace

CascadeVerdict cascade_single_input_check(const CascadeSpec& spec, std::size_t trials,
                                          std::uint64_t seed) {
  spec.check();
  if (spec.entries.size() != 1) throw ModelError("single-input cascade needs exactly one entry node");
  CascadeVerdict v;
  std::vector<NodeId> entry_ids;
  const auto lg = link_graph(spec, entry_ids);
  std::optional<std::vector<NodeId>> best;
  if (!spec.upstream.inputs().empty()) {
    auto p = shortest_input_path(lg, entry_ids.front());
    if (p && p->size() >= 2) {
      p->pop_back();  // drop the entry
      best = std::move(p);
    }
  }
  if (!best) {
    v.message = "not composable: no path from an upstream input to the entry node";
    return v;
  }
  v.composable = true;
  v.composite = assemble(spec, {*best});
  v.structural = structural_test(StructurePattern::from_graph(v.composite->graph), trials, seed);
  v.message = v.structural.controllable() ? "controllable" : "likely uncontrollable";
  return v;
}

MultiCascadeVerdict cascade_multi_input_check(const CascadeSpec& spec, std::size_t trials,
                                              std::uint64_t seed) {
  spec.check();
  MultiCascadeVerdict out;
  std::vector<NodeId> entry_ids;
  const auto lg = link_graph(spec, entry_ids);

  std::vector<std::vector<NodeId>> paths;
  if (!spec.upstream.inputs().empty()) {
    out.disjoint_paths = find_disjoint_input_paths(lg, entry_ids);
  }
  if (out.disjoint_paths) {
    out.sufficient_condition_met = true;
    for (auto p : *out.disjoint_paths) {
      p.pop_back();
      paths.push_back(std::move(p));
    }
  } else if (!spec.upstream.inputs().empty()) {
    // Independent shortest paths; they may share nodes.
    for (auto e : entry_ids) {
      if (auto p = shortest_input_path(lg, e); p && p->size() >= 2) {
        p->pop_back();
        paths.push_back(std::move(*p));
      }
    }
  }
  auto& v = out.verdict;
  v.composable = !paths.empty();
  v.composite = assemble(spec, paths);
  v.structural = structural_test(StructurePattern::from_graph(v.composite->graph), trials, seed);
  if (out.sufficient_condition_met) {
    v.message = "disjoint paths found";
  } else if (paths.empty()) {
    v.message = "no path from the upstream inputs to any entry";
  } else {
    v.message = "paths share nodes; condition not met";
  }
  return out;
}

CascadeAuditReport cascade_dynamics_audit(const std::vector<CascadePart>& parts,
                                          const CascadeComposite& composite,
                                          const ModelParams& params, const InputSignal& u,
                                          const Eigen::VectorXd& x0, double horizon,
                                          const DropoutPlan& plan, std::uint64_t seed) {
  CascadeAuditReport r;
  for (const auto& p : parts) r.max_in_degree_parts = std::max(r.max_in_degree_parts, max_in_degree(p.graph));
  r.max_in_degree_composite = max_in_degree(composite.graph);
  r.stability = stability_condition(composite.graph, params);
  r.stability_flagged = !r.stability.holds;
  r.cactus = validate_generalized_cactus(composite.graph, composite.decomposition);
  if (!r.stability_flagged) {
    const auto traj = simulate(composite.graph, params, u, x0, horizon);
    r.ranks = per_slot_rank_audit(traj, composite.graph, params);
    r.all_full_rank = !r.ranks.empty() &&
                      std::all_of(r.ranks.begin(), r.ranks.end(), [](const SlotRank& s) { return s.full; });
    for (const auto& a : traj.weights) r.hurwitz.push_back(hurwitz_audit(a, params.leak));
  }
  r.dropout = dropout_audit(composite.graph, composite.decomposition, plan, params, 20, seed);
  return r;
}

namespace {

CascadePart stem_part(const std::string& name, const std::vector<std::string>& stem,
                      const std::vector<std::tuple<std::string, std::string, double>>& extra,
                      bool input, const std::vector<DecompositionSpec::BudSpec>& buds,
                      const std::vector<std::vector<double>>& cycle_weights) {
  GraphSpec gs;
  std::set<std::string> seen;
  auto add_node = [&](const std::string& l) {
    if (seen.insert(l).second) gs.nodes.push_back(l);
  };
  for (const auto& l : stem) add_node(l);
  for (const auto& b : buds) {
    for (const auto& l : b.cycle) add_node(l);
  }
  auto edge = [](const std::string& s, const std::string& t, double w) {
    return GraphSpec::EdgeSpec{s, t, w < 0 ? EdgeSign::inhibitory : EdgeSign::excitatory, w};
  };
  for (std::size_t i = 0; i + 1 < stem.size(); ++i) gs.edges.push_back(edge(stem[i], stem[i + 1], 0.6));
  for (std::size_t k = 0; k < buds.size(); ++k) {
    const auto& b = buds[k];
    for (std::size_t i = 0; i < b.cycle.size(); ++i) {
      gs.edges.push_back(edge(b.cycle[i], b.cycle[(i + 1) % b.cycle.size()], cycle_weights[k][i]));
    }
    gs.edges.push_back(edge(b.edge_from, b.edge_to, 0.7));
  }
  for (const auto& [s, t, w] : extra) gs.edges.push_back(edge(s, t, w));
  if (input) gs.inputs.push_back({stem.front(), 1.0});
  gs.outputs.push_back(stem.back());

  CascadePart p;
  p.name = name;
  p.graph = build_graph(gs);
  DecompositionSpec ds;
  ds.stems = {stem};
  ds.buds = buds;
  for (const auto& [s, t, w] : extra) ds.cross_links.emplace_back(s, t);
  p.decomposition = resolve_decomposition(ds, p.graph);
  return p;
}

}  // namespace

FiveCascade five_part_cascade() {
  FiveCascade fc;
  // Cycles behind the same input get sign patterns with disjoint eigenvalue
  // angles, so equal drifted weights cannot make them share an eigenvalue.
  fc.parts.push_back(stem_part("U1", {"a1", "a2", "a3"}, {{"a1", "a3", 0.3}}, true,
                               {{{"b1", "b2"}, "a2", "b1", "a2"}}, {{0.5, -0.4}}));
  fc.parts.push_back(stem_part("U2", {"c1", "c2", "c3"}, {}, true, {}, {}));
  fc.parts.push_back(stem_part("P1", {"d1", "d2"}, {}, false, {}, {}));
  {
    GraphSpec gs;
    gs.nodes = {"e1", "e2", "e3"};
    gs.edges = {{"e1", "e2", EdgeSign::excitatory, 0.5},
                {"e2", "e3", EdgeSign::excitatory, 0.5},
                {"e3", "e1", EdgeSign::inhibitory, -0.4}};
    CascadePart p;
    p.name = "P2";
    p.graph = build_graph(gs);
    p.cycle = {0, 1, 2};
    fc.parts.push_back(std::move(p));
  }
  fc.parts.push_back(stem_part("P3", {"f1", "f2", "f3"}, {{"f3", "f1", -0.2}}, false,
                               {{{"g1", "g2", "g3"}, "f2", "g1", "f2"}}, {{0.5, 0.45, 0.4}}));
  auto link = [&](std::size_t from, std::size_t to, NodeId to_node) {
    CascadeLink l;
    l.from_part = from;
    l.from_node = fc.parts[from].extremity();
    l.to_part = to;
    l.to_node = to_node;
    return l;
  };
  fc.links.push_back(link(0, 2, fc.parts[2].root()));
  fc.links.push_back(link(2, 4, fc.parts[4].root()));
  fc.links.push_back(link(1, 3, 0));
  return fc;
}

}  // namespace neurocactus
