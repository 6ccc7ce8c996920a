#include "neurocactus/cactus.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>

#include "neurocactus/error.hpp"

namespace neurocactus {

CactusDecomposition resolve_decomposition(const DecompositionSpec& spec, const SignedDigraph& g) {
  CactusDecomposition d;
  for (const auto& stem : spec.stems) {
    std::vector<NodeId> ids;
    for (const auto& l : stem) ids.push_back(g.require_node(l));
    d.stems.push_back(std::move(ids));
  }
  for (const auto& b : spec.buds) {
    Bud bud;
    for (const auto& l : b.cycle) bud.cycle.push_back(g.require_node(l));
    bud.distinguished = {g.require_node(b.edge_from), g.require_node(b.edge_to)};
    bud.dangling = g.require_node(b.dangling);
    d.buds.push_back(std::move(bud));
  }
  for (const auto& l : spec.roots) d.roots.push_back(g.require_node(l));
  for (const auto& l : spec.extremities) d.extremities.push_back(g.require_node(l));
  for (const auto& [s, t] : spec.cross_links) {
    d.cross_links.emplace_back(g.require_node(s), g.require_node(t));
  }
  if (d.roots.empty()) {
    for (const auto& s : d.stems) {
      if (!s.empty()) d.roots.push_back(s.front());
    }
  }
  if (d.extremities.empty()) {
    for (const auto& s : d.stems) {
      if (!s.empty()) d.extremities.push_back(s.back());
    }
  }
  return d;
}

DecompositionSpec to_spec(const CactusDecomposition& d, const SignedDigraph& g) {
  DecompositionSpec spec;
  for (const auto& stem : d.stems) {
    std::vector<std::string> labels;
    for (auto n : stem) labels.push_back(g.label(n));
    spec.stems.push_back(std::move(labels));
  }
  for (const auto& b : d.buds) {
    DecompositionSpec::BudSpec bs;
    for (auto n : b.cycle) bs.cycle.push_back(g.label(n));
    bs.edge_from = g.label(b.distinguished.first);
    bs.edge_to = g.label(b.distinguished.second);
    bs.dangling = g.label(b.dangling);
    spec.buds.push_back(std::move(bs));
  }
  for (auto n : d.roots) spec.roots.push_back(g.label(n));
  for (auto n : d.extremities) spec.extremities.push_back(g.label(n));
  for (const auto& [s, t] : d.cross_links) spec.cross_links.emplace_back(g.label(s), g.label(t));
  return spec;
}

std::set<EdgeKey> cactus_edges(const CactusDecomposition& d) {
  std::set<EdgeKey> out;
  for (const auto& stem : d.stems) {
    for (std::size_t i = 0; i + 1 < stem.size(); ++i) out.emplace(stem[i], stem[i + 1]);
  }
  for (const auto& b : d.buds) {
    for (std::size_t i = 0; i < b.cycle.size(); ++i) {
      out.emplace(b.cycle[i], b.cycle[(i + 1) % b.cycle.size()]);
    }
    out.insert(b.distinguished);
  }
  return out;
}

CactusVerdict validate_generalized_cactus(const SignedDigraph& g, const CactusDecomposition& d) {
  CactusVerdict v;
  const std::size_t n = g.node_count();
  auto fail = [&](std::string msg) { v.violations.push_back(std::move(msg)); };
  auto in_range = [&](NodeId x) { return x < n; };
  auto name = [&](NodeId x) { return in_range(x) ? g.label(x) : "#" + std::to_string(x); };
  auto edge_name = [&](NodeId s, NodeId t) { return name(s) + "->" + name(t); };

  // Node -> owning cactus (index of the stem it grew from).
  std::vector<std::optional<std::size_t>> owner(n);

  if (d.stems.empty() && n > 0) fail("decomposition declares no stems");
  for (std::size_t s = 0; s < d.stems.size(); ++s) {
    const auto& stem = d.stems[s];
    if (stem.empty()) {
      fail("stem " + std::to_string(s) + " is empty");
      continue;
    }
    for (std::size_t i = 0; i < stem.size(); ++i) {
      const NodeId x = stem[i];
      if (!in_range(x)) {
        fail("stem " + std::to_string(s) + " references unknown node " + name(x));
        continue;
      }
      if (owner[x]) {
        fail("node " + name(x) + " appears in more than one place (stems must be simple and disjoint)");
      } else {
        owner[x] = s;
      }
      if (i + 1 < stem.size() && in_range(stem[i + 1]) && !g.has_edge(x, stem[i + 1])) {
        fail("stem edge " + edge_name(x, stem[i + 1]) + " missing from graph");
      }
    }
    if (!in_range(stem.front())) continue;
    if (!g.is_input(stem.front())) fail("root " + name(stem.front()) + " is not an input node");
  }

  if (!d.roots.empty()) {
    if (d.roots.size() != d.stems.size()) {
      fail("root count does not match stem count");
    } else {
      for (std::size_t s = 0; s < d.stems.size(); ++s) {
        if (!d.stems[s].empty() && d.roots[s] != d.stems[s].front()) {
          fail("declared root " + name(d.roots[s]) + " is not the initial node of stem " +
               std::to_string(s));
        }
      }
    }
  }
  if (!d.extremities.empty()) {
    if (d.extremities.size() != d.stems.size()) {
      fail("extremity count does not match stem count");
    } else {
      for (std::size_t s = 0; s < d.stems.size(); ++s) {
        if (!d.stems[s].empty() && d.extremities[s] != d.stems[s].back()) {
          fail("declared extremity " + name(d.extremities[s]) + " is not the terminal node of stem " +
               std::to_string(s));
        }
      }
    }
  }

  for (std::size_t b = 0; b < d.buds.size(); ++b) {
    const auto& bud = d.buds[b];
    const std::string tag = "bud " + std::to_string(b);
    if (bud.cycle.empty()) {
      fail(tag + " has an empty cycle");
      continue;
    }
    if (!in_range(bud.dangling) || !owner[bud.dangling]) {
      fail(tag + " dangling node " + name(bud.dangling) +
           " is not part of a stem or an earlier bud");
      continue;
    }
    const std::size_t cactus = *owner[bud.dangling];
    bool cycle_ok = true;
    for (std::size_t i = 0; i < bud.cycle.size(); ++i) {
      const NodeId x = bud.cycle[i];
      if (!in_range(x)) {
        fail(tag + " references unknown node " + name(x));
        cycle_ok = false;
        continue;
      }
      if (owner[x]) {
        fail(tag + " cycle node " + name(x) +
             " already belongs to the structure (a bud may meet it only in its dangling node)");
        cycle_ok = false;
      }
      const NodeId next = bud.cycle[(i + 1) % bud.cycle.size()];
      if (in_range(next) && !g.has_edge(x, next)) {
        fail(tag + " cycle edge " + edge_name(x, next) + " missing from graph");
        cycle_ok = false;
      }
    }
    const auto [from, to] = bud.distinguished;
    if (from != bud.dangling) {
      fail(tag + " distinguished edge must start at the dangling node " + name(bud.dangling));
    }
    if (std::find(bud.cycle.begin(), bud.cycle.end(), to) == bud.cycle.end()) {
      fail(tag + " distinguished edge must end on a cycle node");
    } else if (in_range(from) && !g.has_edge(from, to)) {
      fail(tag + " distinguished edge " + edge_name(from, to) + " missing from graph");
    }
    if (cycle_ok) {
      for (auto x : bud.cycle) owner[x] = cactus;
    }
  }

  for (NodeId x = 0; x < n; ++x) {
    if (!owner[x]) fail("node not spanned: " + name(x));
  }

  for (const auto& [s, t] : d.cross_links) {
    if (!in_range(s) || !in_range(t) || !g.has_edge(s, t)) {
      fail("cross link " + edge_name(s, t) + " missing from graph");
    }
  }

  v.accepted = v.violations.empty();
  return v;
}

RestrictedDecomposition restrict_decomposition(const SignedDigraph& g, const CactusDecomposition& d,
                                               const SignedDigraph& survivor,
                                               const std::set<NodeId>& nodes,
                                               const std::set<EdgeKey>& edges) {
  RestrictedDecomposition out;
  auto map = [&](NodeId x) -> std::optional<NodeId> {
    if (nodes.count(x) || x >= g.node_count()) return std::nullopt;
    return survivor.node_index(g.label(x));
  };
  auto flag = [&](std::string msg) { out.flags.push_back(std::move(msg)); };

  for (const auto& stem : d.stems) {
    std::vector<NodeId> kept;
    for (std::size_t i = 0; i < stem.size(); ++i) {
      auto m = map(stem[i]);
      if (!m) {
        if (i == 0) {
          flag("input node " + g.label(stem[i]) + " dropped; it is the sole root of its cactus");
        } else {
          flag("stem node " + g.label(stem[i]) + " dropped");
        }
        continue;
      }
      if (i + 1 < stem.size() && edges.count({stem[i], stem[i + 1]})) {
        flag("stem edge " + g.label(stem[i]) + "->" + g.label(stem[i + 1]) + " dropped");
      }
      kept.push_back(*m);
    }
    if (!kept.empty()) {
      out.decomposition.stems.push_back(kept);
      out.decomposition.roots.push_back(kept.front());
      out.decomposition.extremities.push_back(kept.back());
    }
  }

  for (const auto& bud : d.buds) {
    bool broken = false;
    Bud mapped;
    for (std::size_t i = 0; i < bud.cycle.size(); ++i) {
      const NodeId x = bud.cycle[i];
      const NodeId next = bud.cycle[(i + 1) % bud.cycle.size()];
      auto m = map(x);
      if (!m) {
        flag("bud cycle node " + g.label(x) + " dropped");
        broken = true;
        continue;
      }
      if (edges.count({x, next})) {
        flag("bud cycle edge " + g.label(x) + "->" + g.label(next) + " dropped");
        broken = true;
      }
      mapped.cycle.push_back(*m);
    }
    auto dangling = map(bud.dangling);
    auto target = map(bud.distinguished.second);
    if (!dangling) {
      flag("bud dangling node " + g.label(bud.dangling) + " dropped");
      broken = true;
    }
    if (edges.count(bud.distinguished)) {
      flag("bud distinguished edge " + g.label(bud.distinguished.first) + "->" +
           g.label(bud.distinguished.second) + " dropped");
      broken = true;
    }
    if (broken || !target) continue;
    mapped.dangling = *dangling;
    mapped.distinguished = {*dangling, *target};
    out.decomposition.buds.push_back(std::move(mapped));
  }

  for (const auto& [s, t] : d.cross_links) {
    auto ms = map(s);
    auto mt = map(t);
    if (ms && mt && !edges.count({s, t})) out.decomposition.cross_links.emplace_back(*ms, *mt);
  }
  return out;
}

NodeId CascadePart::root() const {
  if (is_pure_cycle()) return cycle.front();
  if (decomposition.stems.size() != 1 || decomposition.stems.front().empty()) {
    throw GraphError("cascade part '" + name + "' must declare exactly one stem");
  }
  return decomposition.stems.front().front();
}

NodeId CascadePart::extremity() const {
  if (is_pure_cycle()) throw GraphError("pure cycle part '" + name + "' has no extremity");
  root();
  return decomposition.stems.front().back();
}

CascadeComposite compose_cascade(const std::vector<CascadePart>& parts,
                                 const std::vector<CascadeLink>& links) {
  if (parts.empty()) throw GraphError("cascade needs at least one part");
  const WeightBounds bounds = parts.front().graph.bounds();

  CascadeComposite out;
  GraphSpec spec;
  spec.bounds = bounds;
  auto global_label = [&](std::size_t p, NodeId local) {
    const auto& part = parts[p];
    return part.name.empty() ? part.graph.label(local) : part.name + "." + part.graph.label(local);
  };

  std::size_t offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto& part = parts[p];
    if (!(part.graph.bounds() == bounds)) {
      throw GraphError("cascade parts must share the same weight bounds");
    }
    part.root();  // shape check
    out.offsets.push_back(offset);
    offset += part.graph.node_count();
    for (NodeId x = 0; x < part.graph.node_count(); ++x) spec.nodes.push_back(global_label(p, x));
    for (const auto& e : part.graph.edges()) {
      spec.edges.push_back({global_label(p, e.src), global_label(p, e.dst), e.sign, e.weight});
    }
  }

  // Link rules.
  std::vector<std::optional<std::size_t>> incoming(parts.size());
  std::vector<std::optional<std::size_t>> stem_successor(parts.size());
  for (std::size_t l = 0; l < links.size(); ++l) {
    const auto& link = links[l];
    if (link.from_part >= parts.size() || link.to_part >= parts.size()) {
      throw GraphError("cascade link references an unknown part");
    }
    if (link.from_part == link.to_part) throw GraphError("cascade link must join two different parts");
    const auto& src = parts[link.from_part];
    const auto& dst = parts[link.to_part];
    if (src.is_pure_cycle()) {
      throw GraphError("cascade link source '" + src.name + "' is a pure cycle and has no extremity");
    }
    if (link.from_node != src.extremity()) {
      throw GraphError("cascade link must leave from the extremity of part '" + src.name + "'");
    }
    if (dst.is_pure_cycle()) {
      if (std::find(dst.cycle.begin(), dst.cycle.end(), link.to_node) == dst.cycle.end()) {
        throw GraphError("cascade link must enter the cycle of part '" + dst.name + "'");
      }
    } else {
      if (link.to_node != dst.root()) {
        throw GraphError("cascade link must enter the root of part '" + dst.name + "'");
      }
      if (stem_successor[link.from_part]) {
        throw GraphError("extremity of part '" + src.name +
                         "' links to more than one non-cycle root");
      }
      stem_successor[link.from_part] = link.to_part;
    }
    if (incoming[link.to_part]) {
      throw GraphError("root of part '" + dst.name + "' is linked more than once");
    }
    incoming[link.to_part] = l;
    spec.edges.push_back({global_label(link.from_part, link.from_node),
                          global_label(link.to_part, link.to_node), link.sign, link.weight});
  }

  // Inputs: linked roots lose their external input.
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto& part = parts[p];
    const bool linked = incoming[p].has_value();
    if (!linked && !part.graph.is_input(part.root())) {
      throw GraphError("root of part '" + part.name + "' has neither a link nor an external input");
    }
    for (const auto& in : part.graph.inputs()) {
      if (linked && in.node == part.root()) continue;
      spec.inputs.push_back({global_label(p, in.node), in.gain});
    }
    for (auto o : part.graph.outputs()) spec.outputs.push_back(global_label(p, o));
  }

  out.graph = build_graph(spec);
  auto gid = [&](std::size_t p, NodeId local) { return out.offsets[p] + local; };

  // Stems: chains of prolonged stems starting at parts fed by an external input.
  auto& dec = out.decomposition;
  std::vector<bool> placed(parts.size(), false);
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (incoming[p] || parts[p].is_pure_cycle()) continue;
    std::vector<NodeId> stem;
    std::optional<std::size_t> cur = p;
    while (cur) {
      if (placed[*cur]) throw GraphError("cascade links form a loop");
      placed[*cur] = true;
      for (auto x : parts[*cur].decomposition.stems.front()) stem.push_back(gid(*cur, x));
      cur = stem_successor[*cur];
    }
    dec.roots.push_back(stem.front());
    dec.extremities.push_back(stem.back());
    dec.stems.push_back(std::move(stem));
  }
  // Pure cycles fed by an input act as their own stem.
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (incoming[p] || !parts[p].is_pure_cycle()) continue;
    placed[p] = true;
    std::vector<NodeId> stem;
    for (auto x : parts[p].cycle) stem.push_back(gid(p, x));
    dec.roots.push_back(stem.front());
    dec.extremities.push_back(stem.back());
    dec.stems.push_back(std::move(stem));
  }
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (!placed[p] && !parts[p].is_pure_cycle()) throw GraphError("cascade links form a loop");
  }

  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (parts[p].is_pure_cycle()) continue;
    for (const auto& b : parts[p].decomposition.buds) {
      Bud g;
      for (auto x : b.cycle) g.cycle.push_back(gid(p, x));
      g.dangling = gid(p, b.dangling);
      g.distinguished = {gid(p, b.distinguished.first), gid(p, b.distinguished.second)};
      dec.buds.push_back(std::move(g));
    }
    for (const auto& [s, t] : parts[p].decomposition.cross_links) {
      dec.cross_links.emplace_back(gid(p, s), gid(p, t));
    }
  }
  for (const auto& link : links) {
    const auto& dst = parts[link.to_part];
    if (!dst.is_pure_cycle()) continue;
    Bud b;
    for (auto x : dst.cycle) b.cycle.push_back(gid(link.to_part, x));
    b.dangling = gid(link.from_part, link.from_node);
    b.distinguished = {b.dangling, gid(link.to_part, link.to_node)};
    dec.buds.push_back(std::move(b));
  }
  // Closing edge of a pure cycle used as a stem is an ordinary extra edge.
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (incoming[p] || !parts[p].is_pure_cycle()) continue;
    const auto& c = parts[p].cycle;
    if (c.size() > 1) dec.cross_links.emplace_back(gid(p, c.back()), gid(p, c.front()));
  }
  return out;
}

namespace {

struct FlowEdge {
  std::size_t to;
  int cap;
  std::size_t rev;
};

class FlowNetwork {
 public:
  explicit FlowNetwork(std::size_t n) : adj_(n) {}

  void add(std::size_t u, std::size_t v, int cap) {
    adj_[u].push_back({v, cap, adj_[v].size()});
    adj_[v].push_back({u, 0, adj_[u].size() - 1});
  }

  // Edmonds-Karp; BFS visits edges in insertion order.
  int max_flow(std::size_t s, std::size_t t) {
    int total = 0;
    while (true) {
      std::vector<std::optional<std::pair<std::size_t, std::size_t>>> parent(adj_.size());
      std::deque<std::size_t> queue{s};
      std::vector<bool> seen(adj_.size(), false);
      seen[s] = true;
      while (!queue.empty() && !seen[t]) {
        const auto u = queue.front();
        queue.pop_front();
        for (std::size_t i = 0; i < adj_[u].size(); ++i) {
          const auto& e = adj_[u][i];
          if (e.cap > 0 && !seen[e.to]) {
            seen[e.to] = true;
            parent[e.to] = {u, i};
            queue.push_back(e.to);
          }
        }
      }
      if (!seen[t]) return total;
      for (std::size_t v = t; v != s;) {
        const auto [u, i] = *parent[v];
        auto& e = adj_[u][i];
        e.cap -= 1;
        adj_[e.to][e.rev].cap += 1;
        v = u;
      }
      ++total;
    }
  }

  const std::vector<FlowEdge>& edges(std::size_t u) const { return adj_[u]; }

 private:
  std::vector<std::vector<FlowEdge>> adj_;
};

}  // namespace

std::optional<std::vector<std::vector<NodeId>>> find_disjoint_input_paths(
    const SignedDigraph& g, const std::vector<NodeId>& entries) {
  const std::size_t n = g.node_count();
  std::vector<bool> is_entry(n, false);
  for (auto e : entries) {
    if (e >= n) throw GraphError("entry node out of range");
    if (is_entry[e]) throw GraphError("duplicate entry node " + g.label(e));
    is_entry[e] = true;
  }
  if (entries.empty()) return std::vector<std::vector<NodeId>>{};
  if (g.inputs().empty()) return std::nullopt;

  // v_in = 2v, v_out = 2v + 1.
  const std::size_t source = 2 * n;
  const std::size_t sink = 2 * n + 1;
  FlowNetwork net(2 * n + 2);
  std::vector<NodeId> inputs;
  for (const auto& in : g.inputs()) inputs.push_back(in.node);
  std::sort(inputs.begin(), inputs.end());
  for (auto s : inputs) net.add(source, 2 * s, 1);
  for (NodeId v = 0; v < n; ++v) net.add(2 * v, 2 * v + 1, 1);
  std::vector<Edge> edges = g.edges();
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.src, a.dst) < std::tie(b.src, b.dst); });
  for (const auto& e : edges) {
    if (is_entry[e.src] || e.src == e.dst) continue;
    net.add(2 * e.src + 1, 2 * e.dst, 1);
  }
  for (NodeId v = 0; v < n; ++v) {
    if (is_entry[v]) net.add(2 * v + 1, sink, 1);
  }

  const int flow = net.max_flow(source, sink);
  if (flow < static_cast<int>(entries.size())) return std::nullopt;

  // Forward edges carry flow when their residual capacity dropped to zero.
  auto next_hop = [&](std::size_t u) -> std::optional<std::size_t> {
    for (const auto& e : net.edges(u)) {
      if (e.cap == 0 && net.edges(e.to)[e.rev].cap == 1 && e.to != source) {
        // Skip reverse (residual) edges, which start with capacity 0 and never carry flow.
        if ((u % 2 == 1 && (e.to % 2 == 0 || e.to == sink)) || (u % 2 == 0 && e.to == u + 1)) {
          return e.to;
        }
      }
    }
    return std::nullopt;
  };

  std::map<NodeId, std::vector<NodeId>> by_entry;
  for (const auto& e : net.edges(source)) {
    if (e.cap != 0) continue;
    std::vector<NodeId> path;
    std::size_t u = e.to;
    while (u != sink) {
      if (u % 2 == 0) path.push_back(u / 2);
      auto nxt = next_hop(u);
      if (!nxt) break;
      u = *nxt;
    }
    if (!path.empty()) by_entry[path.back()] = std::move(path);
  }
  std::vector<std::vector<NodeId>> out;
  for (auto e : entries) {
    auto it = by_entry.find(e);
    if (it == by_entry.end()) return std::nullopt;
    out.push_back(it->second);
  }
  return out;
}

}  // namespace neurocactus
