#include "neurocactus/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "neurocactus/error.hpp"

namespace neurocactus {

double WeightBounds::max_magnitude() const { return std::max(pos_hi, std::abs(neg_lo)); }

std::optional<NodeId> SignedDigraph::node_index(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<NodeId>(it - labels_.begin());
}

NodeId SignedDigraph::require_node(const std::string& label) const {
  auto idx = node_index(label);
  if (!idx) throw GraphError("unknown node label '" + label + "'");
  return *idx;
}

std::optional<std::size_t> SignedDigraph::find_edge(NodeId src, NodeId dst) const {
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (edges_[e].src == src && edges_[e].dst == dst) return e;
  }
  return std::nullopt;
}

bool SignedDigraph::is_input(NodeId n) const {
  return std::any_of(inputs_.begin(), inputs_.end(),
                     [n](const InputChannel& c) { return c.node == n; });
}

bool SignedDigraph::has_self_loops() const {
  return std::any_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.src == e.dst; });
}

std::vector<std::vector<NodeId>> SignedDigraph::out_neighbors() const {
  std::vector<std::vector<NodeId>> adj(node_count());
  for (const auto& e : edges_) adj[e.src].push_back(e.dst);
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

std::vector<std::size_t> SignedDigraph::in_degrees() const {
  std::vector<std::size_t> deg(node_count(), 0);
  for (const auto& e : edges_) ++deg[e.dst];
  return deg;
}

Eigen::MatrixXd SignedDigraph::weight_matrix() const {
  const auto n = static_cast<Eigen::Index>(node_count());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : edges_) a(e.dst, e.src) = e.weight;
  return a;
}

Eigen::MatrixXd SignedDigraph::input_matrix() const {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(node_count(), inputs_.size());
  for (std::size_t k = 0; k < inputs_.size(); ++k) b(inputs_[k].node, k) = inputs_[k].gain;
  return b;
}

Eigen::MatrixXd SignedDigraph::output_matrix() const {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(outputs_.size(), node_count());
  for (std::size_t k = 0; k < outputs_.size(); ++k) c(k, outputs_[k]) = 1.0;
  return c;
}

Eigen::MatrixXd SignedDigraph::lower_bound_matrix() const {
  const auto n = static_cast<Eigen::Index>(node_count());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : edges_) m(e.dst, e.src) = bounds_.lower(e.sign);
  return m;
}

Eigen::MatrixXd SignedDigraph::upper_bound_matrix() const {
  const auto n = static_cast<Eigen::Index>(node_count());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : edges_) m(e.dst, e.src) = bounds_.upper(e.sign);
  return m;
}

Eigen::MatrixXd SignedDigraph::sign_matrix() const {
  const auto n = static_cast<Eigen::Index>(node_count());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : edges_) m(e.dst, e.src) = sign_value(e.sign);
  return m;
}

GraphSpec SignedDigraph::to_spec() const {
  GraphSpec spec;
  spec.nodes = labels_;
  spec.bounds = bounds_;
  for (const auto& e : edges_) {
    spec.edges.push_back({labels_[e.src], labels_[e.dst], e.sign, e.weight});
  }
  for (const auto& in : inputs_) spec.inputs.push_back({labels_[in.node], in.gain});
  for (auto o : outputs_) spec.outputs.push_back(labels_[o]);
  return spec;
}

namespace {

void check_bounds(const WeightBounds& b) {
  if (!(b.pos_lo > 0.0 && b.pos_lo <= b.pos_hi)) {
    throw GraphError("excitatory bounds must satisfy 0 < lower <= upper");
  }
  if (!(b.neg_lo <= b.neg_hi && b.neg_hi < 0.0)) {
    throw GraphError("inhibitory bounds must satisfy lower <= upper < 0");
  }
}

void check_weight(const WeightBounds& b, const Edge& e, const std::string& name) {
  const double lo = b.lower(e.sign);
  const double hi = b.upper(e.sign);
  if (!std::isfinite(e.weight) || e.weight < lo || e.weight > hi) {
    throw GraphError("edge " + name + " weight " + std::to_string(e.weight) + " outside [" +
                     std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

}  // namespace

SignedDigraph build_graph(const GraphSpec& spec) {
  check_bounds(spec.bounds);
  SignedDigraph g;
  g.bounds_ = spec.bounds;

  std::map<std::string, NodeId> index;
  for (const auto& label : spec.nodes) {
    if (label.empty()) throw GraphError("empty node label");
    if (!index.emplace(label, g.labels_.size()).second) {
      throw GraphError("duplicate node label '" + label + "'");
    }
    g.labels_.push_back(label);
  }
  auto lookup = [&](const std::string& label) {
    auto it = index.find(label);
    if (it == index.end()) throw GraphError("unknown node label '" + label + "'");
    return it->second;
  };

  std::set<EdgeKey> seen;
  for (const auto& es : spec.edges) {
    Edge e{lookup(es.src), lookup(es.dst), es.sign, es.weight};
    const std::string name = es.src + "->" + es.dst;
    if (!seen.emplace(e.src, e.dst).second) throw GraphError("duplicate edge " + name);
    check_weight(g.bounds_, e, name);
    g.edges_.push_back(e);
  }

  std::set<NodeId> input_nodes;
  for (const auto& in : spec.inputs) {
    const NodeId n = lookup(in.node);
    if (!input_nodes.insert(n).second) throw GraphError("duplicate input node '" + in.node + "'");
    if (!std::isfinite(in.gain) || in.gain == 0.0) {
      throw GraphError("input gain at '" + in.node + "' must be finite and nonzero");
    }
    g.inputs_.push_back({n, in.gain});
  }

  std::set<NodeId> output_nodes;
  for (const auto& o : spec.outputs) {
    const NodeId n = lookup(o);
    if (!output_nodes.insert(n).second) throw GraphError("duplicate output node '" + o + "'");
    g.outputs_.push_back(n);
  }
  return g;
}

std::size_t max_in_degree(const SignedDigraph& g) {
  const auto deg = g.in_degrees();
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

SignedDigraph drop_elements(const SignedDigraph& g, const std::set<NodeId>& nodes,
                            const std::set<EdgeKey>& edges) {
  for (auto n : nodes) {
    if (n >= g.node_count()) throw GraphError("dropped node index out of range");
  }
  for (const auto& [s, d] : edges) {
    if (!g.has_edge(s, d)) {
      throw GraphError("dropped edge " + std::to_string(s) + "->" + std::to_string(d) +
                       " does not exist");
    }
  }

  std::vector<std::optional<NodeId>> remap(g.node_count());
  SignedDigraph out;
  out.bounds_ = g.bounds_;
  for (NodeId n = 0; n < g.node_count(); ++n) {
    if (nodes.count(n)) continue;
    remap[n] = out.labels_.size();
    out.labels_.push_back(g.labels_[n]);
  }
  for (const auto& e : g.edges_) {
    if (!remap[e.src] || !remap[e.dst] || edges.count({e.src, e.dst})) continue;
    out.edges_.push_back({*remap[e.src], *remap[e.dst], e.sign, e.weight});
  }
  for (const auto& in : g.inputs_) {
    if (remap[in.node]) out.inputs_.push_back({*remap[in.node], in.gain});
  }
  for (auto o : g.outputs_) {
    if (remap[o]) out.outputs_.push_back(*remap[o]);
  }
  return out;
}

SignedDigraph with_weights(const SignedDigraph& g, const Eigen::MatrixXd& weights) {
  if (weights.rows() != static_cast<Eigen::Index>(g.node_count()) || weights.cols() != weights.rows()) {
    throw GraphError("weight matrix dimension mismatch");
  }
  SignedDigraph out = g;
  for (auto& e : out.edges_) {
    e.weight = weights(e.dst, e.src);
    check_weight(out.bounds_, e, g.labels_[e.src] + "->" + g.labels_[e.dst]);
  }
  return out;
}

std::vector<bool> reachable_from(const SignedDigraph& g, const std::vector<NodeId>& sources) {
  std::vector<bool> seen(g.node_count(), false);
  const auto adj = g.out_neighbors();
  std::deque<NodeId> queue;
  for (auto s : sources) {
    if (s < seen.size() && !seen[s]) {
      seen[s] = true;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (auto v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        queue.push_back(v);
      }
    }
  }
  return seen;
}

}  // namespace neurocactus
