#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace neurocactus {

using NodeId = std::size_t;

enum class EdgeSign { excitatory, inhibitory };

inline double sign_value(EdgeSign s) { return s == EdgeSign::excitatory ? 1.0 : -1.0; }

// Clipping interval for each sign class: 0 < pos_lo <= pos_hi and neg_lo <= neg_hi < 0.
struct WeightBounds {
  double pos_lo = 0.1;
  double pos_hi = 1.2;
  double neg_lo = -1.2;
  double neg_hi = -0.1;

  double lower(EdgeSign s) const { return s == EdgeSign::excitatory ? pos_lo : neg_lo; }
  double upper(EdgeSign s) const { return s == EdgeSign::excitatory ? pos_hi : neg_hi; }
  // max{upper excitatory, |lower inhibitory|}
  double max_magnitude() const;

  bool operator==(const WeightBounds&) const = default;
};

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  EdgeSign sign = EdgeSign::excitatory;
  double weight = 0.0;

  bool operator==(const Edge&) const = default;
};

struct InputChannel {
  NodeId node = 0;
  double gain = 1.0;

  bool operator==(const InputChannel&) const = default;
};

using EdgeKey = std::pair<NodeId, NodeId>;

// Label-based description of a graph, as found in scenario files.
struct GraphSpec {
  struct EdgeSpec {
    std::string src;
    std::string dst;
    EdgeSign sign = EdgeSign::excitatory;
    double weight = 0.0;
    bool operator==(const EdgeSpec&) const = default;
  };
  struct InputSpec {
    std::string node;
    double gain = 1.0;
    bool operator==(const InputSpec&) const = default;
  };

  std::vector<std::string> nodes;
  std::vector<EdgeSpec> edges;
  WeightBounds bounds;
  std::vector<InputSpec> inputs;
  std::vector<std::string> outputs;

  bool operator==(const GraphSpec&) const = default;
};

// Directed weighted graph with excitatory/inhibitory edge classes. Weight a_ij of
// the matrix form is the edge j -> i. Immutable once built; construct through
// build_graph so every invariant is checked.
class SignedDigraph {
 public:
  std::size_t node_count() const { return labels_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(NodeId n) const { return labels_.at(n); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<InputChannel>& inputs() const { return inputs_; }
  const std::vector<NodeId>& outputs() const { return outputs_; }
  const WeightBounds& bounds() const { return bounds_; }

  std::optional<NodeId> node_index(const std::string& label) const;
  NodeId require_node(const std::string& label) const;
  std::optional<std::size_t> find_edge(NodeId src, NodeId dst) const;
  bool has_edge(NodeId src, NodeId dst) const { return find_edge(src, dst).has_value(); }
  bool is_input(NodeId n) const;
  bool has_self_loops() const;

  std::vector<std::vector<NodeId>> out_neighbors() const;
  std::vector<std::size_t> in_degrees() const;

  // A with A(dst, src) = weight.
  Eigen::MatrixXd weight_matrix() const;
  // Columns b_k e_k in input declaration order.
  Eigen::MatrixXd input_matrix() const;
  // Rows e_o^T in output declaration order.
  Eigen::MatrixXd output_matrix() const;
  // Entrywise clip bounds; zero where there is no edge.
  Eigen::MatrixXd lower_bound_matrix() const;
  Eigen::MatrixXd upper_bound_matrix() const;
  // +1 / -1 / 0 per entry.
  Eigen::MatrixXd sign_matrix() const;

  GraphSpec to_spec() const;

  bool operator==(const SignedDigraph&) const = default;

 private:
  friend SignedDigraph build_graph(const GraphSpec&);
  friend SignedDigraph drop_elements(const SignedDigraph&, const std::set<NodeId>&,
                                     const std::set<EdgeKey>&);
  friend SignedDigraph with_weights(const SignedDigraph&, const Eigen::MatrixXd&);

  std::vector<std::string> labels_;
  std::vector<Edge> edges_;
  std::vector<InputChannel> inputs_;
  std::vector<NodeId> outputs_;
  WeightBounds bounds_;
};

// Validates and builds. Throws GraphError on duplicate edges, unknown labels,
// weights outside their sign-class bounds, or malformed bounds.
SignedDigraph build_graph(const GraphSpec& spec);

std::size_t max_in_degree(const SignedDigraph& g);

// Subgraph (V - nodes, E - edges). Surviving nodes keep their relative order,
// labels, input gains and output flags; edges incident to a dropped node go too.
// Throws GraphError if a listed node or edge does not exist.
SignedDigraph drop_elements(const SignedDigraph& g, const std::set<NodeId>& nodes,
                            const std::set<EdgeKey>& edges);

// Same topology with the edge weights taken from A (entries must respect bounds).
SignedDigraph with_weights(const SignedDigraph& g, const Eigen::MatrixXd& weights);

// Nodes reachable from the given sources along directed edges (sources included).
std::vector<bool> reachable_from(const SignedDigraph& g, const std::vector<NodeId>& sources);

}  // namespace neurocactus
