#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "neurocactus/graph.hpp"

namespace neurocactus {

// A directed cycle attached to an existing structure through its dangling node.
// The distinguished edge runs dangling -> (one node of the cycle).
struct Bud {
  std::vector<NodeId> cycle;
  EdgeKey distinguished{};
  NodeId dangling = 0;

  bool operator==(const Bud&) const = default;
};

// Declared spanning structure of a generalized cactus. Buds are attached in
// declaration order, after every stem.
struct CactusDecomposition {
  std::vector<std::vector<NodeId>> stems;
  std::vector<Bud> buds;
  std::vector<NodeId> roots;
  std::vector<NodeId> extremities;
  std::vector<EdgeKey> cross_links;

  bool operator==(const CactusDecomposition&) const = default;
};

// Label form used by scenario files.
struct DecompositionSpec {
  struct BudSpec {
    std::vector<std::string> cycle;
    std::string edge_from;
    std::string edge_to;
    std::string dangling;
    bool operator==(const BudSpec&) const = default;
  };
  std::vector<std::vector<std::string>> stems;
  std::vector<BudSpec> buds;
  std::vector<std::string> roots;
  std::vector<std::string> extremities;
  std::vector<std::pair<std::string, std::string>> cross_links;

  bool operator==(const DecompositionSpec&) const = default;
};

// Throws GraphError on unknown labels. Empty roots/extremities are derived from the stems.
CactusDecomposition resolve_decomposition(const DecompositionSpec& spec, const SignedDigraph& g);
DecompositionSpec to_spec(const CactusDecomposition& d, const SignedDigraph& g);

struct CactusVerdict {
  bool accepted = false;
  std::vector<std::string> violations;
};

CactusVerdict validate_generalized_cactus(const SignedDigraph& g, const CactusDecomposition& d);

// Every edge that belongs to a stem, a bud cycle or a distinguished edge.
std::set<EdgeKey> cactus_edges(const CactusDecomposition& d);

struct RestrictedDecomposition {
  CactusDecomposition decomposition;
  std::vector<std::string> flags;
};

// Maps d from g onto survivor = drop_elements(g, nodes, edges), removing dropped
// elements. Breakage (a dropped root, stem node, stem edge or bud element) is
// reported in flags, never thrown.
RestrictedDecomposition restrict_decomposition(const SignedDigraph& g, const CactusDecomposition& d,
                                               const SignedDigraph& survivor,
                                               const std::set<NodeId>& nodes,
                                               const std::set<EdgeKey>& edges);

// One cactus subgraph of a cascade: either a single-stem cactus or a pure cycle.
struct CascadePart {
  std::string name;
  SignedDigraph graph;
  CactusDecomposition decomposition;  // unused for pure cycles
  std::vector<NodeId> cycle;          // nonempty iff the part is a pure cycle

  bool is_pure_cycle() const { return !cycle.empty(); }
  NodeId root() const;
  NodeId extremity() const;
};

// Interconnection from the extremity of one part to the root of another.
struct CascadeLink {
  std::size_t from_part = 0;
  NodeId from_node = 0;
  std::size_t to_part = 0;
  NodeId to_node = 0;
  EdgeSign sign = EdgeSign::excitatory;
  double weight = 0.5;
};

struct CascadeComposite {
  SignedDigraph graph;
  CactusDecomposition decomposition;
  std::vector<std::size_t> offsets;  // global id = offsets[part] + local id
};

// Merges the parts. A link into a stem-rooted part prolongs the upstream stem;
// a link into a pure cycle turns that cycle into a bud hanging off the extremity.
// Linked roots lose their external input. Throws GraphError when a root has
// neither link nor input, when an extremity feeds more than one non-cycle root,
// or when links do not run extremity -> root.
CascadeComposite compose_cascade(const std::vector<CascadePart>& parts,
                                 const std::vector<CascadeLink>& links);

// r node-disjoint paths from distinct input nodes of g to the given entry nodes,
// found by unit node-capacity max-flow (lowest index first). Entry nodes only
// terminate paths. Each path is returned in the order of `entries`.
std::optional<std::vector<std::vector<NodeId>>> find_disjoint_input_paths(
    const SignedDigraph& g, const std::vector<NodeId>& entries);

}  // namespace neurocactus
