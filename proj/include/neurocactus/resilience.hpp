#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "neurocactus/analysis.hpp"
#include "neurocactus/cactus.hpp"
#include "neurocactus/dynamics.hpp"
#include "neurocactus/graph.hpp"

namespace neurocactus {

enum class DropoutSchedule { permanent, intermittent };

// Elements named by label so plans can be stored next to scenarios.
struct DropoutPlan {
  std::string name;
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
  DropoutSchedule schedule = DropoutSchedule::permanent;
  // intermittent only: dropped[p] is true when the elements are unavailable in slot p.
  std::vector<bool> dropped;
  // Decomposition of the surviving graph, when the restricted one breaks.
  std::optional<DecompositionSpec> replacement;

  bool empty() const { return nodes.empty() && edges.empty(); }
  bool operator==(const DropoutPlan&) const = default;
};

struct ResolvedPlan {
  std::set<NodeId> nodes;
  std::set<EdgeKey> edges;
};

// Throws GraphError on unknown elements and ModelError on a mask of the wrong length
// (slot_count 0 skips that check).
ResolvedPlan resolve_plan(const SignedDigraph& g, const DropoutPlan& plan, std::size_t slot_count = 0);

// Availability masks for simulate(); empty for a permanent plan.
std::vector<std::optional<Eigen::MatrixXd>> dropout_masks(const SignedDigraph& g,
                                                          const DropoutPlan& plan,
                                                          std::size_t slot_count);

struct DropoutReport {
  SignedDigraph survivor;
  CactusDecomposition survivor_decomposition;
  std::vector<std::string> flags;  // breakage of the declared decomposition
  bool used_replacement = false;
  bool inputs_survive = false;
  CactusVerdict cactus;
  StabilityCondition stability;
  StructuralVerdict structural;
  // (a) cactus valid with the same inputs, (b) stability, (c) structural controllability.
  bool passed() const {
    return cactus.accepted && inputs_survive && stability.holds && structural.controllable();
  }
};

DropoutReport dropout_audit(const SignedDigraph& g, const CactusDecomposition& d,
                            const DropoutPlan& plan, const ModelParams& params,
                            std::size_t trials = 20, std::uint64_t seed = 1);

enum class ComponentStatus { known_controllable, unknown };

// Upstream G1 drives the entry nodes of downstream G2 through `links`
// (upstream node -> downstream entry node).
struct CascadeSpec {
  SignedDigraph upstream;
  ComponentStatus upstream_status = ComponentStatus::unknown;
  SignedDigraph downstream;
  ComponentStatus downstream_status = ComponentStatus::known_controllable;
  std::vector<NodeId> entries;
  std::vector<std::pair<NodeId, NodeId>> links;
  EdgeSign link_sign = EdgeSign::excitatory;
  double link_weight = 0.5;

  // Throws GraphError on out-of-range endpoints or links that do not end at an entry.
  void check() const;
};

struct CascadeComposition {
  // Upstream path nodes first (in upstream order), then all downstream nodes.
  SignedDigraph graph;
  std::vector<NodeId> upstream_nodes;  // upstream ids kept, in composite order
  std::vector<std::vector<NodeId>> paths;  // upstream ids, ending with the link source
};

struct CascadeVerdict {
  bool composable = false;
  std::optional<CascadeComposition> composite;
  StructuralVerdict structural;
  std::string message;
};

// Shortest input-to-entry path (BFS, lowest index first) through G1, then the
// structural test on path + link + G2 with the input kept at the path start only.
CascadeVerdict cascade_single_input_check(const CascadeSpec& spec, std::size_t trials = 20,
                                          std::uint64_t seed = 1);

struct MultiCascadeVerdict {
  bool sufficient_condition_met = false;
  std::optional<std::vector<std::vector<NodeId>>> disjoint_paths;
  CascadeVerdict verdict;
};

MultiCascadeVerdict cascade_multi_input_check(const CascadeSpec& spec, std::size_t trials = 20,
                                              std::uint64_t seed = 1);

struct CascadeAuditReport {
  std::size_t max_in_degree_parts = 0;
  std::size_t max_in_degree_composite = 0;
  StabilityCondition stability;
  bool stability_flagged = false;
  CactusVerdict cactus;
  std::vector<SlotRank> ranks;
  bool all_full_rank = false;
  std::vector<HurwitzReport> hurwitz;
  DropoutReport dropout;
  bool passed() const {
    return !stability_flagged && cactus.accepted && all_full_rank && dropout.passed();
  }
};

// Composition checks plus a simulation and per-slot rank audit. A non-positive
// stability margin is flagged and the simulation is skipped.
CascadeAuditReport cascade_dynamics_audit(const std::vector<CascadePart>& parts,
                                          const CascadeComposite& composite,
                                          const ModelParams& params, const InputSignal& u,
                                          const Eigen::VectorXd& x0, double horizon,
                                          const DropoutPlan& plan = {}, std::uint64_t seed = 1);

// Five cactus parts, two fed externally, joined by three links (one into a pure cycle).
struct FiveCascade {
  std::vector<CascadePart> parts;
  std::vector<CascadeLink> links;
};
FiveCascade five_part_cascade();

}  // namespace neurocactus
