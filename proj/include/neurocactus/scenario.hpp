#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "neurocactus/cactus.hpp"
#include "neurocactus/dynamics.hpp"
#include "neurocactus/graph.hpp"
#include "neurocactus/resilience.hpp"

namespace neurocactus {

struct AuditFlags {
  bool cactus = true;
  bool stability = true;
  bool hurwitz = true;
  bool ranks = true;
  bool structural = true;
  bool operator==(const AuditFlags&) const = default;
};

// Seeded mixture of isotropic 2-D Gaussians, equal counts per center.
struct SyntheticDataset {
  std::size_t points = 300;
  std::vector<std::pair<double, double>> centers;
  double sigma = 0.5;
  std::uint64_t seed = 0;
  bool operator==(const SyntheticDataset&) const = default;
};

struct ClusterConfig {
  std::vector<std::string> stimulus_nodes;  // (p1 node, p2 node)
  std::string readout;
  double dwell = 6.0;
  std::size_t k = 3;
  double readout_fraction = 0.1;  // trailing share of the dwell window averaged
  // Relative spread of the readout window above which a point is flagged.
  double steady_tolerance = 1e-2;
  SyntheticDataset dataset;
  bool operator==(const ClusterConfig&) const = default;
};

struct InputAssignment {
  std::string node;
  Waveform wave;
  bool operator==(const InputAssignment&) const = default;
};

struct Scenario {
  std::string name;
  std::string description;
  GraphSpec graph;
  DecompositionSpec decomposition;
  ModelParams params;
  std::vector<InputAssignment> inputs;  // one per graph input, any order
  std::vector<double> x0;
  double horizon = 1.0;
  std::uint64_t seed = 1;
  std::size_t record_stride = 1;
  std::size_t structural_trials = 20;
  AuditFlags audits;
  std::optional<DropoutPlan> dropout;
  std::optional<ClusterConfig> cluster;

  bool operator==(const Scenario&) const = default;
};

constexpr int kScenarioSchema = 1;

// Built, validated pieces of a scenario.
struct LoadedScenario {
  Scenario scenario;
  SignedDigraph graph;
  CactusDecomposition decomposition;
  InputSignal signal;  // in graph input order
  Eigen::VectorXd x0;
};

// What simulate() actually runs: a permanent dropout plan is applied to the graph
// (x0 and input channels follow the surviving nodes), an intermittent one
// becomes per-slot masks.
struct RunSetup {
  SignedDigraph graph;
  InputSignal signal;
  Eigen::VectorXd x0;
  std::vector<std::optional<Eigen::MatrixXd>> masks;
  std::size_t slot_count = 0;
};
RunSetup prepare_run(const LoadedScenario& s);

// Throws ScenarioError (field path + message) on schema violations and on any
// graph/model invariant failure.
Scenario parse_scenario_text(const std::string& text);
Scenario parse_scenario_file(const std::string& path);
std::string write_scenario(const Scenario& s);

// Enforces every cross-field invariant. Throws ScenarioError.
LoadedScenario load(const Scenario& s);

DropoutPlan parse_plan_text(const std::string& text);
DropoutPlan parse_plan_file(const std::string& path);
std::string write_plan(const DropoutPlan& p);

// NEUROCACTUS_SEED when set (decimal), else the scenario seed.
std::uint64_t effective_seed(const Scenario& s);

}  // namespace neurocactus
