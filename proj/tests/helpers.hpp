#pragma once

#include <string>
#include <vector>

#include "neurocactus/dynamics.hpp"
#include "neurocactus/graph.hpp"

namespace testing {

using neurocactus::EdgeSign;
using neurocactus::GraphSpec;

inline std::vector<std::string> labels(int n) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(std::to_string(i));
  return out;
}

inline GraphSpec::EdgeSpec edge(const std::string& s, const std::string& t, double w) {
  return {s, t, w < 0 ? EdgeSign::inhibitory : EdgeSign::excitatory, w};
}

// 1 -> 2 -> ... -> n, input at 1, output at n.
inline GraphSpec chain_spec(int n, double w = 0.5) {
  GraphSpec g;
  g.nodes = labels(n);
  for (int i = 1; i < n; ++i) g.edges.push_back(edge(std::to_string(i), std::to_string(i + 1), w));
  g.inputs = {{"1", 1.0}};
  g.outputs = {std::to_string(n)};
  return g;
}

// Simulation options that only set the recording stride.
inline neurocactus::SimulationOptions every(std::size_t stride) {
  neurocactus::SimulationOptions o;
  o.stride = stride;
  return o;
}

}  // namespace testing
