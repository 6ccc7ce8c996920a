#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "neurocactus/dynamics.hpp"
#include "neurocactus/energy.hpp"
#include "neurocactus/graph.hpp"

namespace neurocactus {

// Shortest round-trip decimal form, locale independent.
std::string format_double(double v);

struct CsvRow {
  std::size_t line = 0;  // 1-based
  std::vector<double> values;
};

// Comma-separated numeric rows. Blank lines are skipped, as is a first line that
// does not parse as numbers. Throws ScenarioError("<what>:<line>", ...).
std::vector<CsvRow> parse_csv_numbers(const std::string& text, const std::string& what);

// Header t,x_1..x_N,y_1..y_M; one row per recorded sample.
std::string trajectory_csv(const Trajectory& tr, const SignedDigraph& g);

// Square matrix with a label column and a label header row; entry (i, j) is the edge j -> i.
std::string weights_csv(const Eigen::MatrixXd& a, const SignedDigraph& g);

// Rows slot_index,x_1..x_N. Indices must cover 0..P exactly once (any row order).
std::vector<Eigen::VectorXd> parse_waypoints_csv(const std::string& text, std::size_t n);
std::string waypoints_csv(const std::vector<Eigen::VectorXd>& waypoints);

// Sampled u*: header t,u_1..u_m, times shifted by t_offset.
std::string input_csv(const SteeringResult& r, double t_offset = 0.0);

struct PlotSelection {
  std::vector<NodeId> states;
  // One series per edge: its weight at each slot boundary.
  bool weights = false;
  std::string title;
};

PlotSelection all_states(const SignedDigraph& g, std::string title = {});

// Self-contained SVG line plot with axes and legend. Throws ModelError on an empty
// selection or an empty trajectory.
std::string emit_svg(const Trajectory& tr, const SignedDigraph& g, const PlotSelection& sel);

std::string read_text_file(const std::string& path);
// Throws Error when the file cannot be written.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace neurocactus
