#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "neurocactus/scenario.hpp"

namespace neurocactus {

using Point2 = std::array<double, 2>;

struct LabeledPoints {
  std::vector<Point2> points;
  std::vector<std::size_t> labels;  // generating center
};

// Equal share per center (remainder to the first centers), Box-Muller normals,
// presentation order shuffled. Deterministic in dataset.seed.
LabeledPoints synthetic_gaussians(const SyntheticDataset& dataset);

struct KMeans1D {
  std::vector<std::size_t> labels;  // cluster 0 has the smallest centroid
  std::vector<double> centroids;
  double cost = 0.0;  // within-cluster sum of squares
};

// Globally optimal 1-D k-means by dynamic programming over the sorted values.
// Ties go to the lower cluster index. Throws ModelError for k == 0.
KMeans1D kmeans_1d(const std::vector<double>& values, std::size_t k);

// Rand index: share of point pairs on which two labelings agree.
double pairwise_agreement(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

struct ClusterResult {
  std::vector<double> readouts;
  std::vector<bool> flagged;  // readout window not steady
  KMeans1D clusters;
  // Weights after each presented point.
  std::vector<Eigen::MatrixXd> weight_snapshots;
  std::size_t flagged_count() const;
};

// Presents each point for cluster.dwell seconds from scenario x0, weights carried
// over between points. Throws ScenarioError when the scenario has no cluster block.
ClusterResult run_clustering(const LoadedScenario& base, const std::vector<Point2>& points);

// "p1,p2" rows; an optional non-numeric header line is skipped. Throws ScenarioError.
std::vector<Point2> parse_points_csv(const std::string& text);

}  // namespace neurocactus
