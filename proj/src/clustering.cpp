#include "neurocactus/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "neurocactus/analysis.hpp"
#include "neurocactus/error.hpp"
#include "neurocactus/io.hpp"

namespace neurocactus {

LabeledPoints synthetic_gaussians(const SyntheticDataset& ds) {
  if (ds.centers.empty()) throw ModelError("synthetic dataset needs at least one center");
  std::mt19937_64 gen(ds.seed);
  auto normal = [&] {
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform01(gen);
    const double u2 = uniform01(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  };
  LabeledPoints out;
  const std::size_t c = ds.centers.size();
  for (std::size_t k = 0; k < c; ++k) {
    const std::size_t count = ds.points / c + (k < ds.points % c ? 1 : 0);
    for (std::size_t i = 0; i < count; ++i) {
      const double x = ds.centers[k].first + ds.sigma * normal();
      const double y = ds.centers[k].second + ds.sigma * normal();
      out.points.push_back({x, y});
      out.labels.push_back(k);
    }
  }
  for (std::size_t i = out.points.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform01(gen) * static_cast<double>(i));
    std::swap(out.points[i - 1], out.points[j]);
    std::swap(out.labels[i - 1], out.labels[j]);
  }
  return out;
}

KMeans1D kmeans_1d(const std::vector<double>& values, std::size_t k) {
  if (k == 0) throw ModelError("k must be at least 1");
  KMeans1D out;
  const std::size_t n = values.size();
  if (n == 0) return out;
  k = std::min(k, n);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  std::vector<double> v(n), s1(n + 1, 0.0), s2(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = values[order[i]];
    s1[i + 1] = s1[i] + v[i];
    s2[i + 1] = s2[i] + v[i] * v[i];
  }
  // sum of squares of v[i..j)
  auto ssq = [&](std::size_t i, std::size_t j) {
    const double m = static_cast<double>(j - i);
    const double s = s1[j] - s1[i];
    return std::max(0.0, s2[j] - s2[i] - s * s / m);
  };

  const double inf = std::numeric_limits<double>::infinity();
  // cost[c][j]: best cost of v[0..j) in c+1 clusters; cut[c][j]: start of the last cluster.
  std::vector<std::vector<double>> cost(k, std::vector<double>(n + 1, inf));
  std::vector<std::vector<std::size_t>> cut(k, std::vector<std::size_t>(n + 1, 0));
  for (std::size_t j = 1; j <= n; ++j) cost[0][j] = ssq(0, j);
  for (std::size_t c = 1; c < k; ++c) {
    for (std::size_t j = c + 1; j <= n; ++j) {
      for (std::size_t i = c; i < j; ++i) {
        const double t = cost[c - 1][i] + ssq(i, j);
        if (t < cost[c][j]) {
          cost[c][j] = t;
          cut[c][j] = i;
        }
      }
    }
  }
  std::vector<std::size_t> start(k, 0);
  std::size_t j = n;
  for (std::size_t c = k; c-- > 0;) {
    start[c] = c == 0 ? 0 : cut[c][j];
    j = start[c];
  }
  out.cost = cost[k - 1][n];
  out.labels.assign(n, 0);
  out.centroids.assign(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t end = c + 1 < k ? start[c + 1] : n;
    out.centroids[c] = (s1[end] - s1[start[c]]) / static_cast<double>(end - start[c]);
    for (std::size_t i = start[c]; i < end; ++i) out.labels[order[i]] = c;
  }
  return out;
}

double pairwise_agreement(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  if (a.size() != b.size()) throw ModelError("labelings differ in length");
  const std::size_t n = a.size();
  if (n < 2) return 1.0;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((a[i] == a[j]) == (b[i] == b[j])) ++agree;
    }
  }
  return static_cast<double>(agree) / static_cast<double>(n * (n - 1) / 2);
}

std::size_t ClusterResult::flagged_count() const {
  return static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), true));
}

ClusterResult run_clustering(const LoadedScenario& base, const std::vector<Point2>& points) {
  if (!base.scenario.cluster) throw ScenarioError("cluster", "scenario has no cluster block");
  const auto& cfg = *base.scenario.cluster;
  const auto& params = base.scenario.params;
  SignedDigraph g = base.graph;

  std::size_t ch[2] = {0, 0};
  for (std::size_t s = 0; s < 2; ++s) {
    const NodeId node = g.require_node(cfg.stimulus_nodes[s]);
    for (std::size_t k = 0; k < g.inputs().size(); ++k) {
      if (g.inputs()[k].node == node) ch[s] = k;
    }
  }
  const auto readout = static_cast<Eigen::Index>(g.require_node(cfg.readout));

  ClusterResult out;
  for (const auto& p : points) {
    InputSignal u = base.signal;
    u.channels[ch[0]] = Waveform::constant(p[0]);
    u.channels[ch[1]] = Waveform::constant(p[1]);
    const Trajectory tr = simulate(g, params, u, base.x0, cfg.dwell);

    const double from = cfg.dwell * (1.0 - cfg.readout_fraction) - 1e-9;
    double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::size_t count = 0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      if (tr.times[i] < from) continue;
      const double y = tr.states[i][readout];
      sum += y;
      lo = std::min(lo, y);
      hi = std::max(hi, y);
      ++count;
    }
    const double mean = sum / static_cast<double>(count);
    out.readouts.push_back(mean);
    out.flagged.push_back(hi - lo > cfg.steady_tolerance * std::max(std::abs(mean), 1e-12));
    g = with_weights(g, tr.final_weights);
    out.weight_snapshots.push_back(tr.final_weights);
  }
  out.clusters = kmeans_1d(out.readouts, cfg.k);
  return out;
}

std::vector<Point2> parse_points_csv(const std::string& text) {
  std::vector<Point2> out;
  for (const auto& row : parse_csv_numbers(text, "points")) {
    if (row.values.size() != 2) {
      throw ScenarioError("points:" + std::to_string(row.line), "expected two columns p1,p2");
    }
    out.push_back({row.values[0], row.values[1]});
  }
  return out;
}

}  // namespace neurocactus
