#include <doctest.h>

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>

#include "neurocactus/builtins.hpp"
#include "neurocactus/clustering.hpp"
#include "neurocactus/error.hpp"
#include "neurocactus/scenario.hpp"

using namespace neurocactus;

namespace {

// Exhaustive optimum over all contiguous splits of sorted values into k groups.
double brute_cost(std::vector<double> v, std::size_t k) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  double best = 1e300;
  std::vector<std::size_t> cuts(k - 1);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t idx, std::size_t start) {
    if (idx == k - 1) {
      double cost = 0.0;
      std::size_t lo = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const std::size_t hi = c + 1 < k ? cuts[c] : n;
        const double mean = std::accumulate(v.begin() + lo, v.begin() + hi, 0.0) / double(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) cost += (v[i] - mean) * (v[i] - mean);
        lo = hi;
      }
      best = std::min(best, cost);
      return;
    }
    for (std::size_t c = start; c + (k - 1 - idx) <= n; ++c) {
      cuts[idx] = c;
      rec(idx + 1, c + 1);
    }
  };
  rec(0, 1);
  return best;
}

}  // namespace

TEST_SUITE("clustering") {
  TEST_CASE("one-dimensional k-means") {
    const auto one = kmeans_1d({3.0, 1.0, 2.0}, 1);
    CHECK(one.labels == std::vector<std::size_t>{0, 0, 0});
    CHECK(one.centroids[0] == doctest::Approx(2.0));
    CHECK(one.cost == doctest::Approx(2.0));

    const auto three = kmeans_1d({10.0, 0.0, 5.1, 0.1, 9.9, 5.0}, 3);
    CHECK(three.labels == std::vector<std::size_t>{2, 0, 1, 0, 2, 1});
    CHECK(three.cost == doctest::Approx(0.015));

    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> d(0, 1);
    for (int t = 0; t < 20; ++t) {
      std::vector<double> v(9);
      for (auto& x : v) x = d(gen);
      for (std::size_t k = 1; k <= 4; ++k) CHECK(kmeans_1d(v, k).cost == doctest::Approx(brute_cost(v, k)).epsilon(1e-12));
    }
    CHECK(kmeans_1d({1.0, 2.0}, 5).centroids.size() == 2);
    CHECK_THROWS_AS(kmeans_1d({1.0}, 0), ModelError);
  }

  TEST_CASE("pairwise agreement") {
    CHECK(pairwise_agreement({0, 0, 1, 1}, {1, 1, 0, 0}) == 1.0);
    CHECK(pairwise_agreement({0, 0, 0}, {0, 1, 2}) == 0.0);
    CHECK(pairwise_agreement({0, 0, 1}, {0, 1, 1}) == doctest::Approx(1.0 / 3.0));
  }

  TEST_CASE("synthetic data is deterministic and balanced") {
    SyntheticDataset ds;
    ds.points = 10;
    ds.centers = {{0, 0}, {5, 5}, {9, 9}};
    ds.sigma = 0.1;
    ds.seed = 3;
    const auto a = synthetic_gaussians(ds);
    const auto b = synthetic_gaussians(ds);
    CHECK(a.points == b.points);
    CHECK(a.labels == b.labels);
    CHECK(std::count(a.labels.begin(), a.labels.end(), 0u) == 4);
    CHECK(std::count(a.labels.begin(), a.labels.end(), 2u) == 3);
    ds.seed = 4;
    CHECK(synthetic_gaussians(ds).points != a.points);
  }

  TEST_CASE("identical consecutive points get the same cluster") {
    const auto s = load(*builtin_scenario("clustering"));
    const std::vector<Point2> pts{{1, 1}, {1, 1}, {7, 7}, {7, 7}, {4, 4}, {4, 4}};
    const auto r = run_clustering(s, pts);
    CHECK(r.flagged_count() == 0);
    for (std::size_t i = 0; i < pts.size(); i += 2) CHECK(r.clusters.labels[i] == r.clusters.labels[i + 1]);
    CHECK(r.weight_snapshots.size() == pts.size());
  }

  TEST_CASE("frozen plasticity makes the readout order independent") {
    auto sc = *builtin_scenario("clustering");
    sc.params.decay_pos = 1.0;
    sc.params.decay_neg = 1.0;
    sc.params.phi_scale = 0.0;
    const auto s = load(sc);
    const std::vector<Point2> pts{{1, 2}, {4, 3}, {7, 6}, {2, 2}};
    const std::vector<Point2> rev(pts.rbegin(), pts.rend());
    const auto a = run_clustering(s, pts);
    const auto b = run_clustering(s, rev);
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(a.readouts[i] == b.readouts[pts.size() - 1 - i]);
  }

  TEST_CASE("builtin clustering recovers the generating labels") {
    const auto s = load(*builtin_scenario("clustering"));
    const auto data = synthetic_gaussians(s.scenario.cluster->dataset);
    const auto r = run_clustering(s, data.points);
    CHECK(r.flagged_count() == 0);
    CHECK(pairwise_agreement(r.clusters.labels, data.labels) >= 0.95);
  }

  TEST_CASE("points CSV and missing cluster block") {
    const auto pts = parse_points_csv("p1,p2\n1,2\n\n3.5,-4\n");
    REQUIRE(pts.size() == 2);
    CHECK(pts[1] == Point2{3.5, -4});
    CHECK_THROWS_AS(parse_points_csv("1,2,3\n"), ScenarioError);
    CHECK_THROWS_AS(run_clustering(load(*builtin_scenario("macaque")), pts), ScenarioError);
  }
}
