#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "neurocactus/builtins.hpp"
#include "neurocactus/dynamics.hpp"
#include "neurocactus/kernels.hpp"
#include "neurocactus/scenario.hpp"

using namespace neurocactus;
namespace k = neurocactus::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& gen, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("scalar table is always available") {
    CHECK(k::scalar_table().isa == k::Isa::scalar);
    CHECK(k::active_table().rhs != nullptr);
    CHECK(k::padded_stride(1) == 4);
    CHECK(k::padded_stride(16) == 16);
    CHECK(k::padded_stride(17) == 20);
  }

  TEST_CASE("avx2 rhs matches the scalar reference") {
    const auto* avx = k::avx2_table();
    if (!avx) {
      MESSAGE("AVX2 unavailable; equivalence not exercised");
      return;
    }
    std::mt19937_64 gen(42);
    for (std::size_t n = 1; n <= 37; ++n) {
      const std::size_t ld = k::padded_stride(n);
      std::vector<double> a(n * ld, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto row = random_vec(gen, n, -1.2, 1.2);
        for (std::size_t j = 0; j < n; ++j) a[i * ld + j] = i == j ? 0.0 : row[j];
      }
      std::vector<double> x(ld, 0.0), bu(ld, 0.0);
      const auto xv = random_vec(gen, n, -2, 2), bv = random_vec(gen, n, -5, 5);
      std::copy(xv.begin(), xv.end(), x.begin());
      std::copy(bv.begin(), bv.end(), bu.begin());
      for (double theta : {0.0, 0.1, 0.5}) {
        std::vector<double> r1(ld, 0.0), r2(ld, 0.0);
        k::scalar_table().rhs(a.data(), ld, n, x.data(), 5.0, theta, bu.data(), r1.data());
        avx->rhs(a.data(), ld, n, x.data(), 5.0, theta, bu.data(), r2.data());
        for (std::size_t i = 0; i < n; ++i) {
          // Different summation order and fused multiply-add: agree to rounding,
          // except where the activation sits within rounding of the threshold.
          double dot = 0.0;
          for (std::size_t j = 0; j < n; ++j) dot += a[i * ld + j] * x[j];
          if (std::abs(std::abs(dot) - theta) < 1e-12) continue;
          CHECK(r2[i] == doctest::Approx(r1[i]).epsilon(1e-13).scale(10.0));
        }
      }
    }
  }

  TEST_CASE("avx2 hebbian step is bit-identical to the scalar reference") {
    const auto* avx = k::avx2_table();
    if (!avx) return;
    std::mt19937_64 gen(7);
    for (std::size_t count : {1u, 3u, 4u, 5u, 16u, 17u, 256u, 1031u}) {
      const auto a = random_vec(gen, count, -1.2, 1.2);
      const auto decay = random_vec(gen, count, 0.5, 1.0);
      auto sign = random_vec(gen, count, -1, 1);
      for (auto& s : sign) s = s < 0 ? -1.0 : 1.0;
      const auto phi = random_vec(gen, count, -1, 1);
      std::vector<double> lo(count), hi(count);
      for (std::size_t i = 0; i < count; ++i) {
        lo[i] = sign[i] > 0 ? 0.1 : -1.2;
        hi[i] = sign[i] > 0 ? 1.2 : -0.1;
        if (i % 7 == 0) lo[i] = hi[i] = 0.0;
      }
      std::vector<double> r1(count), r2(count);
      k::scalar_table().hebbian(count, a.data(), decay.data(), sign.data(), phi.data(), lo.data(), hi.data(),
                                r1.data());
      avx->hebbian(count, a.data(), decay.data(), sign.data(), phi.data(), lo.data(), hi.data(), r2.data());
      CHECK(r1 == r2);
    }
  }

  TEST_CASE("simulation agrees across kernel tables") {
    const auto* avx = k::avx2_table();
    if (!avx) return;
    const auto s = load(*builtin_scenario("sixteen_node"));
    SimulationOptions o1, o2;
    o1.kernel = &k::scalar_table();
    o2.kernel = avx;
    o1.stride = o2.stride = 100;
    const auto t1 = simulate(s.graph, s.scenario.params, s.signal, s.x0, 4.0, o1);
    const auto t2 = simulate(s.graph, s.scenario.params, s.signal, s.x0, 4.0, o2);
    REQUIRE(t1.states.size() == t2.states.size());
    for (std::size_t i = 0; i < t1.states.size(); ++i) {
      CHECK((t1.states[i] - t2.states[i]).lpNorm<Eigen::Infinity>() < 1e-10);
    }
    CHECK((t1.final_weights - t2.final_weights).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}
