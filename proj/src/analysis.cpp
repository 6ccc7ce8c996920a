#include "neurocactus/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "neurocactus/error.hpp"

namespace neurocactus {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

template <class Mat>
RankResult rank_of(const Mat& m) {
  RankResult r;
  if (m.size() == 0) {
    r.singular_values = Eigen::VectorXd();
    return r;
  }
  Eigen::BDCSVD<Mat> svd(m);
  r.singular_values = svd.singularValues().real();
  const double smax = r.singular_values.size() ? r.singular_values(0) : 0.0;
  r.tolerance = static_cast<double>(std::max(m.rows(), m.cols())) * kEps * smax;
  for (Eigen::Index i = 0; i < r.singular_values.size(); ++i) {
    if (r.singular_values(i) > r.tolerance) ++r.rank;
  }
  return r;
}

Eigen::MatrixXd normalized_krylov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.cols();
  Eigen::MatrixXd k(n, n * m);
  Eigen::MatrixXd block = b;
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double nrm = block.col(j).norm();
      if (nrm > 0.0 && std::isfinite(nrm)) block.col(j) /= nrm;
    }
    k.middleCols(p * m, m) = block;
    block = a * block;
  }
  return k;
}

Eigen::MatrixXd draw_pattern(const Eigen::MatrixXi& mask, std::mt19937_64& gen) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(mask.rows(), mask.cols());
  // Column-major walk fixes the draw order.
  for (Eigen::Index j = 0; j < mask.cols(); ++j) {
    for (Eigen::Index i = 0; i < mask.rows(); ++i) {
      if (mask(i, j) != 0) out(i, j) = (0.5 + uniform01(gen)) * (mask(i, j) < 0 ? -1.0 : 1.0);
    }
  }
  return out;
}

Eigen::MatrixXi to_mask(const Eigen::MatrixXd& m) {
  return m.unaryExpr([](double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); });
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RankResult numerical_rank(const Eigen::MatrixXd& m) { return rank_of(m); }

Eigen::MatrixXd controllability_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != a.cols() || b.rows() != a.rows()) throw ModelError("controllability: shape mismatch");
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.cols();
  Eigen::MatrixXd k(n, n * m);
  Eigen::MatrixXd block = b;
  for (Eigen::Index p = 0; p < n; ++p) {
    k.middleCols(p * m, m) = block;
    block = a * block;
  }
  return k;
}

RankResult controllability_rank(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != a.cols() || b.rows() != a.rows()) throw ModelError("controllability: shape mismatch");
  // The controllable subspace of (A - sI, B) does not depend on s. Removing the
  // mean diagonal keeps a dominant leak term from flattening the Krylov columns.
  const double shift = a.rows() ? a.trace() / static_cast<double>(a.rows()) : 0.0;
  const Eigen::MatrixXd centered = a - shift * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  return rank_of(normalized_krylov(centered, b));
}

RankResult observability_rank(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c) {
  if (a.rows() != a.cols() || c.cols() != a.rows()) throw ModelError("observability: shape mismatch");
  return controllability_rank(a.transpose(), c.transpose());
}

PbhResult pbh_left_eigentest(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != a.cols() || b.rows() != a.rows()) throw ModelError("pbh: shape mismatch");
  PbhResult r;
  const Eigen::Index n = a.rows();
  if (n == 0) return r;
  r.worst_ratio = std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  const Eigen::VectorXcd eig = es.eigenvalues();
  using CMat = Eigen::MatrixXcd;
  // A defective eigenvalue comes back split by roughly eps^(1/k); the mean of
  // each cluster of nearby eigenvalues is accurate, so it is tested as well.
  std::vector<std::complex<double>> points(eig.data(), eig.data() + eig.size());
  const double radius = 1e-4 * std::max(1.0, a.norm());
  std::vector<Eigen::Index> cluster(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) cluster[static_cast<std::size_t>(k)] = k;
  for (bool merged = true; merged;) {
    merged = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        auto& ci = cluster[static_cast<std::size_t>(i)];
        auto& cj = cluster[static_cast<std::size_t>(j)];
        if (ci != cj && std::abs(eig(i) - eig(j)) < radius) {
          ci = cj = std::min(ci, cj);
          merged = true;
        }
      }
    }
  }
  for (Eigen::Index c = 0; c < n; ++c) {
    std::complex<double> sum = 0.0;
    int count = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (cluster[static_cast<std::size_t>(k)] == c) {
        sum += eig(k);
        ++count;
      }
    }
    if (count > 1) points.push_back(sum / static_cast<double>(count));
  }
  for (const std::complex<double> w : points) {
    CMat m(n, n + b.cols());
    m.leftCols(n) = w * CMat::Identity(n, n) - a.cast<std::complex<double>>();
    m.rightCols(b.cols()) = b.cast<std::complex<double>>();
    const auto rr = rank_of(m);
    const double smin = rr.singular_values.size() >= n ? rr.singular_values(n - 1) : 0.0;
    const double ratio = rr.tolerance > 0.0 ? smin / rr.tolerance : 0.0;
    r.worst_ratio = std::min(r.worst_ratio, ratio);
    if (rr.rank < static_cast<std::size_t>(n) && r.controllable) {
      r.controllable = false;
      r.offending_eigenvalue = w;
    }
  }
  return r;
}

StructurePattern StructurePattern::from_graph(const SignedDigraph& g, bool with_signs) {
  StructurePattern p;
  const Eigen::MatrixXd s = g.sign_matrix();
  p.a = with_signs ? to_mask(s) : to_mask(s.cwiseAbs());
  p.b = to_mask(g.input_matrix().cwiseAbs());
  p.c = to_mask(g.output_matrix().cwiseAbs());
  p.signed_entries = with_signs;
  return p;
}

StructurePattern StructurePattern::from_matrices(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                                 const Eigen::MatrixXd& c) {
  StructurePattern p;
  p.a = to_mask(a.cwiseAbs());
  p.b = to_mask(b.cwiseAbs());
  p.c = c.size() ? to_mask(c.cwiseAbs()) : Eigen::MatrixXi(0, a.cols());
  return p;
}

void StructurePattern::check() const {
  if (a.rows() != a.cols()) throw ModelError("structure pattern: A must be square");
  if (b.size() && b.rows() != a.rows()) throw ModelError("structure pattern: B row count mismatch");
  if (c.size() && c.cols() != a.cols()) throw ModelError("structure pattern: C column count mismatch");
}

std::vector<std::size_t> inaccessible_nodes(const Eigen::MatrixXi& a, const Eigen::MatrixXi& b) {
  const Eigen::Index n = a.rows();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::deque<Eigen::Index> queue;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (b.cols() > 0 && (b.row(i).array() != 0).any()) {
      seen[i] = true;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const auto j = queue.front();
    queue.pop_front();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (a(i, j) != 0 && !seen[i]) {
        seen[i] = true;
        queue.push_back(i);
      }
    }
  }
  std::vector<std::size_t> out;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!seen[i]) out.push_back(static_cast<std::size_t>(i));
  }
  return out;
}

StructuralVerdict structural_test(const StructurePattern& p, std::size_t trials, std::uint64_t seed) {
  p.check();
  if (trials == 0) throw ModelError("structural_test needs at least one trial");
  StructuralVerdict v;
  const auto n = p.size();
  for (std::size_t t = 0; t < trials; ++t) {
    std::mt19937_64 gen(derive_seed(seed, t));
    Eigen::MatrixXd a = draw_pattern(p.a, gen);
    Eigen::MatrixXd b = draw_pattern(p.b, gen);
    const auto r = controllability_rank(a, b);
    v.trials = t + 1;
    v.rank_tolerance = r.tolerance;
    if (r.rank == n) {
      v.status = StructuralStatus::controllable;
      v.witness_a = std::move(a);
      v.witness_b = std::move(b);
      return v;
    }
  }
  v.inaccessible = inaccessible_nodes(p.a, p.b);
  v.certified_negative = !v.inaccessible.empty();
  return v;
}

StructuralVerdict structural_observability_test(const StructurePattern& p, std::size_t trials,
                                                std::uint64_t seed) {
  p.check();
  StructurePattern dual;
  dual.a = p.a.transpose();
  dual.b = p.c.size() ? Eigen::MatrixXi(p.c.transpose()) : Eigen::MatrixXi(p.a.rows(), 0);
  dual.signed_entries = p.signed_entries;
  return structural_test(dual, trials, seed);
}

std::vector<SlotRank> per_slot_rank_audit(const Trajectory& traj, const SignedDigraph& g,
                                          const ModelParams& params) {
  std::vector<SlotRank> out;
  const Eigen::MatrixXd b = g.input_matrix();
  const auto n = g.node_count();
  for (std::size_t p = 0; p < traj.weights.size(); ++p) {
    const auto r = controllability_rank(slot_system_matrix(traj.weights[p], params.leak), b);
    SlotRank s;
    s.slot = p;
    s.rank = r.rank;
    s.full = r.rank == n;
    s.sigma_min_ratio = (r.tolerance > 0.0 && r.singular_values.size() >= static_cast<Eigen::Index>(n) && n > 0)
                            ? r.singular_values(n - 1) / r.tolerance
                            : 0.0;
    out.push_back(s);
  }
  return out;
}

}  // namespace neurocactus
