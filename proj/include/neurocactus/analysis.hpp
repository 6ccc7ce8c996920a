#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "neurocactus/dynamics.hpp"
#include "neurocactus/graph.hpp"

namespace neurocactus {

struct RankResult {
  std::size_t rank = 0;
  Eigen::VectorXd singular_values;  // descending
  double tolerance = 0.0;           // n * eps * sigma_max
};

// Numerical rank of M via SVD with tolerance max(rows, cols) * eps * sigma_max.
RankResult numerical_rank(const Eigen::MatrixXd& m);

// [B, AB, ..., A^{n-1} B]
Eigen::MatrixXd controllability_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Rank of the controllability matrix of (A - sI, B) with s the mean diagonal
// entry (same rank for every s). Each Krylov column is scaled to unit length
// before the SVD (rank preserving) so that fast modes do not swamp the
// threshold; zero columns stay zero.
RankResult controllability_rank(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
RankResult observability_rank(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c);

struct PbhResult {
  bool controllable = true;
  std::optional<std::complex<double>> offending_eigenvalue;
  // Smallest sigma_min / tolerance over all tested eigenvalues.
  double worst_ratio = 0.0;
};

PbhResult pbh_left_eigentest(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Zero/nonzero masks with an optional sign overlay: entries are -1, 0 or +1;
// without signs every nonzero is +1.
struct StructurePattern {
  Eigen::MatrixXi a;
  Eigen::MatrixXi b;
  Eigen::MatrixXi c;
  bool signed_entries = false;

  static StructurePattern from_graph(const SignedDigraph& g, bool with_signs = true);
  static StructurePattern from_matrices(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                        const Eigen::MatrixXd& c = {});
  std::size_t size() const { return static_cast<std::size_t>(a.rows()); }
  // Throws ModelError when shapes disagree.
  void check() const;
};

enum class StructuralStatus { controllable, likely_uncontrollable };

struct StructuralVerdict {
  StructuralStatus status = StructuralStatus::likely_uncontrollable;
  std::optional<Eigen::MatrixXd> witness_a;
  std::optional<Eigen::MatrixXd> witness_b;  // B for controllability, C^T for observability
  std::size_t trials = 0;                     // draws actually made
  double rank_tolerance = 0.0;
  // Exact negative: some node is not reachable from the inputs.
  bool certified_negative = false;
  std::vector<std::size_t> inaccessible;

  bool controllable() const { return status == StructuralStatus::controllable; }
};

// Draws nonzero entries from U[0.5, 1.5] (times the overlay sign), stops at
// the first full-rank draw. Trial k uses seed derive_seed(seed, k).
StructuralVerdict structural_test(const StructurePattern& p, std::size_t trials = 20,
                                  std::uint64_t seed = 1);
StructuralVerdict structural_observability_test(const StructurePattern& p, std::size_t trials = 20,
                                                std::uint64_t seed = 1);

// Nodes not reachable from any input along the pattern of A.
std::vector<std::size_t> inaccessible_nodes(const Eigen::MatrixXi& a, const Eigen::MatrixXi& b);

struct SlotRank {
  std::size_t slot = 0;
  std::size_t rank = 0;
  bool full = false;
  double sigma_min_ratio = 0.0;  // sigma_min / tolerance
};

// Controllability rank of (-c_n I + A_p, B) for every recorded slot.
std::vector<SlotRank> per_slot_rank_audit(const Trajectory& traj, const SignedDigraph& g,
                                          const ModelParams& params);

// splitmix64 of seed ^ index; used for per-trial and per-job seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);
// Uniform double in [0, 1) from the top 53 bits.
template <class Gen>
double uniform01(Gen& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace neurocactus
