#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Core>

namespace neurocactus {

// e^M by Pade-13 scaling and squaring. Throws ModelError on non-finite input.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& m);

enum class GramianMethod { simpson, van_loan };

// W(t_f) = int_0^{t_f} e^{A s} B B^T e^{A^T s} ds, symmetrized.
// simpson uses `panels` composite Simpson panels (rounded up to even).
// Internally evaluated with 50 significant digits, returned rounded to double.
Eigen::MatrixXd gramian(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double t_f,
                        std::size_t panels = 400, GramianMethod method = GramianMethod::simpson);

struct SteeringResult {
  double eta = 0.0;
  double gramian_condition = 0.0;
  // ||x(t_f) - x_f|| / max(||x_f||, ||x_f - e^{A t_f} x_0||, 1e-300), with x(t_f) obtained by
  // propagating the closed loop through a separate exponential.
  double endpoint_error = 0.0;
  Eigen::VectorXd reached;
  Eigen::VectorXd lambda;  // W^{-1}(x_f - e^{A t_f} x_0)
  // u*(t) at sample_times (columns), filled when samples were requested.
  std::vector<double> sample_times;
  Eigen::MatrixXd samples;
  // Simpson integral of ||u*||^2 over the samples (0 when none requested).
  double sampled_energy = 0.0;
};

// Precomputed per-slot data (Gramian, its factorization, exponentials) for a
// frozen pair (A, B) over [0, t_f]. Cheap to copy.
class SlotSystem {
 public:
  // Throws SteeringError("not steerable with these inputs") when W is singular to
  // working precision.
  SlotSystem(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double t_f);

  // sample_count > 0 requests u* on an even grid with sample_count intervals.
  SteeringResult steer(const Eigen::VectorXd& x0, const Eigen::VectorXd& xf,
                       std::size_t sample_count = 0) const;

  double condition() const;
  Eigen::MatrixXd gramian() const;
  Eigen::Index states() const;
  Eigen::Index inputs() const;
  double horizon() const;

  struct Impl;

 private:
  std::shared_ptr<const Impl> impl_;
};

SteeringResult min_energy_steering(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                   const Eigen::VectorXd& x0, const Eigen::VectorXd& xf, double t_f,
                                   std::size_t sample_count = 0);

struct SteeringProblem {
  std::vector<Eigen::MatrixXd> slot_matrices;  // H_p
  Eigen::MatrixXd b;
  std::vector<Eigen::VectorXd> waypoints;  // slot_matrices.size() + 1 entries
  double slot = 0.2;

  void check() const;
};

struct EnergyReport {
  std::vector<double> per_slot;
  double total = 0.0;
  std::vector<double> conditions;
  std::vector<double> endpoint_errors;
};

EnergyReport piecewise_energy(const SteeringProblem& prob);
EnergyReport piecewise_energy(const std::vector<SlotSystem>& slots,
                              const std::vector<Eigen::VectorXd>& waypoints);

struct AugmentationResult {
  EnergyReport base;
  EnergyReport augmented;
  bool satisfied = false;           // total_aug <= total + 1e-8
  bool per_slot_satisfied = false;  // same inequality on every slot
};

// b_aug must start with the columns of b followed by canonical-vector columns.
void check_augmentation(const Eigen::MatrixXd& b, const Eigen::MatrixXd& b_aug);

AugmentationResult augmentation_monotonicity(const SteeringProblem& prob, const Eigen::MatrixXd& b_aug);
AugmentationResult augmentation_monotonicity(const std::vector<SlotSystem>& base,
                                             const std::vector<SlotSystem>& augmented,
                                             const std::vector<Eigen::VectorXd>& waypoints);

std::vector<SlotSystem> build_slot_systems(const std::vector<Eigen::MatrixXd>& slot_matrices,
                                           const Eigen::MatrixXd& b, double slot);

}  // namespace neurocactus
