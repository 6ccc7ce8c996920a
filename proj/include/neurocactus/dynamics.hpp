#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "neurocactus/graph.hpp"
#include "neurocactus/kernels.hpp"

namespace neurocactus {

enum class PhiKind { tanh, softsign };

struct ModelParams {
  double leak = 5.0;        // c_n
  double decay_pos = 0.98;  // c_a+
  double decay_neg = 0.98;  // c_a-
  double threshold = 0.1;   // theta
  double slot = 0.2;        // tau, seconds
  double dt = 1e-3;
  PhiKind phi = PhiKind::tanh;
  // Multiplies phi. 0 freezes plasticity apart from decay.
  double phi_scale = 1.0;
  double u_max = 5.0;

  // Throws ModelError. Decay factors must lie in (0, 1].
  void validate() const;
  // Integer tau/dt; throws ModelError when dt does not divide tau.
  std::size_t steps_per_slot() const;

  bool operator==(const ModelParams&) const = default;
};

enum class WaveKind { zero, constant, sine };

// constant: amp. sine: amp * sin(freq * t + phase), freq in rad/s.
struct Waveform {
  WaveKind kind = WaveKind::zero;
  double amp = 0.0;
  double freq = 0.0;
  double phase = 0.0;

  double operator()(double t) const;
  double peak() const;

  static Waveform constant(double v) { return {WaveKind::constant, v, 0.0, 0.0}; }
  static Waveform sine(double amp, double freq, double phase) {
    return {WaveKind::sine, amp, freq, phase};
  }

  bool operator==(const Waveform&) const = default;
};

// One waveform per input channel, in the graph's input order.
struct InputSignal {
  std::vector<Waveform> channels;

  Eigen::VectorXd at(double t) const;
  double peak() const;

  bool operator==(const InputSignal&) const = default;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> outputs;
  // weights[p] is A_p, the matrix active during slot p.
  std::vector<Eigen::MatrixXd> weights;
  // A_P after the last slot's update.
  Eigen::MatrixXd final_weights;
  // Sample index of t = p * tau for p = 0..P.
  std::vector<std::size_t> slot_boundaries;
  std::size_t slot_count() const { return weights.size(); }
};

double gamma_theta(double v, double theta);
double phi_eval(double z, PhiKind kind = PhiKind::tanh);

// Clipped Hebbian step. Throws ModelError on a nonzero diagonal or a shape mismatch.
Eigen::MatrixXd weight_update(const Eigen::MatrixXd& a, const Eigen::VectorXd& x,
                              const SignedDigraph& g, const ModelParams& params);

struct SlotSamples {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;  // includes the endpoint
  Eigen::VectorXd end;
};

// RK4 over one slot with A frozen. Records every `stride`-th step plus the endpoint.
// Throws DivergenceError on a non-finite state.
SlotSamples step_slot(const Eigen::VectorXd& x0, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                      const InputSignal& u, const ModelParams& params, double t_start,
                      std::size_t stride = 1,
                      const kernels::KernelTable& k = kernels::active_table());

struct SimulationOptions {
  std::size_t stride = 1;
  // Per-slot availability masks (1 = present). Masked entries contribute nothing
  // to the flow during that slot and keep their weight through the update.
  std::vector<std::optional<Eigen::MatrixXd>> masks;
  bool enforce_stability = false;
  const kernels::KernelTable* kernel = nullptr;
};

// Throws ModelError on bad params, a dimension mismatch or a horizon that is not
// a multiple of tau; DivergenceError on blow-up.
Trajectory simulate(const SignedDigraph& g, const ModelParams& params, const InputSignal& u,
                    const Eigen::VectorXd& x0, double horizon, const SimulationOptions& opts = {});

struct WeightAudit {
  std::size_t bound_violations = 0;  // entries outside their clip interval
  std::size_t pattern_changes = 0;   // entries whose sign differs from the graph's
};

// Checks every A_p and the final weights against g.
WeightAudit audit_weights(const Trajectory& tr, const SignedDigraph& g);

struct StabilityCondition {
  bool holds = false;
  double margin = 0.0;
};

StabilityCondition stability_condition(const SignedDigraph& g, const ModelParams& params);

// ||B u||_inf / margin. Throws ModelError("invariant set undefined") if the margin is not positive.
double invariant_bound(const SignedDigraph& g, const ModelParams& params);

struct HurwitzReport {
  bool diagonally_dominant = false;
  double dominance_gap = 0.0;  // min_i (c_n - sum_j |a_ij|)
  double max_real_eigenvalue = 0.0;
  bool hurwitz = false;
};

// Audit of -c_n I + A: strict row dominance and eigenvalue real parts < -tol.
HurwitzReport hurwitz_audit(const Eigen::MatrixXd& a, double leak, double tol = 1e-10);

// -c_n I + A
Eigen::MatrixXd slot_system_matrix(const Eigen::MatrixXd& a, double leak);

}  // namespace neurocactus
