#include "neurocactus/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "neurocactus/error.hpp"

namespace neurocactus {

namespace {

bool is_whole_multiple(double total, double unit, std::size_t& count) {
  const double q = total / unit;
  const double r = std::round(q);
  if (r < 1.0 || std::abs(q - r) > 1e-9 * std::max(1.0, r)) return false;
  count = static_cast<std::size_t>(r);
  return true;
}

// Row-major, zero-padded copy of a square matrix.
std::vector<double> pack_rows(const Eigen::MatrixXd& a, std::size_t ld) {
  const auto n = static_cast<std::size_t>(a.rows());
  std::vector<double> out(std::max<std::size_t>(n, 1) * ld, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i * ld + j] = a(i, j);
  }
  return out;
}

struct UpdateTables {
  Eigen::MatrixXd decay, sign, lo, hi;
};

UpdateTables update_tables(const SignedDigraph& g, const ModelParams& p) {
  UpdateTables t;
  t.sign = g.sign_matrix();
  t.lo = g.lower_bound_matrix();
  t.hi = g.upper_bound_matrix();
  t.decay = t.sign.unaryExpr([&](double s) {
    return s > 0 ? p.decay_pos : (s < 0 ? p.decay_neg : 0.0);
  });
  return t;
}

Eigen::MatrixXd apply_update(const Eigen::MatrixXd& a, const Eigen::VectorXd& x,
                             const UpdateTables& t, const ModelParams& p,
                             const kernels::KernelTable& k) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd phi(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      phi(i, j) = t.sign(i, j) == 0.0 ? 0.0 : p.phi_scale * phi_eval(x(i) * x(j), p.phi);
    }
  }
  Eigen::MatrixXd out(n, n);
  k.hebbian(static_cast<std::size_t>(n * n), a.data(), t.decay.data(), t.sign.data(), phi.data(),
            t.lo.data(), t.hi.data(), out.data());
  return out;
}

}  // namespace

void ModelParams::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(leak)) throw ModelError("leak rate c_n must be positive");
  if (!(decay_pos > 0.0 && decay_pos <= 1.0)) throw ModelError("c_a+ must lie in (0, 1]");
  if (!(decay_neg > 0.0 && decay_neg <= 1.0)) throw ModelError("c_a- must lie in (0, 1]");
  if (!(std::isfinite(threshold) && threshold >= 0.0)) throw ModelError("theta must be >= 0");
  if (!positive(slot)) throw ModelError("tau must be positive");
  if (!positive(dt)) throw ModelError("dt must be positive");
  if (!(std::isfinite(phi_scale) && phi_scale >= 0.0)) throw ModelError("phi_scale must be >= 0");
  if (!(std::isfinite(u_max) && u_max >= 0.0)) throw ModelError("u_max must be >= 0");
  steps_per_slot();
}

std::size_t ModelParams::steps_per_slot() const {
  std::size_t steps = 0;
  if (!is_whole_multiple(slot, dt, steps)) {
    throw ModelError("dt " + std::to_string(dt) + " does not divide tau " + std::to_string(slot));
  }
  return steps;
}

double Waveform::operator()(double t) const {
  switch (kind) {
    case WaveKind::zero:
      return 0.0;
    case WaveKind::constant:
      return amp;
    case WaveKind::sine:
      return amp * std::sin(freq * t + phase);
  }
  return 0.0;
}

double Waveform::peak() const { return kind == WaveKind::zero ? 0.0 : std::abs(amp); }

Eigen::VectorXd InputSignal::at(double t) const {
  Eigen::VectorXd u(channels.size());
  for (std::size_t k = 0; k < channels.size(); ++k) u(k) = channels[k](t);
  return u;
}

double InputSignal::peak() const {
  double m = 0.0;
  for (const auto& c : channels) m = std::max(m, c.peak());
  return m;
}

double gamma_theta(double v, double theta) { return std::abs(v) > theta ? v : 0.0; }

double phi_eval(double z, PhiKind kind) {
  switch (kind) {
    case PhiKind::tanh:
      return std::tanh(z);
    case PhiKind::softsign:
      return z / (1.0 + std::abs(z));
  }
  return 0.0;
}

Eigen::MatrixXd weight_update(const Eigen::MatrixXd& a, const Eigen::VectorXd& x,
                              const SignedDigraph& g, const ModelParams& params) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  if (a.rows() != n || a.cols() != n || x.size() != n) {
    throw ModelError("weight_update dimension mismatch");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a(i, i) != 0.0) throw ModelError("weight matrix has a nonzero diagonal entry");
  }
  return apply_update(a, x, update_tables(g, params), params, kernels::active_table());
}

SlotSamples step_slot(const Eigen::VectorXd& x0, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                      const InputSignal& u, const ModelParams& params, double t_start,
                      std::size_t stride, const kernels::KernelTable& k) {
  const std::size_t n = static_cast<std::size_t>(x0.size());
  if (a.rows() != x0.size() || a.cols() != x0.size() || b.rows() != x0.size() ||
      b.cols() != static_cast<Eigen::Index>(u.channels.size())) {
    throw ModelError("step_slot dimension mismatch");
  }
  const std::size_t steps = params.steps_per_slot();
  const double dt = params.dt;
  if (stride == 0) stride = 1;
  const std::size_t ld = kernels::padded_stride(std::max<std::size_t>(n, 1));
  const auto packed = pack_rows(a, ld);

  std::vector<double> x(ld, 0.0), tmp(ld, 0.0), bu(ld, 0.0);
  std::vector<double> k1(ld), k2(ld), k3(ld), k4(ld);
  for (std::size_t i = 0; i < n; ++i) x[i] = x0(i);

  auto load_bu = [&](double t) {
    const Eigen::VectorXd v = b * u.at(t);
    for (std::size_t i = 0; i < n; ++i) bu[i] = v(i);
  };
  auto rhs = [&](const std::vector<double>& xs, std::vector<double>& out) {
    k.rhs(packed.data(), ld, n, xs.data(), params.leak, params.threshold, bu.data(), out.data());
  };

  SlotSamples s;
  for (std::size_t step = 0; step < steps; ++step) {
    const double t = t_start + static_cast<double>(step) * dt;
    load_bu(t);
    rhs(x, k1);
    load_bu(t + 0.5 * dt);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    rhs(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    rhs(tmp, k3);
    load_bu(t + dt);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
    rhs(tmp, k4);
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      finite = finite && std::isfinite(x[i]);
    }
    if (!finite) {
      throw DivergenceError("state became non-finite at t = " + std::to_string(t + dt));
    }
    if ((step + 1) % stride == 0 || step + 1 == steps) {
      s.times.push_back(t_start + static_cast<double>(step + 1) * dt);
      s.states.push_back(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(n)));
    }
  }
  s.end = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(n));
  return s;
}

Trajectory simulate(const SignedDigraph& g, const ModelParams& params, const InputSignal& u,
                    const Eigen::VectorXd& x0, double horizon, const SimulationOptions& opts) {
  params.validate();
  const auto n = static_cast<Eigen::Index>(g.node_count());
  if (g.has_self_loops()) throw ModelError("self-loops are not allowed in the dynamics");
  if (x0.size() != n) throw ModelError("initial state has wrong dimension");
  if (u.channels.size() != g.inputs().size()) {
    throw ModelError("input signal has " + std::to_string(u.channels.size()) +
                     " channels, graph has " + std::to_string(g.inputs().size()) + " inputs");
  }
  if (u.peak() > params.u_max * (1.0 + 1e-12)) throw ModelError("input amplitude exceeds u_max");
  std::size_t slots = 0;
  if (!is_whole_multiple(horizon, params.slot, slots)) {
    throw ModelError("horizon must be a positive multiple of tau");
  }
  if (!opts.masks.empty() && opts.masks.size() != slots) {
    throw ModelError("dropout mask count must equal the slot count");
  }
  for (const auto& m : opts.masks) {
    if (m && (m->rows() != n || m->cols() != n)) throw ModelError("dropout mask dimension mismatch");
  }
  if (opts.enforce_stability && !stability_condition(g, params).holds) {
    throw ModelError("stability condition violated");
  }

  const auto& k = opts.kernel ? *opts.kernel : kernels::active_table();
  const Eigen::MatrixXd b = g.input_matrix();
  const Eigen::MatrixXd c = g.output_matrix();
  const UpdateTables tables = update_tables(g, params);
  const std::size_t steps = params.steps_per_slot();

  Trajectory tr;
  tr.times.push_back(0.0);
  tr.states.push_back(x0);
  tr.outputs.push_back(c * x0);
  tr.slot_boundaries.push_back(0);

  Eigen::MatrixXd a = g.weight_matrix();
  Eigen::VectorXd x = x0;
  for (std::size_t p = 0; p < slots; ++p) {
    tr.weights.push_back(a);
    const Eigen::MatrixXd* mask = (!opts.masks.empty() && opts.masks[p]) ? &*opts.masks[p] : nullptr;
    const Eigen::MatrixXd active = mask ? Eigen::MatrixXd(a.cwiseProduct(*mask)) : a;
    const double t0 = static_cast<double>(p * steps) * params.dt;
    auto s = step_slot(x, active, b, u, params, t0, opts.stride, k);
    for (std::size_t i = 0; i < s.states.size(); ++i) {
      tr.times.push_back(s.times[i]);
      tr.outputs.push_back(c * s.states[i]);
      tr.states.push_back(std::move(s.states[i]));
    }
    tr.slot_boundaries.push_back(tr.states.size() - 1);
    x = s.end;
    Eigen::MatrixXd next = apply_update(a, x, tables, params, k);
    if (mask) next = (mask->array() != 0.0).select(next, a);
    a = std::move(next);
  }
  tr.final_weights = a;
  return tr;
}

WeightAudit audit_weights(const Trajectory& tr, const SignedDigraph& g) {
  WeightAudit out;
  const Eigen::MatrixXd lo = g.lower_bound_matrix(), hi = g.upper_bound_matrix(), sg = g.sign_matrix();
  auto check = [&](const Eigen::MatrixXd& a) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        const double v = a(i, j);
        if (v < lo(i, j) || v > hi(i, j)) ++out.bound_violations;
        const double s = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
        if (s != sg(i, j)) ++out.pattern_changes;
      }
    }
  };
  for (const auto& a : tr.weights) check(a);
  if (tr.final_weights.size() > 0) check(tr.final_weights);
  return out;
}

StabilityCondition stability_condition(const SignedDigraph& g, const ModelParams& params) {
  StabilityCondition s;
  s.margin = params.leak - static_cast<double>(max_in_degree(g)) * g.bounds().max_magnitude();
  s.holds = s.margin > 0.0;
  return s;
}

double invariant_bound(const SignedDigraph& g, const ModelParams& params) {
  const auto s = stability_condition(g, params);
  if (!s.holds) throw ModelError("invariant set undefined: stability margin is not positive");
  double bu = 0.0;
  for (const auto& in : g.inputs()) bu = std::max(bu, std::abs(in.gain) * params.u_max);
  return bu / s.margin;
}

Eigen::MatrixXd slot_system_matrix(const Eigen::MatrixXd& a, double leak) {
  return a - leak * Eigen::MatrixXd::Identity(a.rows(), a.cols());
}

HurwitzReport hurwitz_audit(const Eigen::MatrixXd& a, double leak, double tol) {
  HurwitzReport r;
  const Eigen::MatrixXd h = slot_system_matrix(a, leak);
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    const double off = h.row(i).cwiseAbs().sum() - std::abs(h(i, i));
    gap = std::min(gap, -h(i, i) - off);
  }
  r.dominance_gap = h.rows() == 0 ? 0.0 : gap;
  r.diagonally_dominant = h.rows() == 0 || gap > 0.0;
  if (h.rows() > 0) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(h, false);
    r.max_real_eigenvalue = es.eigenvalues().real().maxCoeff();
  }
  r.hurwitz = r.max_real_eigenvalue < -tol;
  return r;
}

}  // namespace neurocactus
