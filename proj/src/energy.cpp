#include "neurocactus/energy.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <Eigen/Dense>

#include "neurocactus/error.hpp"

// Slot Gramians of 16-state, 2-input systems over tau = 0.2 s reach condition
// numbers near 1e30, past what binary128 resolves, so everything here runs with
// 50 significant digits.
using Wide = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<50>,
                                           boost::multiprecision::et_off>;

namespace Eigen {
template <>
struct NumTraits<Wide> : GenericNumTraits<Wide> {
  using Real = Wide;
  using NonInteger = Wide;
  using Literal = Wide;
  using Nested = Wide;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 4,
    MulCost = 4
  };
  static Wide epsilon() { return std::numeric_limits<Wide>::epsilon(); }
  static Wide dummy_precision() { return Wide(1e-45); }
  static int digits10() { return 50; }
};
}  // namespace Eigen

namespace neurocactus {

namespace {

using QMat = Eigen::Matrix<Wide, Eigen::Dynamic, Eigen::Dynamic>;
using QVec = Eigen::Matrix<Wide, Eigen::Dynamic, 1>;

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <class S>
S one_norm(const Mat<S>& m) {
  using std::abs;
  S best(0);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    S s(0);
    for (Eigen::Index i = 0; i < m.rows(); ++i) s += abs(m(i, j));
    if (s > best) best = s;
  }
  return best;
}

template <class S>
Mat<S> expm(const Mat<S>& m) {
  using std::ceil;
  using std::log2;
  using std::pow;
  const Eigen::Index n = m.rows();
  const Mat<S> id = Mat<S>::Identity(n, n);
  if (n == 0) return m;
  static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                             1187353796428800.0,  129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,       1323241920.0,
                             40840800.0,          960960.0,            16380.0,
                             182.0,               1.0};
  // Largest norm for which the [13/13] Pade backward error stays below eps.
  const double eps = static_cast<double>(std::numeric_limits<S>::epsilon());
  const double theta = std::pow(eps / 8.7e-36, 1.0 / 27.0);
  const double nrm = static_cast<double>(one_norm<S>(m));
  int s = 0;
  if (nrm > theta) s = static_cast<int>(std::ceil(std::log2(nrm / theta)));
  Mat<S> a = m;
  if (s > 0) a /= S(std::ldexp(1.0, s));
  const Mat<S> a2 = a * a;
  const Mat<S> a4 = a2 * a2;
  const Mat<S> a6 = a4 * a2;
  auto c = [&](int k) { return S(b[k]); };
  const Mat<S> u_inner = a6 * (c(13) * a6 + c(11) * a4 + c(9) * a2);
  const Mat<S> u = a * (u_inner + c(7) * a6 + c(5) * a4 + c(3) * a2 + c(1) * id);
  const Mat<S> v = a6 * (c(12) * a6 + c(10) * a4 + c(8) * a2) + c(6) * a6 + c(4) * a4 +
                   c(2) * a2 + c(0) * id;
  Mat<S> r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < s; ++k) r = r * r;
  return r;
}

QMat to_wide(const Eigen::MatrixXd& m) { return m.cast<Wide>(); }
QVec to_wide(const Eigen::VectorXd& v) { return v.cast<Wide>(); }
Eigen::MatrixXd to_double(const QMat& m) { return m.cast<double>(); }
Eigen::VectorXd to_double(const QVec& v) { return v.cast<double>(); }

void check_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw ModelError(std::string(what) + " has non-finite entries");
}

QMat symmetrize(const QMat& w) { return (w + w.transpose()) * Wide(0.5); }

QMat gramian_van_loan(const QMat& a, const QMat& b, Wide t_f) {
  const Eigen::Index n = a.rows();
  QMat m = QMat::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n) = -a * t_f;
  m.topRightCorner(n, n) = b * b.transpose() * t_f;
  m.bottomRightCorner(n, n) = a.transpose() * t_f;
  const QMat e = expm<Wide>(m);
  return symmetrize(e.bottomRightCorner(n, n).transpose() * e.topRightCorner(n, n));
}

QMat gramian_simpson(const QMat& a, const QMat& b, Wide t_f, std::size_t panels) {
  if (panels < 2) panels = 2;
  if (panels % 2) ++panels;
  const Eigen::Index n = a.rows();
  const Wide h = t_f / Wide(panels);
  const QMat step = expm<Wide>(QMat(a * h));
  QMat eb = b;  // e^{A s_k} B
  QMat w = QMat::Zero(n, n);
  for (std::size_t k = 0; k <= panels; ++k) {
    const Wide weight = (k == 0 || k == panels) ? Wide(1) : (k % 2 ? Wide(4) : Wide(2));
    w += weight * (eb * eb.transpose());
    eb = step * eb;
  }
  return symmetrize(w * (h / Wide(3)));
}

}  // namespace

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw ModelError("matrix_exponential needs a square matrix");
  check_finite(m, "matrix_exponential input");
  return expm<double>(m);
}

Eigen::MatrixXd gramian(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double t_f,
                        std::size_t panels, GramianMethod method) {
  if (a.rows() != a.cols() || b.rows() != a.rows()) throw ModelError("gramian: shape mismatch");
  if (!(t_f > 0.0)) throw ModelError("gramian: t_f must be positive");
  check_finite(a, "gramian A");
  check_finite(b, "gramian B");
  const QMat qa = to_wide(a), qb = to_wide(b);
  const QMat w = method == GramianMethod::van_loan ? gramian_van_loan(qa, qb, Wide(t_f))
                                                   : gramian_simpson(qa, qb, Wide(t_f), panels);
  return to_double(w);
}

struct SlotSystem::Impl {
  QMat a, b, w, phi, closed_loop, exp_at;
  Eigen::LLT<QMat> llt;
  double condition = 0.0;
  double t_f = 0.0;
};

SlotSystem::SlotSystem(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double t_f) {
  if (a.rows() != a.cols() || b.rows() != a.rows()) throw ModelError("steering: shape mismatch");
  if (!(t_f > 0.0)) throw ModelError("steering: t_f must be positive");
  check_finite(a, "steering A");
  check_finite(b, "steering B");
  auto impl = std::make_shared<Impl>();
  const Eigen::Index n = a.rows();
  impl->t_f = t_f;
  impl->a = to_wide(a);
  impl->b = to_wide(b);
  const Wide tf(t_f);
  impl->w = gramian_van_loan(impl->a, impl->b, tf);
  impl->phi = expm<Wide>(QMat(impl->a * tf));
  impl->exp_at = impl->phi.transpose();

  Eigen::SelfAdjointEigenSolver<QMat> es(impl->w, Eigen::EigenvaluesOnly);
  const Wide lo = n ? es.eigenvalues()(0) : Wide(1);
  const Wide hi = n ? es.eigenvalues()(n - 1) : Wide(1);
  const Wide eps = std::numeric_limits<Wide>::epsilon();
  if (!(lo > Wide(0)) || hi / lo * eps > Wide(1e-4)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g / %.3g", static_cast<double>(lo), static_cast<double>(hi));
    throw SteeringError(std::string("not steerable with these inputs (Gramian singular to working precision, "
                                    "eigenvalue range ") + buf + ")");
  }
  impl->condition = static_cast<double>(hi / lo);
  impl->llt.compute(impl->w);
  if (impl->llt.info() != Eigen::Success) {
    throw SteeringError("not steerable with these inputs (Gramian not positive definite)");
  }

  QMat m = QMat::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n) = impl->a * tf;
  m.topRightCorner(n, n) = impl->b * impl->b.transpose() * tf;
  m.bottomRightCorner(n, n) = -impl->a.transpose() * tf;
  impl->closed_loop = expm<Wide>(m);
  impl_ = std::move(impl);
}

double SlotSystem::condition() const { return impl_->condition; }
Eigen::MatrixXd SlotSystem::gramian() const { return to_double(impl_->w); }
Eigen::Index SlotSystem::states() const { return impl_->a.rows(); }
Eigen::Index SlotSystem::inputs() const { return impl_->b.cols(); }
double SlotSystem::horizon() const { return impl_->t_f; }

SteeringResult SlotSystem::steer(const Eigen::VectorXd& x0, const Eigen::VectorXd& xf,
                                 std::size_t sample_count) const {
  const auto& s = *impl_;
  const Eigen::Index n = s.a.rows();
  if (x0.size() != n || xf.size() != n) throw ModelError("steering: state dimension mismatch");
  const QVec qx0 = to_wide(x0), qxf = to_wide(xf);
  const QVec d = qxf - s.phi * qx0;
  const QVec lambda = s.llt.solve(d);

  SteeringResult r;
  r.eta = static_cast<double>(d.dot(lambda));
  r.gramian_condition = s.condition;
  r.lambda = to_double(lambda);

  QVec init(2 * n);
  init.head(n) = qx0;
  init.tail(n) = s.exp_at * lambda;
  const QVec end = s.closed_loop * init;
  const QVec reached = end.head(n);
  r.reached = to_double(reached);
  using std::max;
  const Wide scale = max(max(qxf.norm(), d.norm()), Wide(1e-300));
  r.endpoint_error = static_cast<double>((reached - qxf).norm() / scale);

  if (sample_count > 0) {
    if (sample_count % 2) ++sample_count;
    const Wide h = Wide(s.t_f) / Wide(sample_count);
    const QMat back = expm<Wide>(QMat(s.a.transpose() * h));
    std::vector<QVec> u(sample_count + 1);
    QVec z = lambda;  // z(t_f)
    for (std::size_t k = sample_count + 1; k-- > 0;) {
      u[k] = s.b.transpose() * z;
      z = back * z;
    }
    r.samples.resize(s.b.cols(), static_cast<Eigen::Index>(sample_count + 1));
    Wide energy(0);
    for (std::size_t k = 0; k <= sample_count; ++k) {
      r.sample_times.push_back(s.t_f * static_cast<double>(k) / static_cast<double>(sample_count));
      r.samples.col(static_cast<Eigen::Index>(k)) = to_double(u[k]);
      const Wide weight =
          (k == 0 || k == sample_count) ? Wide(1) : (k % 2 ? Wide(4) : Wide(2));
      energy += weight * u[k].squaredNorm();
    }
    r.sampled_energy = static_cast<double>(energy * h / Wide(3));
  }
  return r;
}

SteeringResult min_energy_steering(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                   const Eigen::VectorXd& x0, const Eigen::VectorXd& xf, double t_f,
                                   std::size_t sample_count) {
  return SlotSystem(a, b, t_f).steer(x0, xf, sample_count);
}

void SteeringProblem::check() const {
  if (slot_matrices.empty()) throw ModelError("steering problem has no slots");
  if (waypoints.size() != slot_matrices.size() + 1) {
    throw ModelError("waypoint count must equal slot count + 1");
  }
  const Eigen::Index n = b.rows();
  for (const auto& h : slot_matrices) {
    if (h.rows() != n || h.cols() != n) throw ModelError("slot matrix dimension mismatch");
  }
  for (const auto& w : waypoints) {
    if (w.size() != n) throw ModelError("waypoint dimension mismatch");
  }
  if (!(slot > 0.0)) throw ModelError("slot length must be positive");
}

std::vector<SlotSystem> build_slot_systems(const std::vector<Eigen::MatrixXd>& slot_matrices,
                                           const Eigen::MatrixXd& b, double slot) {
  std::vector<SlotSystem> out;
  out.reserve(slot_matrices.size());
  for (std::size_t p = 0; p < slot_matrices.size(); ++p) {
    try {
      out.emplace_back(slot_matrices[p], b, slot);
    } catch (const SteeringError& e) {
      throw SteeringError("slot " + std::to_string(p) + ": " + e.what());
    }
  }
  return out;
}

EnergyReport piecewise_energy(const std::vector<SlotSystem>& slots,
                              const std::vector<Eigen::VectorXd>& waypoints) {
  if (waypoints.size() != slots.size() + 1) throw ModelError("waypoint count must equal slot count + 1");
  EnergyReport rep;
  for (std::size_t p = 0; p < slots.size(); ++p) {
    const auto r = slots[p].steer(waypoints[p], waypoints[p + 1]);
    rep.per_slot.push_back(r.eta);
    rep.conditions.push_back(r.gramian_condition);
    rep.endpoint_errors.push_back(r.endpoint_error);
    rep.total += r.eta;
  }
  return rep;
}

EnergyReport piecewise_energy(const SteeringProblem& prob) {
  prob.check();
  return piecewise_energy(build_slot_systems(prob.slot_matrices, prob.b, prob.slot), prob.waypoints);
}

void check_augmentation(const Eigen::MatrixXd& b, const Eigen::MatrixXd& b_aug) {
  if (b_aug.rows() != b.rows() || b_aug.cols() < b.cols()) {
    throw ModelError("augmented input matrix must extend B");
  }
  if (b_aug.leftCols(b.cols()) != b) throw ModelError("augmented input matrix must start with B");
  for (Eigen::Index j = b.cols(); j < b_aug.cols(); ++j) {
    if ((b_aug.col(j).array() != 0.0).count() != 1) {
      throw ModelError("augmented columns must be canonical vectors");
    }
  }
}

AugmentationResult augmentation_monotonicity(const std::vector<SlotSystem>& base,
                                             const std::vector<SlotSystem>& augmented,
                                             const std::vector<Eigen::VectorXd>& waypoints) {
  if (base.size() != augmented.size()) throw ModelError("slot count mismatch");
  AugmentationResult r;
  r.base = piecewise_energy(base, waypoints);
  r.augmented = piecewise_energy(augmented, waypoints);
  constexpr double slack = 1e-8;
  r.satisfied = r.augmented.total <= r.base.total + slack;
  r.per_slot_satisfied = true;
  for (std::size_t p = 0; p < base.size(); ++p) {
    if (r.augmented.per_slot[p] > r.base.per_slot[p] + slack) r.per_slot_satisfied = false;
  }
  return r;
}

AugmentationResult augmentation_monotonicity(const SteeringProblem& prob, const Eigen::MatrixXd& b_aug) {
  prob.check();
  check_augmentation(prob.b, b_aug);
  const auto base = build_slot_systems(prob.slot_matrices, prob.b, prob.slot);
  const auto aug = build_slot_systems(prob.slot_matrices, b_aug, prob.slot);
  return augmentation_monotonicity(base, aug, prob.waypoints);
}

}  // namespace neurocactus
