#include "qpd/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qpd {

namespace {

using basis::k00;
using basis::k01;
using basis::k10;
using basis::k11;

constexpr double kXPatternTol = 1e-10;

// Eigenvalues of rho at or below this are treated as zero before the square
// root; they sit at the round-off level of the eigen-solve.
constexpr double kEigenFloor = 1e-14;

Matrix4c spin_flip_operator() {
  Matrix4c yy = Matrix4c::Zero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  return yy;
}

bool is_off_x(int i, int j) { return i != j && i + j != 3; }

// (exp(2 s t) - 1) / s, continuous through s = 0.
double expm1_ratio(double s, double t) { return s == 0.0 ? 2.0 * t : std::expm1(2.0 * s * t) / s; }

double bisect(const WitnessFn& f, double lo, double hi, double f_lo, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double wootters_witness(const TwoQubitState& rho) {
  const Matrix4c h = 0.5 * (rho.matrix() + rho.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(h);
  if (es.info() != Eigen::Success) throw NumericalFailure("Hermitian eigen-solve did not converge");
  Eigen::Vector4d lam = es.eigenvalues();
  for (int i = 0; i < 4; ++i) lam(i) = lam(i) > kEigenFloor ? std::sqrt(lam(i)) : 0.0;
  const Matrix4c root = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();

  // sqrt(rho) rho~ sqrt(rho) = A A^dag with A = sqrt(rho) (Y x Y) sqrt(rho)*, so the
  // l_i are the singular values of A.
  const Matrix4c a = root * spin_flip_operator() * root.conjugate();
  Eigen::JacobiSVD<Matrix4c> svd(a);
  if (svd.info() != Eigen::Success) throw NumericalFailure("singular value decomposition failed");
  const Eigen::Vector4d l = svd.singularValues();
  return l(0) - l(1) - l(2) - l(3);
}

double concurrence(const TwoQubitState& rho) { return std::max(0.0, wootters_witness(rho)); }

double x_pattern_violation(const TwoQubitState& rho) {
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (is_off_x(i, j)) worst = std::max(worst, std::abs(rho(i, j)));
    }
  }
  return worst;
}

double x_witness(const TwoQubitState& rho) {
  const double off = x_pattern_violation(rho);
  if (off > kXPatternTol) {
    std::ostringstream os;
    os << "state is not X-shaped (largest non-X entry " << off << ")";
    throw ShapeError(os.str());
  }
  auto pop = [&rho](int i) { return std::max(rho(i, i).real(), 0.0); };
  const double b1 = std::abs(rho(k11, k00)) - std::sqrt(pop(k01) * pop(k10));
  const double b2 = std::abs(rho(k01, k10)) - std::sqrt(pop(k00) * pop(k11));
  return 2.0 * std::max(b1, b2);
}

double concurrence_x(const TwoQubitState& rho) { return std::max(0.0, x_witness(rho)); }

double purity(const TwoQubitState& rho) { return rho.purity(); }

EntanglementReport analyse(const TwoQubitState& rho) {
  EntanglementReport rep;
  if (x_pattern_violation(rho) <= kXPatternTol) {
    rep.method = ConcurrenceMethod::XState;
    rep.concurrence = concurrence_x(rho);
  } else {
    rep.method = ConcurrenceMethod::Wootters;
    rep.concurrence = concurrence(rho);
  }
  rep.purity = rho.purity();
  rep.min_eigenvalue = rho.min_eigenvalue();
  return rep;
}

DeathRevivalEvents scan_events(std::span<const double> times, std::span<const double> witness,
                               const WitnessFn& refine, const ScanOptions& opt) {
  if (times.size() != witness.size()) throw DomainError("times and witness differ in length");
  DeathRevivalEvents ev;
  const std::size_t n = times.size();

  int held = 0;  // last nonzero sign seen
  std::size_t held_at = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = witness[i];
    const int s = w > opt.zero_tol ? 1 : (w < -opt.zero_tol ? -1 : 0);
    if (s != 0 && held != 0 && s != held) {
      const double lo = times[held_at];
      const double hi = times[i];
      double root;
      if (refine) {
        root = bisect(refine, lo, hi, witness[held_at], opt.time_tol);
      } else {
        const double w0 = witness[held_at];
        root = lo + (hi - lo) * w0 / (w0 - w);
      }
      (s < 0 ? ev.death_times : ev.revival_times).push_back(root);
    }
    if (s != 0) {
      held = s;
      held_at = i;
    }
    if (i > 0 && i + 1 < n && std::abs(w) <= opt.graze_tol) {
      const bool min_touch = w >= 0.0 && w <= witness[i - 1] && w <= witness[i + 1] &&
                             witness[i - 1] > 0.0 && witness[i + 1] > 0.0;
      const bool max_touch = w <= 0.0 && w >= witness[i - 1] && w >= witness[i + 1] &&
                             witness[i - 1] < 0.0 && witness[i + 1] < 0.0;
      if (min_touch || max_touch) ev.grazing_times.push_back(times[i]);
    }
  }
  ev.open_ended = ev.death_times.size() > ev.revival_times.size();
  return ev;
}

DeathRevivalEvents scan_events(const Trajectory& traj, const WitnessFn& refine,
                               const ScanOptions& opt, bool markov) {
  std::vector<double> w(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Observables& o = traj.observables[i];
    if (markov) {
      if (!o.witness_markov) throw DomainError("trajectory carries no Markov series");
      w[i] = *o.witness_markov;
    } else {
      w[i] = o.witness;
    }
  }
  return scan_events(traj.times, w, refine, opt);
}

std::pair<double, double> markov_rho_pm(double p, const RateSet& rates, double t) {
  if (!(t >= 0.0)) throw DomainError("time must be non-negative");
  const double g0 = rates.gamma0;
  const double sup = rates.gamma0 + rates.gamma_r;
  const double sub = rates.gamma0 - rates.gamma_r;
  const double decay = std::exp(-4.0 * g0 * t);
  // e^{-2 G0 t}(e^{-2 Gr t} - e^{-2 G0 t}) = e^{-4 G0 t} expm1(2 (G0 - Gr) t)
  const double plus = p * sup * decay * expm1_ratio(sub, t);
  const double minus = p * sub * decay * expm1_ratio(sup, t);
  return {plus, minus};
}

TwoQubitState markov_class_a_state(double p, const RateSet& rates, double omega0, double t) {
  TwoQubitState base = class_a_closed_form(p, rates, omega0, t);
  const auto [plus, minus] = markov_rho_pm(p, rates, t);
  Matrix4c m = base.matrix();
  m(k01, k01) = 0.5 * (plus + minus);
  m(k10, k10) = 0.5 * (plus + minus);
  m(k01, k10) = 0.5 * (plus - minus);
  m(k10, k01) = 0.5 * (plus - minus);
  m(k00, k00) = 1.0 - m(k11, k11).real() - plus - minus;
  TwoQubitState out(m, "class_a_markov");
  out.validate(StateTolerance::closed_form());
  return out;
}

}  // namespace qpd
