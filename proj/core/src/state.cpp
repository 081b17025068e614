#include "qpd/state.hpp"

#include <cmath>
#include <sstream>

namespace qpd {

namespace {

void require_weight(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << "p must lie in [0, 1] (got " << p << ")";
    throw DomainError(os.str());
  }
}

Matrix4c pure(const Eigen::Vector4cd& psi) { return psi * psi.adjoint(); }

}  // namespace

TwoQubitState::TwoQubitState() : m_(Matrix4c::Zero()) { m_(0, 0) = 1.0; }

TwoQubitState::TwoQubitState(const Matrix4c& m, std::string label)
    : m_(m), label_(std::move(label)) {}

double TwoQubitState::hermiticity_error() const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

double TwoQubitState::purity() const { return (m_ * m_).trace().real(); }

double TwoQubitState::min_eigenvalue() const {
  const Matrix4c h = 0.5 * (m_ + m_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalFailure("eigenvalue solve did not converge");
  return es.eigenvalues()(0);
}

void TwoQubitState::validate(const StateTolerance& tol) const {
  std::ostringstream os;
  const double herm = hermiticity_error();
  const double tr = std::abs(trace() - 1.0);
  if (!m_.allFinite()) {
    os << "state has non-finite entries";
  } else if (herm > tol.hermiticity) {
    os << "state is not Hermitian (max |rho - rho^dag| = " << herm << ")";
  } else if (tr > tol.trace) {
    os << "state trace deviates from 1 by " << tr;
  } else {
    const double lam = min_eigenvalue();
    if (lam < tol.min_eigenvalue) os << "state is not positive (min eigenvalue " << lam << ")";
  }
  if (!os.str().empty()) {
    if (!label_.empty()) os << " [" << label_ << "]";
    throw InvariantViolation(os.str());
  }
}

TwoQubitState make_class_a(double p) {
  require_weight(p);
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  psi(basis::k00) = std::sqrt(1.0 - p);
  psi(basis::k11) = std::sqrt(p);
  return TwoQubitState(pure(psi), "class_a");
}

TwoQubitState make_bell(int sign) {
  if (sign != 1 && sign != -1) throw DomainError("Bell sign must be +1 or -1");
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  psi(basis::k01) = M_SQRT1_2;
  psi(basis::k10) = sign * M_SQRT1_2;
  return TwoQubitState(pure(psi), sign > 0 ? "bell_plus" : "bell_minus");
}

TwoQubitState make_product_superposition(double p) {
  require_weight(p);
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  psi(basis::k00) = std::sqrt(1.0 - p);
  psi(basis::k10) = std::sqrt(p);
  return TwoQubitState(pure(psi), "product_superposition");
}

Matrix2c partial_trace(const TwoQubitState& rho, Subsystem keep) {
  // index = 2 * first + second
  Matrix2c out = Matrix2c::Zero();
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int e = 0; e < 2; ++e) {
        if (keep == Subsystem::First) {
          out(a, b) += rho(2 * a + e, 2 * b + e);
        } else {
          out(a, b) += rho(2 * e + a, 2 * e + b);
        }
      }
    }
  }
  return out;
}

}  // namespace qpd
