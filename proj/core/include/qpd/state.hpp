#pragma once

// Two-qubit density matrices in the basis (|00>, |01>, |10>, |11>), indices 0..3.
// matrix()(row, col) = <row| rho |col>.

#include <Eigen/Dense>
#include <string>

#include "qpd/errors.hpp"

namespace qpd {

using Matrix4c = Eigen::Matrix4cd;
using Matrix2c = Eigen::Matrix2cd;

namespace basis {
inline constexpr int k00 = 0;
inline constexpr int k01 = 1;
inline constexpr int k10 = 2;
inline constexpr int k11 = 3;
}  // namespace basis

struct StateTolerance {
  double hermiticity = 1e-12;
  double trace = 1e-12;
  double min_eigenvalue = -1e-9;

  static StateTolerance closed_form() { return {}; }
  static StateTolerance quadrature() { return {1e-12, 1e-12, -1e-6}; }
};

class TwoQubitState {
 public:
  TwoQubitState();
  explicit TwoQubitState(const Matrix4c& m, std::string label = {});

  const Matrix4c& matrix() const { return m_; }
  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  std::complex<double> operator()(int row, int col) const { return m_(row, col); }

  std::complex<double> trace() const { return m_.trace(); }
  double hermiticity_error() const;
  double purity() const;
  double min_eigenvalue() const;

  /// Throws InvariantViolation when any tolerance is exceeded.
  void validate(const StateTolerance& tol = {}) const;

 private:
  Matrix4c m_;
  std::string label_;
};

/// sqrt(1 - p) |00> + sqrt(p) |11>.
TwoQubitState make_class_a(double p);

/// (|01> + sign |10>) / sqrt(2), sign = +1 or -1.
TwoQubitState make_bell(int sign);

/// (sqrt(p) |1> + sqrt(1 - p) |0>) (x) |0>.
TwoQubitState make_product_superposition(double p);

enum class Subsystem { First, Second };

/// Reduced state of the qubit that is kept.
Matrix2c partial_trace(const TwoQubitState& rho, Subsystem keep);

}  // namespace qpd
