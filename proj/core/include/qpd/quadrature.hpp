#pragma once

// Adaptive numerical integration used by every mode-sum in the library.
//
// Three entry points:
//   integrate          -- globally adaptive Gauss-Kronrod (10/21) on [a, b]
//   pv_integrate       -- Cauchy principal value of g(x) / (x - pole) on [a, b]
//   oscillatory_tail   -- integral over [a, inf) of a damped oscillatory integrand,
//                         summed half-period by half-period with Wynn epsilon
//                         acceleration of the partial sums
//
// All routines are reentrant and deterministic: identical inputs give
// bit-identical outputs.

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>

#include "qpd/errors.hpp"

namespace qpd::quad {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  // Maximum number of bisections applied to any one piece of [a, b].
  int max_depth = 60;
  // Hard limit on the number of live subintervals.
  std::size_t max_subintervals = 400000;
  // Location of the simple pole when the spec is used for a PV integral.
  std::optional<double> pole;
  // Damping rate of an exp(-cutoff_eps * x) factor, used by the tail
  // integrator to decide where the integrand is negligible.
  double cutoff_eps = 0.0;

  void validate() const;
  double target(double value) const;
};

template <typename T>
struct QuadResult {
  T value{};
  double error = 0.0;
  std::size_t evaluations = 0;

  QuadResult& operator+=(const QuadResult& other) {
    value += other.value;
    error += other.error;
    evaluations += other.evaluations;
    return *this;
  }
};

using RealResult = QuadResult<double>;
using ComplexResult = QuadResult<std::complex<double>>;

using RealFn = std::function<double(double)>;
using ComplexFn = std::function<std::complex<double>(double)>;

/// Raised when the requested tolerance cannot be reached; carries the best
/// estimate obtained before giving up.
class ToleranceNotMet : public QuadratureFailure {
 public:
  ToleranceNotMet(const std::string& what, RealResult best)
      : QuadratureFailure(what), best_(best) {}
  const RealResult& best() const noexcept { return best_; }

 private:
  RealResult best_;
};

RealResult integrate(const RealFn& f, double a, double b, const QuadratureSpec& spec = {});

/// Same as above, but [a, b] is pre-split at the given interior points. Use
/// this for integrands with features much narrower than b - a (Lorentzian
/// peaks), which a plain bisection could step over.
RealResult integrate(const RealFn& f, double a, double b, std::span<const double> breakpoints,
                     const QuadratureSpec& spec = {});

ComplexResult integrate(const ComplexFn& f, double a, double b,
                        std::span<const double> breakpoints, const QuadratureSpec& spec = {});

/// PV of the integral of g(x) / (x - pole) over [a, b], a < pole < b.
///
/// The symmetric window of half-width h = min(pole - a, b - pole) is folded
/// onto [0, h] as (g(pole + u) - g(pole - u)) / u, which is regular at u = 0;
/// the remainder of [a, b] is integrated directly.
RealResult pv_integrate(const RealFn& g, double pole, double a, double b,
                        const QuadratureSpec& spec = {});

/// Integral of f over [a, inf) where f oscillates with angular frequency
/// omega_osc (in the integration variable) under a slowly varying envelope.
///
/// omega_osc == 0 marks a non-oscillatory integrand, which is then marched
/// over geometrically growing panels until it is negligible. cutoff_eps, if
/// positive, is the rate of an exp(-cutoff_eps x) damping known to be present
/// in f.
RealResult oscillatory_tail(const RealFn& f, double a, double omega_osc, double cutoff_eps,
                            const QuadratureSpec& spec = {});

/// Limit of a sequence of partial sums by Wynn's epsilon algorithm. Returns
/// the extrapolated value and an error estimate from the last two diagonal
/// entries. Exposed for testing.
std::pair<double, double> wynn_epsilon(std::span<const double> partial_sums);

}  // namespace qpd::quad
