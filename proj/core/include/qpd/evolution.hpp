#pragma once

// The seven functions of time that fully determine the reduced two-qubit
// dynamics: the amplitudes u, v+, v-, the cascade weights kappa1, kappa2 and
// the coherence-transfer amplitudes mu1, mu2.
//
// ClosedForm evaluates u and v+- from their single-pole forms and kappa from
// the Lorentzian-to-delta approximation. Quadrature evaluates kappa1, kappa2
// from their full momentum integrals. mu1, mu2 have no closed form and always
// come from quadrature.

#include <complex>
#include <utility>

#include "qpd/physics.hpp"
#include "qpd/quadrature.hpp"

namespace qpd {

using cplx = std::complex<double>;

enum class EvolutionMode { ClosedForm, Quadrature };

struct EvolutionFunctions {
  double t = 0.0;
  cplx u{1.0, 0.0};
  cplx v_plus{1.0, 0.0};
  cplx v_minus{0.0, 0.0};
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  cplx mu1{0.0, 0.0};
  cplx mu2{0.0, 0.0};
  // mu1, mu2 are only filled in on request; they only act on initial
  // coherences between |11> and the single-excitation states.
  bool has_mu = false;
  EvolutionMode mode = EvolutionMode::ClosedForm;

  /// The functions at t = 0, where the propagator is the identity map.
  static EvolutionFunctions identity() { return {}; }
};

/// Relative gap |gamma0 - gamma_r| / gamma0 below which kappa uses its series.
inline constexpr double kKappaDegenerateSwitch = 1e-6;

/// u(t) = exp(-2 i omega0 t - 2 gamma0 t).
cplx u_fn(const RateSet& rates, double omega0, double t);

/// v+-(t) = exp(-i omega0 t - gamma0 t) / 2 * (exp(-z) +- exp(z)),
/// z = (gamma_r + i sigma) t, evaluated as cosh / -sinh so that v- keeps full
/// relative precision for small t.
std::pair<cplx, cplx> v_pm(const RateSet& rates, double omega0, double t);

/// kappa(t) = exp(-2 gamma0 t) (exp(-gamma0 t) - exp(-gamma_r t))^2 / (gamma0 - gamma_r),
/// continuous through gamma_r -> gamma0.
double kappa_profile(const RateSet& rates, double t);

/// (kappa1, kappa2) = (gamma0, gamma_r) * kappa(t).
std::pair<double, double> kappa_closed(const RateSet& rates, double t);

/// kappa1, kappa2 from their momentum integrals with the full Lorentzian.
/// The defaults (abs 1e-10, rel 1e-8) sit below every tolerance used downstream.
std::pair<double, double> kappa_quadrature(const SystemConfig& cfg, const RateSet& rates,
                                           double t, const quad::QuadratureSpec& spec = {});

/// mu1, mu2 by mode-sum quadrature, with the single-excitation amplitude s_a
/// taken in a two-pole form: the photon pole at E = omega_a and the symmetric
/// collective pole at E = omega0 + sigma - i (gamma0 + gamma_r).
std::pair<cplx, cplx> mu_fns(const SystemConfig& cfg, const RateSet& rates, double t,
                             const quad::QuadratureSpec& spec = {});

/// All seven functions at time t >= 0.
EvolutionFunctions evaluate(const SystemConfig& cfg, const RateSet& rates, double t,
                            EvolutionMode mode, bool with_mu = false,
                            const quad::QuadratureSpec& spec = {});

}  // namespace qpd
