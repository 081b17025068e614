#pragma once

// Physical configuration of the qubit pair and the three rates derived from
// the common vacuum field: the single-qubit emission rate gamma0, the
// photon-exchange (cross) rate gamma_r and the collective frequency shift sigma.
//
// Units: hbar = c = 1. Frequencies and rates share one unit, lengths and times
// its inverse.

#include <complex>

#include "qpd/quadrature.hpp"

namespace qpd {

struct SystemConfig {
  double lambda_sq = 0.01;    // dimensionless coupling strength
  double omega0 = 1.0;        // renormalised qubit transition frequency
  double r = 1.0;             // inter-qubit separation
  double dipole_cos = 0.0;    // cosine between dipole and separation axis
  double cutoff_eps = 1e-3;   // UV cutoff: momentum integrands carry exp(-eps k)

  /// Throws DomainError on lambda_sq <= 0, omega0 <= 0, r < 0, |dipole_cos| > 1
  /// or omega0 * cutoff_eps >= 0.1.
  void validate() const;

  /// lambda_sq above 0.1 leaves the weak-coupling regime the closed forms assume.
  bool weak_coupling_violated() const { return lambda_sq > 0.1; }
};

struct RateSet {
  double gamma0 = 0.0;
  double gamma_r = 0.0;
  double sigma = 0.0;
  bool valid_r_flag = true;  // |gamma_r| <= gamma0 held numerically

  double superradiant() const { return gamma0 + gamma_r; }
  double subradiant() const { return gamma0 - gamma_r; }
};

/// omega0 * r below which gamma_r switches to its Taylor series.
inline constexpr double kGammaRSeriesThreshold = 0.1;

/// gamma0 = lambda^2 omega0 / (3 pi).
double gamma0(const SystemConfig& cfg);

/// Cross decay rate from photon exchange between the qubits. Tends to gamma0
/// as omega0 r -> 0 and to zero as omega0 r -> infinity.
double gamma_r(const SystemConfig& cfg);

/// Normalised dipole-pair kernel gamma_r / gamma0 as a function of x = k r:
///   3/2 [ (1 - c^2) sin x / x + (1 - 3 c^2) (x cos x - sin x) / x^3 ].
/// Equals 1 at x = 0 for every orientation.
double dipole_kernel(double x, double dipole_cos);

/// Same kernel obtained by integrating (1 - (d.k)^2) exp(i k.r) over
/// directions numerically. Independent of dipole_kernel's closed form.
double dipole_kernel_numeric(double x, double dipole_cos);

/// Mode density entering the self-energy alpha and kappa1, per unit k:
/// lambda^2 k / (3 pi^2) with the cutoff factor. pi * self_density(omega0) == gamma0.
double self_density(const SystemConfig& cfg, double k);

/// Mode density entering beta and kappa2: self_density(k) * dipole_kernel(k r).
double cross_density(const SystemConfig& cfg, double k);

/// Cutoff factor exp(-eps (k - omega0)); normalised to one on shell so that the
/// closed-form rates hold exactly.
double cutoff_factor(const SystemConfig& cfg, double k);

/// beta(E, r) as a principal-value mode integral plus the on-shell part. The
/// imaginary part is pi times the cross density at E, with the angular
/// integral done numerically; with this sign convention
///   beta(omega0, r) = -sigma + i gamma_r.
/// Requires E > 0 and r > 0.
std::complex<double> beta_quadrature(const SystemConfig& cfg, double energy,
                                     const quad::QuadratureSpec& spec = {});

/// sigma(r) = -Re beta(omega0, r). Requires r > 0.
double sigma_shift(const SystemConfig& cfg, const quad::QuadratureSpec& spec = {});

/// All three rates. Throws DomainError for r == 0, where sigma is not defined
/// (it would carry the divergent self-energy that has been renormalised away).
RateSet compute_rates(const SystemConfig& cfg, const quad::QuadratureSpec& spec = {});

}  // namespace qpd
