#include "qpd/physics.hpp"

#include <cmath>
#include <sstream>

namespace qpd {

namespace {

constexpr double kPi = M_PI;

// Taylor coefficients of sin x / x and (x cos x - sin x) / x^3, five terms each.
double kernel_series(double x, double c2) {
  const double x2 = x * x;
  double s1 = 0.0;
  double s2 = 0.0;
  double pow = 1.0;
  double fact = 1.0;  // (2m+1)!
  for (int m = 0; m < 5; ++m) {
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    const double fact3 = fact * (2 * m + 2) * (2 * m + 3);  // (2m+3)!
    s1 += sign * pow / fact;
    s2 += -sign * (2.0 * m + 2.0) * pow / fact3;
    pow *= x2;
    fact = fact3;
  }
  return 1.5 * ((1.0 - c2) * s1 + (1.0 - 3.0 * c2) * s2);
}

// PV integral of cross_density(k) / (k - energy) over k in [0, inf).
quad::RealResult cross_principal_value(const SystemConfig& cfg, double energy,
                                       const quad::QuadratureSpec& spec) {
  auto numerator = [&cfg](double k) { return cross_density(cfg, k); };
  auto integrand = [&cfg, energy](double k) { return cross_density(cfg, k) / (k - energy); };

  const double near = 2.0 * energy;
  const double split = std::max(10.0 * cfg.omega0, 10.0 * energy);
  quad::RealResult out = quad::pv_integrate(numerator, energy, 0.0, near, spec);
  out += quad::integrate(integrand, near, split, spec);
  out += quad::oscillatory_tail(integrand, split, cfg.r, cfg.cutoff_eps, spec);
  return out;
}

}  // namespace

void SystemConfig::validate() const {
  std::ostringstream os;
  if (!(lambda_sq > 0.0)) {
    os << "lambda_sq must be positive (got " << lambda_sq << ")";
  } else if (!(omega0 > 0.0)) {
    os << "omega0 must be positive (got " << omega0 << ")";
  } else if (!(r >= 0.0) || !std::isfinite(r)) {
    os << "r must be finite and non-negative (got " << r << ")";
  } else if (!(std::abs(dipole_cos) <= 1.0)) {
    os << "dipole_cos must lie in [-1, 1] (got " << dipole_cos << ")";
  } else if (!(cutoff_eps > 0.0) || !(omega0 * cutoff_eps < 0.1)) {
    os << "cutoff_eps must satisfy 0 < omega0 * cutoff_eps < 0.1 (got omega0 * eps = "
       << omega0 * cutoff_eps << ")";
  }
  if (!os.str().empty()) throw DomainError(os.str());
}

double gamma0(const SystemConfig& cfg) { return cfg.lambda_sq * cfg.omega0 / (3.0 * kPi); }

double dipole_kernel(double x, double dipole_cos) {
  const double c2 = dipole_cos * dipole_cos;
  x = std::abs(x);
  if (x < kGammaRSeriesThreshold) return kernel_series(x, c2);
  const double s = std::sin(x);
  const double c = std::cos(x);
  return 1.5 * ((1.0 - c2) * s / x + (1.0 - 3.0 * c2) * (x * c - s) / (x * x * x));
}

double gamma_r(const SystemConfig& cfg) {
  const double x = cfg.omega0 * cfg.r;
  const double c2 = cfg.dipole_cos * cfg.dipole_cos;
  if (x < kGammaRSeriesThreshold) return gamma0(cfg) * kernel_series(x, c2);

  const double s = std::sin(x);
  const double c = std::cos(x);
  const double parallel = s + c / x - s / (x * x);
  const double orient = s + 3.0 * c / x - 3.0 * s / (x * x);
  return cfg.lambda_sq / (2.0 * kPi * cfg.r) * (parallel - c2 * orient);
}

double dipole_kernel_numeric(double x, double dipole_cos) {
  const double c2 = dipole_cos * dipole_cos;
  // Azimuth done by hand: the integral over phi of 1 - (d.k)^2 with r along z is
  // 2 pi - pi (1 - c^2)(1 - u^2) - 2 pi c^2 u^2, u = cos(theta).
  auto f = [x, c2](double u) {
    return std::cos(x * u) * (2.0 - (1.0 - c2) * (1.0 - u * u) - 2.0 * c2 * u * u);
  };
  quad::QuadratureSpec spec;
  spec.abs_tol = 1e-14;
  spec.rel_tol = 1e-12;
  // Normalised by the x = 0 value 8 pi / 3 (even integrand, folded to [0, 1]).
  return 0.75 * quad::integrate(f, 0.0, 1.0, spec).value;
}

double cutoff_factor(const SystemConfig& cfg, double k) {
  return std::exp(-cfg.cutoff_eps * (k - cfg.omega0));
}

double self_density(const SystemConfig& cfg, double k) {
  return cfg.lambda_sq * k / (3.0 * kPi * kPi) * cutoff_factor(cfg, k);
}

double cross_density(const SystemConfig& cfg, double k) {
  return self_density(cfg, k) * dipole_kernel(k * cfg.r, cfg.dipole_cos);
}

std::complex<double> beta_quadrature(const SystemConfig& cfg, double energy,
                                     const quad::QuadratureSpec& spec) {
  cfg.validate();
  if (!(energy > 0.0)) throw DomainError("beta_quadrature requires E > 0");
  if (!(cfg.r > 0.0)) throw DomainError("beta_quadrature requires r > 0");

  const double re = -cross_principal_value(cfg, energy, spec).value;
  const double im = kPi * self_density(cfg, energy) *
                    dipole_kernel_numeric(energy * cfg.r, cfg.dipole_cos);
  return {re, im};
}

double sigma_shift(const SystemConfig& cfg, const quad::QuadratureSpec& spec) {
  cfg.validate();
  if (!(cfg.r > 0.0)) throw DomainError("sigma_shift requires r > 0");
  return cross_principal_value(cfg, cfg.omega0, spec).value;
}

RateSet compute_rates(const SystemConfig& cfg, const quad::QuadratureSpec& spec) {
  cfg.validate();
  if (!(cfg.r > 0.0)) {
    throw DomainError("r must be positive to derive the collective shift sigma");
  }
  RateSet rates;
  rates.gamma0 = gamma0(cfg);
  rates.gamma_r = gamma_r(cfg);
  rates.sigma = sigma_shift(cfg, spec);
  rates.valid_r_flag = std::abs(rates.gamma_r) <= rates.gamma0 * (1.0 + 1e-12);
  return rates;
}

}  // namespace qpd
