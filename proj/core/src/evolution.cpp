#include "qpd/evolution.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace qpd {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    std::ostringstream os;
    os << "time must be finite and non-negative (got " << t << ")";
    throw DomainError(os.str());
  }
}

// (exp(w) - 1) / w without cancellation for small |w|.
cplx phi1(cplx w) {
  if (std::abs(w) < 1e-3) return 1.0 + w * (0.5 + w * (1.0 / 6.0 + w / 24.0));
  return (std::exp(w) - 1.0) / w;
}

// Divided difference (exp(-i z1 t) - exp(-i z2 t)) / (z1 - z2): the inverse
// Fourier transform of 1 / ((E - z1)(E - z2)) for poles in the lower half plane.
cplx two_pole(cplx z1, cplx z2, double t) {
  return std::exp(-kI * z2 * t) * (-kI * t) * phi1(-kI * (z1 - z2) * t);
}

// Asymptotic form of the dipole kernel, K(kr) = P sin(kr) + Q cos(kr).
struct KernelParts {
  double p;
  double q;
};

KernelParts kernel_parts(double x, double c) {
  const double c2 = c * c;
  const double x2 = x * x;
  return {1.5 * ((1.0 - c2) / x - (1.0 - 3.0 * c2) / (x2 * x)), 1.5 * (1.0 - 3.0 * c2) / x2};
}

quad::ComplexResult complex_tail(const quad::ComplexFn& f, double a, double omega, double eps,
                                 const quad::QuadratureSpec& spec) {
  const auto re = quad::oscillatory_tail([&f](double k) { return f(k).real(); }, a, omega, eps,
                                         spec);
  const auto im = quad::oscillatory_tail([&f](double k) { return f(k).imag(); }, a, omega, eps,
                                         spec);
  return {cplx(re.value, im.value), re.error + im.error, re.evaluations + im.evaluations};
}

// Integral over [a, inf) of env(k) * exp(i phase_sign k t) * W(k), where env is
// a smooth envelope and W is 1 or the dipole kernel K(k r). The kernel itself
// oscillates at frequency r, so depending on r versus t the integrand is
// either kept whole or split into its two beat frequencies |t -+ r|.
quad::ComplexResult envelope_tail(const quad::ComplexFn& env, double phase_sign, double t,
                                  bool with_kernel, const SystemConfig& cfg, double a,
                                  const quad::QuadratureSpec& spec) {
  const double eps = cfg.cutoff_eps;
  const double r = cfg.r;
  const double c = cfg.dipole_cos;
  const double rate = phase_sign == 0.0 ? 0.0 : t;

  auto carrier = [phase_sign, t](double k) { return std::exp(kI * (phase_sign * k * t)); };

  if (!with_kernel) {
    return complex_tail([&](double k) { return env(k) * carrier(k); }, a, rate, eps, spec);
  }
  auto whole = [&](double k) { return env(k) * carrier(k) * dipole_kernel(k * r, c); };
  if (rate == 0.0) return complex_tail(whole, a, r, eps, spec);
  if (r <= rate / 20.0) return complex_tail(whole, a, rate, eps, spec);
  if (a * r < 1.0) return complex_tail(whole, a, rate + r, eps, spec);

  // K = exp(i k r) (Q - i P) / 2 + exp(-i k r) (Q + i P) / 2
  const double s = phase_sign;
  auto up = [&](double k) {
    const KernelParts kp = kernel_parts(k * r, c);
    return env(k) * std::exp(kI * (k * (s * t + r))) * cplx(kp.q, -kp.p) * 0.5;
  };
  auto down = [&](double k) {
    const KernelParts kp = kernel_parts(k * r, c);
    return env(k) * std::exp(kI * (k * (s * t - r))) * cplx(kp.q, kp.p) * 0.5;
  };
  quad::ComplexResult out = complex_tail(up, a, std::abs(s * t + r), eps, spec);
  out += complex_tail(down, a, std::abs(s * t - r), eps, spec);
  return out;
}

// Breakpoints clustering around a Lorentzian feature at `center` of half-width
// `width`, clipped to (lo, hi).
void add_cluster(std::vector<double>& pts, double center, double width, double lo, double hi) {
  width = std::max(width, 1e-14 * std::max(1.0, std::abs(center)));
  if (center > lo && center < hi) pts.push_back(center);
  for (double scale = 1.0; scale < 1e8; scale *= 10.0) {
    for (double sgn : {-1.0, 1.0}) {
      const double p = center + sgn * scale * width;
      if (p > lo && p < hi) pts.push_back(p);
    }
  }
}

double tail_split(const SystemConfig& cfg, double center, double width) {
  return std::max(10.0 * cfg.omega0, center + 10.0 * width);
}

}  // namespace

cplx u_fn(const RateSet& rates, double omega0, double t) {
  require_time(t);
  return std::exp(cplx(-2.0 * rates.gamma0 * t, -2.0 * omega0 * t));
}

std::pair<cplx, cplx> v_pm(const RateSet& rates, double omega0, double t) {
  require_time(t);
  const cplx common = std::exp(cplx(-rates.gamma0 * t, -omega0 * t));
  const cplx z(rates.gamma_r * t, rates.sigma * t);
  return {common * std::cosh(z), -common * std::sinh(z)};
}

double kappa_profile(const RateSet& rates, double t) {
  require_time(t);
  const double gap = rates.gamma0 - rates.gamma_r;
  const double envelope = std::exp(-2.0 * (rates.gamma0 + rates.gamma_r) * t);
  if (gap == 0.0) return 0.0;
  const double y = gap * t;
  if (std::abs(gap) < kKappaDegenerateSwitch * rates.gamma0 && std::abs(y) < 1e-3) {
    // expm1(-y)^2 / gap = gap t^2 (1 - y + 7 y^2 / 12) + O(y^3)
    return envelope * gap * t * t * (1.0 - y + 7.0 * y * y / 12.0);
  }
  const double d = std::expm1(-y);
  return envelope * d * d / gap;
}

std::pair<double, double> kappa_closed(const RateSet& rates, double t) {
  const double k = kappa_profile(rates, t);
  return {rates.gamma0 * k, rates.gamma_r * k};
}

std::pair<double, double> kappa_quadrature(const SystemConfig& cfg, const RateSet& rates,
                                           double t, const quad::QuadratureSpec& spec) {
  require_time(t);
  if (t == 0.0) return {0.0, 0.0};

  const double g0 = rates.gamma0;
  const double gr = rates.gamma_r;
  const double width = std::abs(g0 - gr);
  const double center = cfg.omega0 - rates.sigma;
  const double a = std::exp(-g0 * t);
  const double b = std::exp(-gr * t);
  const double theta0 = center * t;

  // |a - b exp(-i (omega0 - k - sigma) t)|^2 / ((k - omega0 + sigma)^2 + width^2)
  auto lorentz_weight = [=](double k) {
    const double detune = k - center;
    const double ph = (center - k) * t;
    const double re = a - b * std::cos(ph);
    const double im = b * std::sin(ph);
    return (re * re + im * im) / (detune * detune + width * width);
  };

  const double split = tail_split(cfg, center, width);
  std::vector<double> pts;
  add_cluster(pts, center, width, 0.0, split);
  add_cluster(pts, center, 1.0 / t, 0.0, split);

  // kappa1 in the real part, kappa2 in the imaginary part.
  auto head = [&](double k) {
    const double w = lorentz_weight(k);
    return cplx(self_density(cfg, k) * w, cross_density(cfg, k) * w);
  };
  const quad::ComplexResult near = quad::integrate(quad::ComplexFn(head), 0.0, split, pts, spec);

  // Tail: split |.|^2 into its flat part (a^2 + b^2) and the beat
  // -2ab cos(theta0 - k t) = Re[-2ab exp(i theta0) exp(-i k t)].
  auto flat = [&](double k) {
    const double d = k - center;
    return cplx(self_density(cfg, k) * (a * a + b * b) / (d * d + width * width), 0.0);
  };
  auto beat = [&](double k) {
    const double d = k - center;
    return -2.0 * a * b * std::exp(kI * theta0) * self_density(cfg, k) / (d * d + width * width);
  };
  const double k1_tail = envelope_tail(flat, 0.0, t, false, cfg, split, spec).value.real() +
                         envelope_tail(beat, -1.0, t, false, cfg, split, spec).value.real();
  const double k2_tail = envelope_tail(flat, 0.0, t, true, cfg, split, spec).value.real() +
                         envelope_tail(beat, -1.0, t, true, cfg, split, spec).value.real();

  const double pref = std::exp(-2.0 * g0 * t);
  return {pref * (near.value.real() + k1_tail), pref * (near.value.imag() + k2_tail)};
}

std::pair<cplx, cplx> mu_fns(const SystemConfig& cfg, const RateSet& rates, double t,
                             const quad::QuadratureSpec& spec) {
  require_time(t);
  if (t == 0.0) return {0.0, 0.0};

  const double w0 = cfg.omega0;
  const double g0 = rates.gamma0;
  const double gsym = rates.gamma0 + rates.gamma_r;
  const cplx z_double(2.0 * w0, -2.0 * g0);           // |11>
  const cplx z_single(w0 + rates.sigma, -gsym);       // |+>
  auto z_cascade = [&](double k) { return z_single + k; };  // |+> plus one photon

  // nu_a / g_a and s_a^* in their two-pole forms.
  auto amplitude = [&](double k) {
    const cplx nu = two_pole(z_double, z_cascade(k), t);
    const cplx s = two_pole(cplx(k, 0.0), z_single, t);
    return nu * std::conj(s);
  };

  const double center_nu = w0 - rates.sigma;
  const double center_s = w0 + rates.sigma;
  const double split = std::max(tail_split(cfg, center_nu, std::abs(g0 - rates.gamma_r)),
                                tail_split(cfg, center_s, gsym));
  std::vector<double> pts;
  add_cluster(pts, center_nu, std::abs(g0 - rates.gamma_r), 0.0, split);
  add_cluster(pts, center_s, gsym, 0.0, split);
  add_cluster(pts, w0, 1.0 / t, 0.0, split);

  auto head1 = [&](double k) { return self_density(cfg, k) * amplitude(k); };
  auto head2 = [&](double k) { return cross_density(cfg, k) * amplitude(k); };
  cplx mu1 = quad::integrate(quad::ComplexFn(head1), 0.0, split, pts, spec).value;
  cplx mu2 = quad::integrate(quad::ComplexFn(head2), 0.0, split, pts, spec).value;

  // Tail: the product of the two divided differences has a non-oscillating
  // part and a part carrying exp(+-i k t).
  //   nu = (e_A - C_B e^{-ikt}) / (zA - zB(k)),  e_A = exp(-i zA t)
  //   s* = (e^{ikt} - e_2*) / (k - z2*),          e_2* = exp(i z2* t)
  const cplx e_a = std::exp(-kI * z_double * t);
  const cplx c_b = std::exp(-kI * z_single * t);
  const cplx e_2c = std::exp(kI * std::conj(z_single) * t);
  auto denom = [&](double k) {
    return (z_double - z_cascade(k)) * (cplx(k, 0.0) - std::conj(z_single));
  };
  auto flat = [&](double k) { return self_density(cfg, k) * (-e_a * e_2c - c_b) / denom(k); };
  auto rising = [&](double k) { return self_density(cfg, k) * e_a / denom(k); };
  auto falling = [&](double k) { return self_density(cfg, k) * c_b * e_2c / denom(k); };

  mu1 += envelope_tail(flat, 0.0, t, false, cfg, split, spec).value;
  mu1 += envelope_tail(rising, 1.0, t, false, cfg, split, spec).value;
  mu1 += envelope_tail(falling, -1.0, t, false, cfg, split, spec).value;
  mu2 += envelope_tail(flat, 0.0, t, true, cfg, split, spec).value;
  mu2 += envelope_tail(rising, 1.0, t, true, cfg, split, spec).value;
  mu2 += envelope_tail(falling, -1.0, t, true, cfg, split, spec).value;
  return {mu1, mu2};
}

EvolutionFunctions evaluate(const SystemConfig& cfg, const RateSet& rates, double t,
                            EvolutionMode mode, bool with_mu, const quad::QuadratureSpec& spec) {
  require_time(t);
  EvolutionFunctions ev;
  ev.t = t;
  ev.mode = mode;
  ev.u = u_fn(rates, cfg.omega0, t);
  std::tie(ev.v_plus, ev.v_minus) = v_pm(rates, cfg.omega0, t);
  if (mode == EvolutionMode::ClosedForm) {
    std::tie(ev.kappa1, ev.kappa2) = kappa_closed(rates, t);
  } else {
    std::tie(ev.kappa1, ev.kappa2) = kappa_quadrature(cfg, rates, t, spec);
  }
  if (with_mu) {
    std::tie(ev.mu1, ev.mu2) = mu_fns(cfg, rates, t, spec);
    ev.has_mu = true;
  }
  return ev;
}

}  // namespace qpd
