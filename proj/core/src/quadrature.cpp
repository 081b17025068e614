#include "qpd/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

namespace qpd::quad {

namespace {

// 21-point Kronrod abscissae and weights with the embedded 10-point Gauss rule
// (QUADPACK qk21). Odd indices are the Gauss nodes.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980800700, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr double kEps = std::numeric_limits<double>::epsilon();

template <typename T>
bool all_finite(const T& v) {
  if constexpr (std::is_same_v<T, double>) {
    return std::isfinite(v);
  } else {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  }
}

template <typename T>
struct Segment {
  double a;
  double b;
  T value;
  double error;
  int depth;
};

template <typename T, typename F>
Segment<T> gauss_kronrod(const F& f, double a, double b, int depth) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  std::array<T, 21> fv{};
  const T fc = f(center);
  fv[20] = fc;
  T resk = fc * kWgk[10];
  T resg{};
  double resabs = std::abs(fc) * kWgk[10];
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    const T f1 = f(center - dx);
    const T f2 = f(center + dx);
    fv[2 * j] = f1;
    fv[2 * j + 1] = f2;
    resk += (f1 + f2) * kWgk[j];
    resabs += (std::abs(f1) + std::abs(f2)) * kWgk[j];
    if (j % 2 == 1) resg += (f1 + f2) * kWg[j / 2];
  }
  for (const auto& v : fv) {
    if (!all_finite(v)) {
      std::ostringstream os;
      os << "integrand is not finite on [" << a << ", " << b << "]";
      throw QuadratureFailure(os.str());
    }
  }

  const T mean = resk * 0.5;
  double resasc = std::abs(fc - mean) * kWgk[10];
  for (int j = 0; j < 10; ++j) {
    resasc += (std::abs(fv[2 * j] - mean) + std::abs(fv[2 * j + 1] - mean)) * kWgk[j];
  }
  const double ah = std::abs(half);
  resasc *= ah;
  resabs *= ah;

  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    err = std::max(50.0 * kEps * resabs, err);
  }
  return {a, b, resk * half, err, depth};
}

template <typename T, typename F>
QuadResult<T> adaptive(const F& f, double a, double b, std::span<const double> breakpoints,
                       const QuadratureSpec& spec) {
  spec.validate();
  if (!(a < b)) {
    if (a == b) return {};
    std::ostringstream os;
    os << "integration bounds must satisfy a < b (got a=" << a << ", b=" << b << ")";
    throw DomainError(os.str());
  }

  std::vector<double> cuts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Segment<T>> segs;
  segs.reserve(64);
  auto cmp = [&segs](std::size_t i, std::size_t j) { return segs[i].error < segs[j].error; };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> heap(cmp);

  std::size_t evals = 0;
  T total{};
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    segs.push_back(gauss_kronrod<T>(f, cuts[i], cuts[i + 1], 0));
    evals += 21;
    total += segs.back().value;
    total_err += segs.back().error;
    heap.push(segs.size() - 1);
  }

  std::vector<bool> live(segs.size(), true);
  std::size_t live_count = segs.size();
  while (!heap.empty() && total_err > spec.target(std::abs(total))) {
    const std::size_t idx = heap.top();
    heap.pop();
    const Segment<T> s = segs[idx];
    if (s.depth >= spec.max_depth) continue;  // frozen: cannot be refined further
    if (live_count + 1 > spec.max_subintervals) break;

    const double mid = 0.5 * (s.a + s.b);
    if (!(mid > s.a && mid < s.b)) continue;  // interval at machine resolution
    Segment<T> left = gauss_kronrod<T>(f, s.a, mid, s.depth + 1);
    Segment<T> right = gauss_kronrod<T>(f, mid, s.b, s.depth + 1);
    evals += 42;

    total += left.value + right.value - s.value;
    total_err += left.error + right.error - s.error;
    live[idx] = false;
    segs.push_back(left);
    live.push_back(true);
    heap.push(segs.size() - 1);
    segs.push_back(right);
    live.push_back(true);
    heap.push(segs.size() - 1);
    ++live_count;
  }

  // Re-sum in a fixed order so the result does not carry incremental drift.
  QuadResult<T> out;
  out.evaluations = evals;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (!live[i]) continue;
    out.value += segs[i].value;
    out.error += segs[i].error;
  }

  if (out.error > spec.target(std::abs(out.value))) {
    std::ostringstream os;
    os << "adaptive quadrature on [" << a << ", " << b << "] reached error " << out.error
       << " above target " << spec.target(std::abs(out.value));
    RealResult best;
    if constexpr (std::is_same_v<T, double>) {
      best = {out.value, out.error, out.evaluations};
    } else {
      best = {std::abs(out.value), out.error, out.evaluations};
    }
    throw ToleranceNotMet(os.str(), best);
  }
  return out;
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw DomainError("quadrature tolerances must be positive");
  }
  if (max_depth < 10) throw DomainError("quadrature max_depth must be at least 10");
  if (max_subintervals < 1) throw DomainError("quadrature max_subintervals must be positive");
  if (cutoff_eps < 0.0) throw DomainError("quadrature cutoff_eps must be non-negative");
}

double QuadratureSpec::target(double value) const {
  return std::max(abs_tol, rel_tol * std::abs(value));
}

RealResult integrate(const RealFn& f, double a, double b, const QuadratureSpec& spec) {
  return adaptive<double>(f, a, b, {}, spec);
}

RealResult integrate(const RealFn& f, double a, double b, std::span<const double> breakpoints,
                     const QuadratureSpec& spec) {
  return adaptive<double>(f, a, b, breakpoints, spec);
}

ComplexResult integrate(const ComplexFn& f, double a, double b,
                        std::span<const double> breakpoints, const QuadratureSpec& spec) {
  return adaptive<std::complex<double>>(f, a, b, breakpoints, spec);
}

RealResult pv_integrate(const RealFn& g, double pole, double a, double b,
                        const QuadratureSpec& spec) {
  if (!(a < pole && pole < b)) {
    std::ostringstream os;
    os << "principal value needs a < pole < b (got a=" << a << ", pole=" << pole << ", b=" << b
       << ")";
    throw DomainError(os.str());
  }
  const double h = std::min(pole - a, b - pole);

  // Odd part around the pole; the integrand tends to 2 g'(pole) as u -> 0 and
  // the Kronrod nodes never touch u = 0.
  auto folded = [&g, pole](double u) { return (g(pole + u) - g(pole - u)) / u; };
  RealResult out = integrate(folded, 0.0, h, spec);

  auto direct = [&g, pole](double x) { return g(x) / (x - pole); };
  if (pole - h > a) out += integrate(direct, a, pole - h, spec);
  if (pole + h < b) out += integrate(direct, pole + h, b, spec);
  return out;
}

std::pair<double, double> wynn_epsilon(std::span<const double> sums) {
  const std::size_t n = sums.size();
  if (n == 0) return {0.0, std::numeric_limits<double>::infinity()};
  if (n < 3) {
    const double err = n == 2 ? std::abs(sums[1] - sums[0]) : std::numeric_limits<double>::infinity();
    return {sums.back(), err};
  }

  std::vector<double> prev(n + 1, 0.0);  // column k-1
  std::vector<double> cur(sums.begin(), sums.end());  // column k
  double best = sums.back();
  double best_err = std::abs(sums[n - 1] - sums[n - 2]);
  double last_even = best;

  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t m = n - k;
    std::vector<double> next(m);
    bool degenerate = false;
    for (std::size_t j = 0; j < m; ++j) {
      const double diff = cur[j + 1] - cur[j];
      if (diff == 0.0 || !std::isfinite(1.0 / diff)) {
        degenerate = true;
        break;
      }
      next[j] = prev[j + 1] + 1.0 / diff;
    }
    if (degenerate) break;
    if (k % 2 == 0) {
      const double est = next[m - 1];
      if (!std::isfinite(est)) break;
      double err = std::abs(est - last_even);
      if (m >= 2) err += std::abs(est - next[m - 2]);
      if (err < best_err) {
        best = est;
        best_err = err;
      }
      last_even = est;
    }
    prev = std::move(cur);
    cur = std::move(next);
  }
  return {best, best_err};
}

RealResult oscillatory_tail(const RealFn& f, double a, double omega_osc, double cutoff_eps,
                            const QuadratureSpec& spec) {
  spec.validate();
  if (omega_osc < 0.0) omega_osc = -omega_osc;
  if (cutoff_eps < 0.0) throw DomainError("cutoff_eps must be non-negative");

  QuadratureSpec piece_spec = spec;
  piece_spec.abs_tol = spec.abs_tol * 1e-2;

  RealResult out;
  constexpr std::size_t kMaxPieces = 20000;

  // Smooth integrand (or one whose oscillation period exceeds the damping
  // length): march over geometrically growing panels.
  const bool smooth = omega_osc == 0.0 ||
                      (cutoff_eps > 0.0 && M_PI / omega_osc > 40.0 / cutoff_eps);
  if (smooth) {
    double x = a;
    double width = std::max(std::abs(a), 1.0);
    if (cutoff_eps > 0.0) width = std::min(width, 1.0 / cutoff_eps);
    int quiet = 0;
    for (std::size_t j = 0; j < kMaxPieces; ++j) {
      const RealResult panel = integrate(f, x, x + width, piece_spec);
      out += panel;
      x += width;
      width *= 2.0;
      const bool damped = cutoff_eps > 0.0 && cutoff_eps * (x - a) > 45.0;
      quiet = std::abs(panel.value) <= 0.1 * spec.target(std::abs(out.value)) ? quiet + 1 : 0;
      if (damped || quiet >= 3) {
        out.error += std::abs(panel.value);
        return out;
      }
    }
    throw ToleranceNotMet("non-oscillatory tail did not decay", out);
  }

  const double half_period = M_PI / omega_osc;
  std::vector<double> sums;
  sums.reserve(256);
  double running = 0.0;
  double prev_est = std::numeric_limits<double>::quiet_NaN();
  int stable = 0;
  double est = 0.0;
  double est_err = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < kMaxPieces; ++j) {
    const double lo = a + static_cast<double>(j) * half_period;
    const RealResult piece = integrate(f, lo, lo + half_period, piece_spec);
    running += piece.value;
    out.error += piece.error;
    out.evaluations += piece.evaluations;
    sums.push_back(running);

    // Strong damping: the series converges on its own.
    if (cutoff_eps > 0.0 && cutoff_eps * (lo + half_period - a) > 45.0) {
      out.value = running;
      out.error += std::abs(piece.value);
      return out;
    }
    if (sums.size() < 4) continue;

    const std::size_t window = std::min<std::size_t>(sums.size(), 24);
    std::tie(est, est_err) =
        wynn_epsilon(std::span<const double>(sums).subspan(sums.size() - window));
    const double tol = spec.target(std::abs(est));
    if (!std::isnan(prev_est) && std::abs(est - prev_est) <= tol && est_err <= tol) {
      if (++stable >= 2) {
        out.value = est;
        out.error += std::max(std::abs(est - prev_est), est_err);
        return out;
      }
    } else {
      stable = 0;
    }
    prev_est = est;
  }
  out.value = est;
  out.error += est_err;
  throw ToleranceNotMet("oscillatory tail: partial sums did not stabilise", out);
}

}  // namespace qpd::quad
