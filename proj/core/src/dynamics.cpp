#include "qpd/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "qpd/entanglement.hpp"

namespace qpd {

namespace {

using basis::k00;
using basis::k01;
using basis::k10;
using basis::k11;

constexpr double kMuNeededThreshold = 1e-15;

// rho^{a}_{b} = <b| rho |a>
struct Upper {
  const Matrix4c& m;
  cplx operator()(int a, int b) const { return m(b, a); }
};

struct Builder {
  Matrix4c m = Matrix4c::Zero();
  double diag_imag = 0.0;

  void put(int a, int b, cplx value) {
    if (a == b) {
      diag_imag = std::max(diag_imag, std::abs(value.imag()));
      m(a, a) = value.real();
      return;
    }
    m(b, a) = value;
    m(a, b) = std::conj(value);
  }
};

void set_bell_block(Matrix4c& m, double plus, double minus) {
  m(k01, k01) = 0.5 * (plus + minus);
  m(k10, k10) = 0.5 * (plus + minus);
  m(k01, k10) = 0.5 * (plus - minus);
  m(k10, k01) = 0.5 * (plus - minus);
}

}  // namespace

TwoQubitState propagate(const TwoQubitState& rho0, const EvolutionFunctions& ev) {
  const Upper r{rho0.matrix()};
  if (!ev.has_mu &&
      (std::abs(r(k11, k01)) > kMuNeededThreshold || std::abs(r(k11, k10)) > kMuNeededThreshold)) {
    throw DomainError(
        "initial state has <01|rho|11> or <10|rho|11> coherence; evolution functions need mu");
  }

  const cplx u = ev.u;
  const cplx vp = ev.v_plus;
  const cplx vm = ev.v_minus;
  const double vp2 = std::norm(vp);
  const double vm2 = std::norm(vm);
  const cplx pm = vp * std::conj(vm);
  const cplx mp = vm * std::conj(vp);
  const double i0 = r(k11, k11).real();

  Builder b;
  b.put(k11, k11, r(k11, k11) * std::norm(u));
  b.put(k11, k01, r(k11, k01) * u * std::conj(vp) + r(k11, k10) * u * std::conj(vm));
  b.put(k11, k10, r(k11, k10) * u * std::conj(vp) + r(k11, k01) * u * std::conj(vm));
  b.put(k11, k00, r(k11, k00) * u);
  b.put(k01, k00, r(k01, k00) * vp + r(k10, k00) * vm + r(k11, k01) * ev.mu1 +
                      r(k11, k10) * ev.mu2);
  b.put(k10, k00, r(k10, k00) * vp + r(k01, k00) * vm + r(k11, k10) * ev.mu1 +
                      r(k11, k01) * ev.mu2);
  b.put(k01, k01, r(k01, k01) * vp2 + r(k01, k10) * pm + r(k10, k10) * vm2 + r(k10, k01) * mp +
                      i0 * ev.kappa1);
  b.put(k10, k10, r(k10, k10) * vp2 + r(k10, k01) * pm + r(k01, k01) * vm2 + r(k01, k10) * mp +
                      i0 * ev.kappa1);
  b.put(k01, k10, r(k01, k10) * vp2 + r(k10, k01) * vm2 + r(k01, k01) * pm + r(k10, k10) * mp +
                      i0 * ev.kappa2);
  b.put(k00, k00,
        1.0 - b.m(k11, k11).real() - b.m(k01, k01).real() - b.m(k10, k10).real());

  if (b.diag_imag > 1e-12) {
    std::ostringstream os;
    os << "propagated populations have imaginary part " << b.diag_imag;
    throw InvariantViolation(os.str());
  }
  TwoQubitState out(b.m, rho0.label());
  const double tr = std::abs(out.trace() - rho0.trace());
  if (tr > 1e-12 || !b.m.allFinite()) {
    std::ostringstream os;
    os << "propagation changed the trace by " << tr;
    throw InvariantViolation(os.str());
  }
  return out;
}

TwoQubitState class_a_closed_form(double p, const RateSet& rates, double omega0, double t) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
  const auto [k1, k2] = kappa_closed(rates, t);
  const double g0 = rates.gamma0;
  const double upper = p * std::exp(-4.0 * g0 * t);

  Matrix4c m = Matrix4c::Zero();
  m(k11, k11) = upper;
  m(k11, k00) = std::sqrt(p * (1.0 - p)) * std::exp(cplx(-2.0 * g0 * t, 2.0 * omega0 * t));
  m(k00, k11) = std::conj(m(k11, k00));
  set_bell_block(m, p * (k1 + k2), p * (k1 - k2));
  m(k00, k00) = 1.0 - upper - 2.0 * p * k1;
  return TwoQubitState(m, "class_a");
}

TwoQubitState bell_closed_form(int sign, const RateSet& rates, double t) {
  if (sign != 1 && sign != -1) throw DomainError("Bell sign must be +1 or -1");
  const double pop = std::exp(-2.0 * (rates.gamma0 + sign * rates.gamma_r) * t);
  Matrix4c m = Matrix4c::Zero();
  if (sign > 0) {
    set_bell_block(m, pop, 0.0);
  } else {
    set_bell_block(m, 0.0, pop);
  }
  m(k00, k00) = -std::expm1(-2.0 * (rates.gamma0 + sign * rates.gamma_r) * t);
  return TwoQubitState(m, sign > 0 ? "bell_plus" : "bell_minus");
}

TwoQubitState product_superposition_closed_form(double p, const RateSet& rates, double omega0,
                                                double t) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
  const auto [vp, vm] = v_pm(rates, omega0, t);
  const double c = std::sqrt(p * (1.0 - p));
  Matrix4c m = Matrix4c::Zero();
  m(k10, k10) = p * std::norm(vp);
  m(k01, k01) = p * std::norm(vm);
  m(k01, k10) = p * std::conj(vm) * vp;
  m(k10, k01) = p * vm * std::conj(vp);
  m(k10, k00) = c * std::conj(vp);
  m(k01, k00) = c * std::conj(vm);
  m(k00, k10) = c * vp;
  m(k00, k01) = c * vm;
  m(k00, k00) = 1.0 - p * (std::norm(vp) + std::norm(vm));
  return TwoQubitState(m, "product_superposition");
}

namespace {

Matrix2c reduced_closed_form(double p, cplx v) {
  const double c = std::sqrt(p * (1.0 - p));
  Matrix2c m;
  m(1, 1) = p * std::norm(v);
  m(0, 1) = c * v;
  m(1, 0) = c * std::conj(v);
  m(0, 0) = 1.0 - p * std::norm(v);
  return m;
}

}  // namespace

Matrix2c reduced_first_closed_form(double p, const RateSet& rates, double omega0, double t) {
  return reduced_closed_form(p, v_pm(rates, omega0, t).first);
}

Matrix2c reduced_second_closed_form(double p, const RateSet& rates, double omega0, double t) {
  return reduced_closed_form(p, v_pm(rates, omega0, t).second);
}

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::ClassA: return "class_a";
    case Scenario::BellPlus: return "bell_plus";
    case Scenario::BellMinus: return "bell_minus";
    case Scenario::ProductSuperposition: return "product_superposition";
  }
  return "unknown";
}

std::optional<Scenario> parse_scenario(std::string_view name) {
  for (Scenario s : {Scenario::ClassA, Scenario::BellPlus, Scenario::BellMinus,
                     Scenario::ProductSuperposition}) {
    if (name == scenario_name(s)) return s;
  }
  return std::nullopt;
}

TwoQubitState initial_state(Scenario s, double p) {
  switch (s) {
    case Scenario::ClassA: return make_class_a(p);
    case Scenario::BellPlus: return make_bell(1);
    case Scenario::BellMinus: return make_bell(-1);
    case Scenario::ProductSuperposition: return make_product_superposition(p);
  }
  throw DomainError("unknown scenario");
}

void Trajectory::validate() const {
  if (states.size() != times.size() || observables.size() != times.size()) {
    throw InvariantViolation("trajectory sequences have different lengths");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw InvariantViolation("trajectory times are not strictly increasing");
    }
  }
}

Trajectory simulate(const SystemConfig& cfg, const RateSet& rates, const SimulationRequest& req,
                    std::span<const double> times) {
  if (req.compare_markov && req.scenario != Scenario::ClassA) {
    throw DomainError("the Markov comparison is only defined for class_a");
  }
  const TwoQubitState rho0 = initial_state(req.scenario, req.p);
  const StateTolerance tol = req.mode == EvolutionMode::ClosedForm
                                 ? StateTolerance::closed_form()
                                 : StateTolerance::quadrature();

  Trajectory traj;
  traj.times.assign(times.begin(), times.end());
  traj.states.resize(times.size());
  traj.observables.resize(times.size());

  auto fill = [&](std::size_t i) {
    const double t = times[i];
    const EvolutionFunctions ev = evaluate(cfg, rates, t, req.mode, false, req.spec);
    TwoQubitState rho = propagate(rho0, ev);
    rho.validate(tol);

    Observables& obs = traj.observables[i];
    const EntanglementReport rep = analyse(rho);
    obs.concurrence = rep.concurrence;
    obs.witness = rep.method == ConcurrenceMethod::XState ? x_witness(rho) : wootters_witness(rho);
    obs.purity = rep.purity;
    obs.min_eigenvalue = rep.min_eigenvalue;
    if (req.compare_markov) {
      const TwoQubitState mk = markov_class_a_state(req.p, rates, cfg.omega0, t);
      obs.witness_markov = x_witness(mk);
      obs.concurrence_markov = std::max(0.0, *obs.witness_markov);
    }
    traj.states[i] = std::move(rho);
  };

  const std::size_t n = times.size();
  const unsigned jobs = std::max(1u, std::min<unsigned>(req.jobs, static_cast<unsigned>(n)));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fill(i);
  } else {
    // Strided assignment; every slot is written by exactly one worker.
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += jobs) fill(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  traj.validate();
  return traj;
}

}  // namespace qpd
