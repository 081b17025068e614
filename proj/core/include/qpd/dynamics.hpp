#pragma once

// The exact reduced propagation map and the closed-form trajectories built on it.
//
// The propagator is written for elements rho^{ab}_{cd} = <cd| rho |ab>, so an
// amplitude such as u(t) multiplies <00| rho |11> and the |I><O| entry carries
// u*(t).

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qpd/evolution.hpp"
#include "qpd/state.hpp"

namespace qpd {

/// Applies the map defined by ev to rho0. Throws InvariantViolation if the
/// result is not Hermitian or not unit trace, and DomainError if rho0 has
/// coherences between |11> and the single-excitation states while ev carries
/// no mu.
TwoQubitState propagate(const TwoQubitState& rho0, const EvolutionFunctions& ev);

/// p e^{-4 G0 t} |I><I| + sqrt(p(1-p)) e^{-2 G0 t} (e^{2 i w0 t} |I><O| + h.c.)
/// + p (k1 - k2) |-><-| + p (k1 + k2) |+><+| + (1 - p e^{-4 G0 t} - 2 p k1) |O><O|.
TwoQubitState class_a_closed_form(double p, const RateSet& rates, double omega0, double t);

/// e^{-2 (G0 +- Gr) t} |+-><+-| + (1 - e^{-2 (G0 +- Gr) t}) |00><00|.
TwoQubitState bell_closed_form(int sign, const RateSet& rates, double t);

/// Product-superposition state at time t assembled directly from v+-.
TwoQubitState product_superposition_closed_form(double p, const RateSet& rates, double omega0,
                                                double t);

/// Reduced states of the product-superposition scenario:
///   first:  p |v+|^2 |1><1| + sqrt(p(1-p)) (v+ |0><1| + v+* |1><0|) + (1 - p |v+|^2) |0><0|
///   second: the same with v- in place of v+.
Matrix2c reduced_first_closed_form(double p, const RateSet& rates, double omega0, double t);
Matrix2c reduced_second_closed_form(double p, const RateSet& rates, double omega0, double t);

enum class Scenario { ClassA, BellPlus, BellMinus, ProductSuperposition };

const char* scenario_name(Scenario s);
std::optional<Scenario> parse_scenario(std::string_view name);

/// Initial state for a scenario; p is ignored for Bell states.
TwoQubitState initial_state(Scenario s, double p);

struct Observables {
  double concurrence = 0.0;
  double witness = 0.0;  // unclamped l1 - l2 - l3 - l4; sign changes mark death / revival
  std::optional<double> concurrence_markov;
  std::optional<double> witness_markov;
  double purity = 1.0;
  double min_eigenvalue = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<TwoQubitState> states;
  std::vector<Observables> observables;

  std::size_t size() const { return times.size(); }
  /// Throws InvariantViolation unless times strictly increase and all
  /// sequences have equal length.
  void validate() const;
};

struct SimulationRequest {
  Scenario scenario = Scenario::ClassA;
  double p = 0.5;
  EvolutionMode mode = EvolutionMode::ClosedForm;
  bool compare_markov = false;  // ClassA only
  unsigned jobs = 1;            // worker threads over the time grid
  quad::QuadratureSpec spec{};
};

/// Propagates the scenario's initial state over a caller-supplied grid and
/// fills the observables. Every state is validated against the tolerance of
/// the chosen mode.
Trajectory simulate(const SystemConfig& cfg, const RateSet& rates, const SimulationRequest& req,
                    std::span<const double> times);

}  // namespace qpd
