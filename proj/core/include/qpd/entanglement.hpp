#pragma once

// Concurrence, death / revival detection and the Born-Markov Class-A reference.

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "qpd/dynamics.hpp"

namespace qpd {

enum class ConcurrenceMethod { Wootters, XState };

struct EntanglementReport {
  double concurrence = 0.0;
  double purity = 1.0;
  double min_eigenvalue = 0.0;
  ConcurrenceMethod method = ConcurrenceMethod::Wootters;
};

/// l1 - l2 - l3 - l4 before clamping, l_i the decreasing square roots of the
/// eigenvalues of sqrt(rho) rho~ sqrt(rho), rho~ = (Y x Y) rho* (Y x Y).
/// Eigenvalues of rho below 1e-14 (including negative round-off) count as zero.
/// Throws NumericalFailure if an eigen-solve fails.
double wootters_witness(const TwoQubitState& rho);

/// max(0, wootters_witness(rho)).
double concurrence(const TwoQubitState& rho);

/// Largest non-X entry in magnitude.
double x_pattern_violation(const TwoQubitState& rho);

/// 2 max(|rho03| - sqrt(rho11 rho22), |rho12| - sqrt(rho00 rho33)), unclamped.
/// Throws ShapeError when a non-X entry exceeds 1e-10.
double x_witness(const TwoQubitState& rho);

/// max(0, x_witness(rho)).
double concurrence_x(const TwoQubitState& rho);

double purity(const TwoQubitState& rho);

/// Uses the X-state formula when the pattern holds, Wootters otherwise.
EntanglementReport analyse(const TwoQubitState& rho);

struct DeathRevivalEvents {
  std::vector<double> death_times;
  std::vector<double> revival_times;
  std::vector<double> grazing_times;  // touches of zero without a sign change
  bool open_ended = false;            // the last death has no revival in the window
};

using WitnessFn = std::function<double(double)>;

struct ScanOptions {
  double time_tol = 1e-3;     // bisection stops once the bracket is this narrow
  double graze_tol = 1e-12;   // |witness| at a local extremum counted as a touch
  double zero_tol = 1e-15;    // |witness| at or below this has no resolvable sign
};

/// Brackets sign changes of a sampled witness and refines each root by
/// bisection on `refine` (linear interpolation when refine is empty).
DeathRevivalEvents scan_events(std::span<const double> times, std::span<const double> witness,
                               const WitnessFn& refine = {}, const ScanOptions& opt = {});

/// Same on a trajectory's witness series (or its Markov series).
DeathRevivalEvents scan_events(const Trajectory& traj, const WitnessFn& refine = {},
                               const ScanOptions& opt = {}, bool markov = false);

/// Born-Markov |+> and |-> populations of a Class-A state.
std::pair<double, double> markov_rho_pm(double p, const RateSet& rates, double t);

/// Class-A state with the Born-Markov single-excitation populations; the
/// |I><I| and |I><O| entries are those of class_a_closed_form. Throws
/// InvariantViolation if the result is not a valid state.
TwoQubitState markov_class_a_state(double p, const RateSet& rates, double omega0, double t);

}  // namespace qpd
