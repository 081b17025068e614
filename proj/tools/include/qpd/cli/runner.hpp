#pragma once

// Scenario execution and file output for the qpd command-line tool.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qpd/cli/config.hpp"
#include "qpd/entanglement.hpp"

namespace qpd::cli {

inline constexpr const char* kTrajectoryHeader =
    "t,rho00,rho0101,rho1010,rho1111,re_rho_IO,im_rho_IO,re_rho_0110,im_rho_0110,"
    "concurrence,concurrence_markov,purity,min_eig";
inline constexpr const char* kSummaryHeader =
    "r,p,death_t1,revival_t1,min_concurrence,final_vacuum_pop";

struct SweepPoint {
  double r = 1.0;
  double p = 0.5;
};

/// Cartesian product of the sweep lists in r-major order. Missing lists fall
/// back to physics.r and scenario.p.
std::vector<SweepPoint> sweep_points(const RunConfig& cfg);

struct PointResult {
  SweepPoint point;
  RateSet rates;
  Trajectory trajectory;          // the valid prefix when the run failed
  std::optional<std::string> failure;
};

/// Simulates one sweep point. Numerical failures are caught; the trajectory
/// is then cut at the first time that could not be evaluated.
PointResult run_point(const RunConfig& cfg, const SweepPoint& point, unsigned jobs);

struct SummaryRow {
  double r = 0.0;
  double p = 0.0;
  std::optional<double> death_t1;    // output time units
  std::optional<double> revival_t1;  // first revival after death_t1
  double min_concurrence = 0.0;
  double final_vacuum_pop = 0.0;
};

/// Death / revival scan with bisection refinement. markov selects the
/// Born-Markov series, which requires compare_markov.
SummaryRow summarise(const RunConfig& cfg, const PointResult& res, bool markov);

void write_trajectory_csv(std::ostream& os, const RunConfig& cfg, const PointResult& res);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

/// Formats a double the way every CSV cell is written.
std::string format_cell(double x);

enum class Command { Rates, Evolve, Sweep, CompareMarkov };

/// Runs a command and writes its files under cfg.out_prefix. Returns the exit
/// status: 0 on success, 3 on a numerical failure.
int execute(Command cmd, const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace qpd::cli
