#pragma once

// Run configuration for the qpd command-line tool.
//
// File format: INI-style sections with key = value lines, '#' or ';' comments.
// Lists are whitespace or comma separated. Every key can be overridden from the
// environment as QPD_<SECTION>_<KEY> (e.g. QPD_PHYSICS_LAMBDA_SQ). Precedence,
// lowest first: built-in defaults, config file, environment, command-line flags.
//
//   [scenario]  name = class_a | bell_plus | bell_minus | product_superposition
//               p = 0.8
//   [physics]   lambda_sq, omega0, r, dipole_cos, cutoff_eps
//   [time]      t_max, n_steps, time_units = gamma0 | absolute
//   [run]       mode = closed_form | quadrature, compare_markov, jobs
//   [sweep]     r = <list>, p = <list>
//   [output]    prefix, gnuplot

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpd/dynamics.hpp"

namespace qpd::cli {

/// A configuration problem attributable to one key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

enum class TimeUnits { Gamma0, Absolute };

struct RunConfig {
  Scenario scenario = Scenario::ClassA;
  double p = 0.5;
  SystemConfig physics{};
  bool cutoff_explicit = false;  // otherwise cutoff_eps = 1e-3 / omega0
  EvolutionMode mode = EvolutionMode::ClosedForm;
  bool compare_markov = false;
  double t_max = 10.0;
  int n_steps = 2000;
  TimeUnits time_units = TimeUnits::Gamma0;
  std::optional<std::vector<double>> sweep_r;
  std::optional<std::vector<double>> sweep_p;
  std::string out_prefix = "qpd_run";
  bool gnuplot = false;
  unsigned jobs = 1;

  /// Throws ConfigError naming the first offending key.
  void validate() const;

  /// t_max converted to absolute time.
  double t_max_absolute() const;

  /// Grid of n_steps + 1 absolute times from 0 to t_max.
  std::vector<double> time_grid() const;

  /// Factor that converts absolute times into the configured output units.
  double output_time_scale() const;

  /// The resolved configuration in the same format the loader accepts.
  std::string to_text() const;
};

using Environment = std::map<std::string, std::string>;

/// Environment variables starting with QPD_.
Environment process_environment();

/// Applies config text and then environment overrides on top of `base`.
/// Throws ConfigError for unknown keys, malformed values or failed validation.
RunConfig parse_config(const std::string& text, const Environment& env, RunConfig base = {});

/// Same, reading the text from a file; an empty path means no file.
RunConfig load_config(const std::string& path, const Environment& env);

/// Every recognised key as "section.key".
std::vector<std::string> known_keys();

/// QPD_SECTION_KEY for "section.key".
std::string env_name(const std::string& key);

EvolutionMode parse_mode(const std::string& key, const std::string& value);

}  // namespace qpd::cli
