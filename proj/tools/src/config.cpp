#include "qpd/cli/config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

extern char** environ;

namespace qpd::cli {

namespace {

using Values = std::vector<std::string>;

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

const std::string& single(const std::string& key, const Values& v) {
  if (v.size() != 1 || v[0].empty()) throw ConfigError(key, "expects exactly one value");
  return v[0];
}

double to_double(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(x)) {
    throw ConfigError(key, "'" + text + "' is not a finite number");
  }
  return x;
}

long to_long(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  char* end = nullptr;
  errno = 0;
  const long x = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0' || errno == ERANGE) {
    throw ConfigError(key, "'" + text + "' is not an integer");
  }
  return x;
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string s = lower(trim(text));
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key, "'" + text + "' is not a boolean");
}

std::vector<double> to_list(const std::string& key, const Values& v) {
  std::vector<double> out;
  for (const auto& item : v) {
    std::stringstream ss(item);
    std::string token;
    while (std::getline(ss, token, ',')) {
      token = trim(token);
      if (!token.empty()) out.push_back(to_double(key, token));
    }
  }
  if (out.empty()) throw ConfigError(key, "list is empty");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const Values&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"scenario.name",
       [](RunConfig& c, const std::string& k, const Values& v) {
         const auto s = parse_scenario(lower(single(k, v)));
         if (!s) throw ConfigError(k, "unknown scenario '" + v[0] + "'");
         c.scenario = *s;
       }},
      {"scenario.p",
       [](RunConfig& c, const std::string& k, const Values& v) { c.p = to_double(k, single(k, v)); }},
      {"physics.lambda_sq",
       [](RunConfig& c, const std::string& k, const Values& v) {
         c.physics.lambda_sq = to_double(k, single(k, v));
       }},
      {"physics.omega0",
       [](RunConfig& c, const std::string& k, const Values& v) {
         c.physics.omega0 = to_double(k, single(k, v));
       }},
      {"physics.r",
       [](RunConfig& c, const std::string& k, const Values& v) {
         c.physics.r = to_double(k, single(k, v));
       }},
      {"physics.dipole_cos",
       [](RunConfig& c, const std::string& k, const Values& v) {
         c.physics.dipole_cos = to_double(k, single(k, v));
       }},
      {"physics.cutoff_eps",
       [](RunConfig& c, const std::string& k, const Values& v) {
         c.physics.cutoff_eps = to_double(k, single(k, v));
         c.cutoff_explicit = true;
       }},
      {"time.t_max",
       [](RunConfig& c, const std::string& k, const Values& v) { c.t_max = to_double(k, single(k, v)); }},
      {"time.n_steps",
       [](RunConfig& c, const std::string& k, const Values& v) {
         const long n = to_long(k, single(k, v));
         if (n < 2 || n > 10000000) throw ConfigError(k, "must lie in [2, 1e7]");
         c.n_steps = static_cast<int>(n);
       }},
      {"time.time_units",
       [](RunConfig& c, const std::string& k, const Values& v) {
         const std::string s = lower(single(k, v));
         if (s == "gamma0") {
           c.time_units = TimeUnits::Gamma0;
         } else if (s == "absolute") {
           c.time_units = TimeUnits::Absolute;
         } else {
           throw ConfigError(k, "expected 'gamma0' or 'absolute', got '" + v[0] + "'");
         }
       }},
      {"run.mode",
       [](RunConfig& c, const std::string& k, const Values& v) { c.mode = parse_mode(k, single(k, v)); }},
      {"run.compare_markov",
       [](RunConfig& c, const std::string& k, const Values& v) {
         c.compare_markov = to_bool(k, single(k, v));
       }},
      {"run.jobs",
       [](RunConfig& c, const std::string& k, const Values& v) {
         const long n = to_long(k, single(k, v));
         if (n < 1 || n > 1024) throw ConfigError(k, "must lie in [1, 1024]");
         c.jobs = static_cast<unsigned>(n);
       }},
      {"sweep.r", [](RunConfig& c, const std::string& k, const Values& v) { c.sweep_r = to_list(k, v); }},
      {"sweep.p", [](RunConfig& c, const std::string& k, const Values& v) { c.sweep_p = to_list(k, v); }},
      {"output.prefix",
       [](RunConfig& c, const std::string& k, const Values& v) {
         std::string joined;
         for (const auto& s : v) joined += (joined.empty() ? "" : " ") + s;
         if (trim(joined).empty()) throw ConfigError(k, "must not be empty");
         c.out_prefix = trim(joined);
       }},
      {"output.gnuplot",
       [](RunConfig& c, const std::string& k, const Values& v) { c.gnuplot = to_bool(k, single(k, v)); }},
  };
  return table;
}

const Setter* find_setter(const std::string& key) {
  for (const auto& [name, fn] : setters()) {
    if (name == key) return &fn;
  }
  return nullptr;
}

void apply(RunConfig& cfg, const std::string& key, const Values& values) {
  const Setter* fn = find_setter(key);
  if (fn == nullptr) throw ConfigError(key, "unknown key");
  (*fn)(cfg, key, values);
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : ", ") + format_double(x);
  return out;
}

}  // namespace

EvolutionMode parse_mode(const std::string& key, const std::string& value) {
  const std::string s = lower(trim(value));
  if (s == "closed" || s == "closed_form") return EvolutionMode::ClosedForm;
  if (s == "quadrature") return EvolutionMode::Quadrature;
  throw ConfigError(key, "expected 'closed_form' (or 'closed') or 'quadrature', got '" + value + "'");
}

std::vector<std::string> known_keys() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : setters()) out.push_back(name);
  return out;
}

std::string env_name(const std::string& key) {
  std::string out = "QPD_";
  for (char c : key) out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

Environment process_environment() {
  Environment env;
  for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
    const std::string entry(*e);
    if (entry.rfind("QPD_", 0) != 0) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    env[entry.substr(0, eq)] = entry.substr(eq + 1);
  }
  return env;
}

void RunConfig::validate() const {
  try {
    SystemConfig probe = physics;
    probe.validate();
  } catch (const DomainError& e) {
    const std::string what = e.what();
    for (const char* k : {"lambda_sq", "omega0", "dipole_cos", "cutoff_eps"}) {
      if (what.rfind(k, 0) == 0) throw ConfigError(std::string("physics.") + k, what);
    }
    if (what.rfind("r ", 0) == 0) throw ConfigError("physics.r", what);
    throw ConfigError("physics", what);
  }
  if (!(physics.r > 0.0)) throw ConfigError("physics.r", "must be positive");
  if (scenario == Scenario::ClassA || scenario == Scenario::ProductSuperposition) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("scenario.p", "must lie in [0, 1]");
  }
  if (!(t_max > 0.0)) throw ConfigError("time.t_max", "must be positive");
  if (n_steps < 2) throw ConfigError("time.n_steps", "must be at least 2");
  if (jobs < 1) throw ConfigError("run.jobs", "must be at least 1");
  if (compare_markov && scenario != Scenario::ClassA) {
    throw ConfigError("run.compare_markov", "the Markov comparison requires scenario.name = class_a");
  }
  if (sweep_r) {
    if (sweep_r->empty()) throw ConfigError("sweep.r", "list is empty");
    for (double r : *sweep_r) {
      if (!(r > 0.0)) throw ConfigError("sweep.r", "separations must be positive");
    }
  }
  if (sweep_p) {
    if (sweep_p->empty()) throw ConfigError("sweep.p", "list is empty");
    for (double v : *sweep_p) {
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("sweep.p", "weights must lie in [0, 1]");
    }
  }
  if (out_prefix.empty()) throw ConfigError("output.prefix", "must not be empty");
}

double RunConfig::t_max_absolute() const {
  return time_units == TimeUnits::Gamma0 ? t_max / qpd::gamma0(physics) : t_max;
}

double RunConfig::output_time_scale() const {
  return time_units == TimeUnits::Gamma0 ? qpd::gamma0(physics) : 1.0;
}

std::vector<double> RunConfig::time_grid() const {
  const double t_end = t_max_absolute();
  std::vector<double> out(static_cast<std::size_t>(n_steps) + 1);
  for (int i = 0; i <= n_steps; ++i) out[i] = t_end * i / n_steps;
  return out;
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  os << "[scenario]\nname = " << scenario_name(scenario) << "\np = " << format_double(p) << "\n\n";
  os << "[physics]\nlambda_sq = " << format_double(physics.lambda_sq)
     << "\nomega0 = " << format_double(physics.omega0) << "\nr = " << format_double(physics.r)
     << "\ndipole_cos = " << format_double(physics.dipole_cos)
     << "\ncutoff_eps = " << format_double(physics.cutoff_eps) << "\n\n";
  os << "[time]\nt_max = " << format_double(t_max) << "\nn_steps = " << n_steps
     << "\ntime_units = " << (time_units == TimeUnits::Gamma0 ? "gamma0" : "absolute") << "\n\n";
  os << "[run]\nmode = " << (mode == EvolutionMode::ClosedForm ? "closed_form" : "quadrature")
     << "\ncompare_markov = " << (compare_markov ? "true" : "false") << "\njobs = " << jobs << "\n\n";
  if (sweep_r || sweep_p) {
    os << "[sweep]\n";
    if (sweep_r) os << "r = " << format_list(*sweep_r) << "\n";
    if (sweep_p) os << "p = " << format_list(*sweep_p) << "\n";
    os << "\n";
  }
  os << "[output]\nprefix = " << out_prefix << "\ngnuplot = " << (gnuplot ? "true" : "false") << "\n";
  return os.str();
}

RunConfig parse_config(const std::string& text, const Environment& env, RunConfig cfg) {
  std::istringstream in(text);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError("config", e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    std::string key;
    for (const auto& parent : item.parents) key += lower(parent) + ".";
    key += lower(item.name);
    if (item.parents.empty()) throw ConfigError(key, "key must appear inside a [section]");
    apply(cfg, key, item.inputs);
  }

  for (const auto& key : known_keys()) {
    const auto it = env.find(env_name(key));
    if (it == env.end()) continue;
    Values v;
    std::istringstream ss(it->second);
    std::string tok;
    while (ss >> tok) v.push_back(tok);
    if (v.empty()) v.push_back("");
    apply(cfg, key, v);
  }
  for (const auto& [name, value] : env) {
    bool known = name == "QPD_CONFIG";
    for (const auto& key : known_keys()) known = known || env_name(key) == name;
    if (!known) throw ConfigError(name, "unrecognised QPD_ environment override");
  }

  if (!cfg.cutoff_explicit && cfg.physics.omega0 > 0.0) cfg.physics.cutoff_eps = 1e-3 / cfg.physics.omega0;
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path, const Environment& env) {
  if (path.empty()) return parse_config("", env);
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), env);
}

}  // namespace qpd::cli
