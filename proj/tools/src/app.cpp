#include "qpd/cli/app.hpp"

#include <CLI11.hpp>

#include <cerrno>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include "qpd/cli/runner.hpp"

namespace qpd::cli {

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::string mode;
  std::string jobs;
};

void add_flags(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config, "INI run configuration");
  app.add_option("--out", f.out, "Output path prefix");
  app.add_option("--mode", f.mode, "closed | quadrature");
  app.add_option("--jobs", f.jobs, "Worker threads");
}

unsigned parse_jobs(const std::string& text) {
  char* end = nullptr;
  errno = 0;
  const long n = std::strtol(text.c_str(), &end, 10);
  if (text.empty() || *end != '\0' || errno == ERANGE || n < 1 || n > 1024) {
    throw ConfigError("--jobs", "expected an integer in [1, 1024], got '" + text + "'");
  }
  return static_cast<unsigned>(n);
}

}  // namespace

int run_cli(int argc, const char* const* argv, const Environment& env, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Two qubits in a common vacuum field: exact and Born-Markov dynamics", "qpd"};
  app.require_subcommand(1);
  Flags flags;
  add_flags(app, flags);

  struct Sub {
    Command cmd;
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {Command::Rates, "rates", "Print the derived rates and validity warnings"},
      {Command::Evolve, "evolve", "Propagate one configuration and write its trajectory"},
      {Command::Sweep, "sweep", "Run every point of the r and p sweep lists"},
      {Command::CompareMarkov, "compare-markov", "Sweep with the Born-Markov comparison enabled"},
  };
  std::vector<CLI::App*> handles;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->fallthrough();
    handles.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  Command cmd = Command::Rates;
  for (std::size_t i = 0; i < handles.size(); ++i) {
    if (handles[i]->parsed()) cmd = subs[i].cmd;
  }

  RunConfig cfg;
  try {
    std::string path = flags.config;
    if (path.empty()) {
      const auto it = env.find("QPD_CONFIG");
      if (it != env.end()) path = it->second;
    }
    cfg = load_config(path, env);
    if (!flags.out.empty()) cfg.out_prefix = flags.out;
    if (!flags.mode.empty()) cfg.mode = parse_mode("--mode", flags.mode);
    if (!flags.jobs.empty()) cfg.jobs = parse_jobs(flags.jobs);
    if (cmd == Command::CompareMarkov) cfg.compare_markov = true;
    cfg.validate();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    return execute(cmd, cfg, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace qpd::cli
