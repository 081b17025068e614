#include "qpd/cli/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <limits>
#include <span>
#include <stdexcept>
#include <thread>

namespace qpd::cli {

namespace {

constexpr std::size_t kBlock = 64;

SimulationRequest request_for(const RunConfig& cfg, const SweepPoint& point, unsigned jobs) {
  SimulationRequest req;
  req.scenario = cfg.scenario;
  req.p = point.p;
  req.mode = cfg.mode;
  req.compare_markov = cfg.compare_markov;
  req.jobs = jobs;
  return req;
}

SystemConfig physics_at(const RunConfig& cfg, const SweepPoint& point) {
  SystemConfig sys = cfg.physics;
  sys.r = point.r;
  return sys;
}

void append(Trajectory& dst, Trajectory&& src) {
  dst.times.insert(dst.times.end(), src.times.begin(), src.times.end());
  std::move(src.states.begin(), src.states.end(), std::back_inserter(dst.states));
  std::move(src.observables.begin(), src.observables.end(), std::back_inserter(dst.observables));
}

std::string file_name(const RunConfig& cfg, const std::string& suffix) {
  return cfg.out_prefix + suffix;
}

std::ofstream open_output(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  return os;
}

std::string trajectory_name(const RunConfig& cfg, Command cmd, std::size_t index) {
  if (cmd == Command::Evolve) return file_name(cfg, "_trajectory.csv");
  char buf[32];
  std::snprintf(buf, sizeof buf, "_trajectory_%03zu.csv", index);
  return file_name(cfg, buf);
}

std::string optional_cell(const std::optional<double>& x) { return x ? format_cell(*x) : ""; }

void write_gnuplot(std::ostream& os, const RunConfig& cfg, const std::vector<std::string>& files,
                   const std::vector<SweepPoint>& points) {
  const bool g0 = cfg.time_units == TimeUnits::Gamma0;
  os << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set xlabel '" << (g0 ? "Gamma_0 t" : "t") << "'\n"
     << "set ylabel 'concurrence'\n"
     << "plot \\\n";
  for (std::size_t i = 0; i < files.size(); ++i) {
    const std::string name = std::filesystem::path(files[i]).filename().string();
    os << "  '" << name << "' using 1:10 with lines title 'r=" << format_cell(points[i].r)
       << " p=" << format_cell(points[i].p) << "'";
    if (cfg.compare_markov) {
      os << ", \\\n  '" << name << "' using 1:11 with lines dashtype 2 title 'Markov r="
         << format_cell(points[i].r) << "'";
    }
    os << (i + 1 < files.size() ? ", \\\n" : "\n");
  }
}

void print_rates(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<double> rs = cfg.sweep_r ? *cfg.sweep_r : std::vector<double>{cfg.physics.r};
  if (cfg.physics.weak_coupling_violated()) {
    err << "warning: lambda_sq = " << format_cell(cfg.physics.lambda_sq)
        << " exceeds 0.1; the weak-coupling expansion is unreliable\n";
  }
  out << "# gamma0 = " << format_cell(gamma0(cfg.physics)) << "\n";
  out << "r,gamma0,gamma_r,gamma_r_over_gamma0,sigma,sigma_over_gamma0\n";
  const double t_abs = cfg.t_max_absolute();
  for (double r : rs) {
    SystemConfig sys = cfg.physics;
    sys.r = r;
    const RateSet rates = compute_rates(sys);
    out << format_cell(r) << ',' << format_cell(rates.gamma0) << ',' << format_cell(rates.gamma_r)
        << ',' << format_cell(rates.gamma_r / rates.gamma0) << ',' << format_cell(rates.sigma) << ','
        << format_cell(rates.sigma / rates.gamma0) << '\n';
    if (!rates.valid_r_flag) {
      err << "warning: r = " << format_cell(r) << ": |gamma_r| exceeded gamma0 numerically\n";
    }
    if (r < 10.0 * sys.cutoff_eps) {
      err << "warning: r = " << format_cell(r) << " is within 10 cutoff lengths (cutoff_eps = "
          << format_cell(sys.cutoff_eps) << "); sigma depends on the cutoff\n";
    }
    if (r >= 0.1 * t_abs) {
      err << "warning: r = " << format_cell(r) << " is not small against t_max = "
          << format_cell(t_abs) << " (absolute); the rotating-wave treatment needs r << t\n";
    }
  }
}

}  // namespace

std::string format_cell(double x) {
  if (x == 0.0) return "0";  // folds -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

std::vector<SweepPoint> sweep_points(const RunConfig& cfg) {
  const std::vector<double> rs = cfg.sweep_r ? *cfg.sweep_r : std::vector<double>{cfg.physics.r};
  const std::vector<double> ps = cfg.sweep_p ? *cfg.sweep_p : std::vector<double>{cfg.p};
  std::vector<SweepPoint> out;
  for (double r : rs) {
    for (double p : ps) out.push_back({r, p});
  }
  return out;
}

PointResult run_point(const RunConfig& cfg, const SweepPoint& point, unsigned jobs) {
  PointResult res;
  res.point = point;
  const SystemConfig sys = physics_at(cfg, point);
  try {
    res.rates = compute_rates(sys);
  } catch (const std::exception& e) {
    res.failure = std::string("rates: ") + e.what();
    return res;
  }
  const std::vector<double> grid = cfg.time_grid();
  const SimulationRequest req = request_for(cfg, point, jobs);

  for (std::size_t start = 0; start < grid.size(); start += kBlock) {
    const std::size_t len = std::min(kBlock, grid.size() - start);
    const std::span<const double> block(grid.data() + start, len);
    try {
      append(res.trajectory, simulate(sys, res.rates, req, block));
      continue;
    } catch (const std::exception&) {
      // Fall through and locate the first failing time.
    }
    SimulationRequest one = req;
    one.jobs = 1;
    for (std::size_t i = 0; i < len; ++i) {
      try {
        append(res.trajectory, simulate(sys, res.rates, one, block.subspan(i, 1)));
      } catch (const std::exception& e) {
        std::ostringstream os;
        os << "t = " << format_cell(block[i] * cfg.output_time_scale()) << ": " << e.what();
        res.failure = os.str();
        return res;
      }
    }
  }
  return res;
}

SummaryRow summarise(const RunConfig& cfg, const PointResult& res, bool markov) {
  SummaryRow row;
  row.r = res.point.r;
  row.p = res.point.p;
  const Trajectory& traj = res.trajectory;
  if (traj.size() == 0) {
    row.min_concurrence = std::nan("");
    row.final_vacuum_pop = std::nan("");
    return row;
  }

  const SystemConfig sys = physics_at(cfg, res.point);
  const SimulationRequest req = request_for(cfg, res.point, 1);
  const RateSet rates = res.rates;
  WitnessFn refine = [&](double t) {
    if (markov) return x_witness(markov_class_a_state(req.p, rates, sys.omega0, t));
    const double ts[] = {t};
    return simulate(sys, rates, req, ts).observables.front().witness;
  };
  ScanOptions opt;
  opt.time_tol = 1e-7 / rates.gamma0;

  DeathRevivalEvents ev;
  try {
    ev = scan_events(traj, refine, opt, markov);
  } catch (const std::exception&) {
    ev = scan_events(traj, {}, opt, markov);
  }
  const double scale = cfg.output_time_scale();
  if (!ev.death_times.empty()) {
    row.death_t1 = ev.death_times.front() * scale;
    for (double t : ev.revival_times) {
      if (t > ev.death_times.front()) {
        row.revival_t1 = t * scale;
        break;
      }
    }
  }

  double cmin = std::numeric_limits<double>::infinity();
  for (const auto& obs : traj.observables) {
    cmin = std::min(cmin, markov ? obs.concurrence_markov.value_or(0.0) : obs.concurrence);
  }
  row.min_concurrence = cmin;
  if (markov) {
    row.final_vacuum_pop =
        markov_class_a_state(res.point.p, rates, sys.omega0, traj.times.back())(0, 0).real();
  } else {
    row.final_vacuum_pop = traj.states.back()(0, 0).real();
  }
  return row;
}

void write_trajectory_csv(std::ostream& os, const RunConfig& cfg, const PointResult& res) {
  const double scale = cfg.output_time_scale();
  const Trajectory& traj = res.trajectory;
  os << kTrajectoryHeader << '\n';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const TwoQubitState& s = traj.states[i];
    const Observables& o = traj.observables[i];
    const auto io = s(basis::k11, basis::k00);
    const auto x = s(basis::k01, basis::k10);
    os << format_cell(traj.times[i] * scale) << ',' << format_cell(s(0, 0).real()) << ','
       << format_cell(s(1, 1).real()) << ',' << format_cell(s(2, 2).real()) << ','
       << format_cell(s(3, 3).real()) << ',' << format_cell(io.real()) << ','
       << format_cell(io.imag()) << ',' << format_cell(x.real()) << ',' << format_cell(x.imag())
       << ',' << format_cell(o.concurrence) << ',' << optional_cell(o.concurrence_markov) << ','
       << format_cell(o.purity) << ',' << format_cell(o.min_eigenvalue) << '\n';
  }
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << kSummaryHeader << '\n';
  for (const auto& row : rows) {
    os << format_cell(row.r) << ',' << format_cell(row.p) << ',' << optional_cell(row.death_t1)
       << ',' << optional_cell(row.revival_t1) << ',' << format_cell(row.min_concurrence) << ','
       << format_cell(row.final_vacuum_pop) << '\n';
  }
}

int execute(Command cmd, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cmd == Command::Rates) {
    print_rates(cfg, out, err);
    return 0;
  }

  const std::vector<SweepPoint> points =
      cmd == Command::Evolve ? std::vector<SweepPoint>{{cfg.physics.r, cfg.p}} : sweep_points(cfg);

  // One worker per sweep point when there are several; otherwise the workers
  // share the time grid of the single point.
  std::vector<PointResult> results(points.size());
  const unsigned workers = std::min<unsigned>(cfg.jobs, static_cast<unsigned>(points.size()));
  if (points.size() == 1 || workers <= 1) {
    const unsigned inner = points.size() == 1 ? cfg.jobs : 1;
    for (std::size_t i = 0; i < points.size(); ++i) results[i] = run_point(cfg, points[i], inner);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < points.size(); i += workers) results[i] = run_point(cfg, points[i], 1);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<SummaryRow> rows;
  std::vector<SummaryRow> markov_rows;
  std::vector<std::string> files;
  std::vector<std::string> failures;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const PointResult& res = results[i];
    files.push_back(trajectory_name(cfg, cmd, i));
    auto os = open_output(files.back());
    write_trajectory_csv(os, cfg, res);
    rows.push_back(summarise(cfg, res, false));
    if (cfg.compare_markov) markov_rows.push_back(summarise(cfg, res, true));
    if (res.failure) {
      failures.push_back("r = " + format_cell(res.point.r) + ", p = " + format_cell(res.point.p) +
                         ": " + *res.failure);
    }
  }
  {
    auto os = open_output(file_name(cfg, "_summary.csv"));
    write_summary_csv(os, rows);
  }
  if (cfg.compare_markov) {
    auto os = open_output(file_name(cfg, "_markov_summary.csv"));
    write_summary_csv(os, markov_rows);
  }
  {
    auto os = open_output(file_name(cfg, "_meta.txt"));
    os << cfg.to_text();
  }
  if (cfg.gnuplot) {
    auto os = open_output(file_name(cfg, ".gp"));
    write_gnuplot(os, cfg, files, points);
  }

  const std::string marker = file_name(cfg, ".INCOMPLETE");
  std::filesystem::remove(marker);

  const char* unit = cfg.time_units == TimeUnits::Gamma0 ? " (Gamma0 t)" : "";
  auto describe = [&](const SummaryRow& row) {
    std::string s = row.death_t1 ? "death at " + format_cell(*row.death_t1) + unit : "no death";
    if (row.revival_t1) s += ", revival at " + format_cell(*row.revival_t1) + unit;
    else if (row.death_t1) s += ", no revival";
    return s;
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << "r = " << format_cell(rows[i].r) << ", p = " << format_cell(rows[i].p) << ": "
        << describe(rows[i]) << "; min concurrence " << format_cell(rows[i].min_concurrence);
    if (cfg.compare_markov) out << " | Markov: " << describe(markov_rows[i]);
    out << '\n';
  }

  if (!failures.empty()) {
    auto os = open_output(marker);
    for (const auto& f : failures) {
      os << f << '\n';
      err << "numerical failure: " << f << '\n';
    }
    err << "outputs are partial; see " << marker << '\n';
    return 3;
  }
  return 0;
}

}  // namespace qpd::cli
