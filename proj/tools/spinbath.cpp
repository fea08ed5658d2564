// Command-line driver: one subcommand per experiment family.
//   run       normalized off-diagonal content Lambda(t) for one instance
//   local     decoherence factor log10 |r(t)| for one instance
//   ensemble  run over a list of derived seeds, with summary statistics
//   scaling   one run per bath size from a comma-separated list
//   verify    product engine vs brute-force reference checks
//
// Exit status: 0 success, 1 runtime or verification failure, 2 usage error.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spinbath/cli_io.hpp"
#include "spinbath/errors.hpp"
#include "spinbath/experiments.hpp"

namespace {

using namespace spinbath;

struct Options {
  std::string config_path;
  std::string out_path;
  std::string manifest_path;
  std::size_t n = 100;
  std::string scenario = "a";
  std::uint64_t seed = 0;
  double t_max = 100.0;
  std::size_t steps = 1000;
  int branch = 0;
  double burn_in = 0.1;
  int threads = 0;
  std::size_t runs = 20;
  std::string n_list = "100,1000,10000";
  std::size_t max_n = 8;
  std::size_t trials = 20;
  double tol = 1e-9;
};

// CLI flags override config-file values, which override defaults.
class Resolver {
public:
  Resolver(CLI::App* cmd, const Options& opts, const char* subcommand,
           const std::set<std::string>& allowed_keys)
      : cmd_(cmd) {
    if (!opts.config_path.empty()) {
      file_ = ConfigFile(opts.config_path, allowed_keys);
      if (file_.has("subcommand") && file_.get("subcommand") != subcommand)
        throw UsageError("config file was written for subcommand '" +
                         file_.get("subcommand") + "', not '" + subcommand +
                         "'");
    }
  }

  template <class T, class Parse>
  T value(const std::string& flag, const std::string& key, T cli_value,
          Parse parse) const {
    if (cmd_->count(flag) > 0) return cli_value;
    if (file_.has(key)) return parse(key, file_.get(key));
    return cli_value;
  }

  std::size_t size(const std::string& flag, const std::string& key,
                   std::size_t v) const {
    return value(flag, key, v, parse_size);
  }
  int integer(const std::string& flag, const std::string& key, int v) const {
    return value(flag, key, v, [](const std::string& k, const std::string& s) {
      return static_cast<int>(parse_i64(k, s));
    });
  }
  std::uint64_t u64(const std::string& flag, const std::string& key,
                    std::uint64_t v) const {
    return value(flag, key, v, parse_u64);
  }
  double real(const std::string& flag, const std::string& key, double v) const {
    return value(flag, key, v, parse_double);
  }
  std::string text(const std::string& flag, const std::string& key,
                   const std::string& v) const {
    return value(flag, key, v,
                 [](const std::string&, const std::string& s) { return s; });
  }

private:
  CLI::App* cmd_;
  ConfigFile file_;
};

Branch branch_from_int(int value) {
  if (value == 0) return Branch::Diag0;
  if (value == 1) return Branch::OffDiag1;
  throw UsageError("branch: expected 0 or 1");
}

std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::string item;
  std::stringstream stream(text);
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) out.push_back(parse_size("n-list", item));
  }
  if (out.empty()) throw UsageError("n-list: expected comma-separated sizes");
  return out;
}

std::string default_manifest_path(const std::string& out_path) {
  return out_path + ".manifest";
}

void add_common_flags(CLI::App* cmd, Options& o, bool with_out = true) {
  cmd->add_option("--config", o.config_path,
                  "flat key = value file; command-line flags take precedence");
  cmd->add_option("--threads", o.threads,
                  "worker threads (0 = hardware); results do not depend on it")
      ->capture_default_str();
  if (with_out) {
    cmd->add_option("--out", o.out_path, "output CSV path");
    cmd->add_option("--manifest", o.manifest_path,
                    "manifest path (default: <out>.manifest)");
  }
}

void add_grid_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--n", o.n, "bath size N")->capture_default_str();
  cmd->add_option("--seed", o.seed, "master seed")->capture_default_str();
  cmd->add_option("--t-max", o.t_max, "end of the time grid")
      ->capture_default_str();
  cmd->add_option("--steps", o.steps, "number of grid steps (points = steps + 1)")
      ->capture_default_str();
  cmd->add_option("--burn-in", o.burn_in,
                  "fraction of the grid discarded before summary statistics")
      ->capture_default_str();
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

void require_out_path(const std::string& out_path) {
  if (out_path.empty()) throw UsageError("out: an output CSV path is required");
}

int flag_int(bool b) { return b ? 1 : 0; }

// -------------------------------------------------------------------------

int cmd_run(CLI::App* cmd, Options& o) {
  const std::set<std::string> keys = {"n",      "scenario", "seed",   "t_max",
                                      "steps",  "branch",   "burn_in", "threads",
                                      "out"};
  const Resolver r(cmd, o, "run", keys);
  RunConfig config;
  config.n = r.size("--n", "n", o.n);
  config.scenario = scenario_from_string(r.text("--scenario", "scenario", o.scenario));
  config.seed = r.u64("--seed", "seed", o.seed);
  config.grid = {0.0, r.real("--t-max", "t_max", o.t_max),
                 r.size("--steps", "steps", o.steps) + 1};
  config.branch = branch_from_int(r.integer("--branch", "branch", o.branch));
  config.burn_in_fraction = r.real("--burn-in", "burn_in", o.burn_in);
  const int threads = r.integer("--threads", "threads", o.threads);
  const std::string out_path = r.text("--out", "out", o.out_path);
  require_out_path(out_path);

  Timer timer;
  const RunResult result = run_single(config, threads);
  write_series_csv(out_path, "log10_abs_lambda", result.series);

  KeyValues manifest = {
      {"tool_version", kToolVersion},
      {"subcommand", "run"},
      {"n", std::to_string(config.n)},
      {"scenario", to_string(config.scenario)},
      {"seed", std::to_string(config.seed)},
      {"t_max", format_double(config.grid.t_end)},
      {"steps", std::to_string(config.grid.points - 1)},
      {"branch", to_string(config.branch)},
      {"burn_in", format_double(config.burn_in_fraction)},
      {"threads", std::to_string(threads)},
      {"out", out_path},
      {"wall_time_seconds", format_double(timer.seconds())},
      {"summary.baseline", format_double(result.baseline)},
      {"summary.amplitude", format_double(result.amplitude)},
      {"summary.decayed", std::to_string(flag_int(result.decayed))},
      {"summary.degenerate", std::to_string(flag_int(result.degenerate))},
  };
  write_kv_file(o.manifest_path.empty() ? default_manifest_path(out_path)
                                        : o.manifest_path,
                manifest);
  if (result.degenerate)
    std::cerr << "note: degenerate instance (no off-diagonal content); "
                 "empty series written\n";
  return 0;
}

int cmd_local(CLI::App* cmd, Options& o) {
  const std::set<std::string> keys = {"n",       "seed",    "t_max", "steps",
                                      "burn_in", "threads", "out"};
  const Resolver r(cmd, o, "local", keys);
  const std::size_t n = r.size("--n", "n", o.n);
  const std::uint64_t seed = r.u64("--seed", "seed", o.seed);
  const TimeGrid grid{0.0, r.real("--t-max", "t_max", o.t_max),
                      r.size("--steps", "steps", o.steps) + 1};
  const double burn_in = r.real("--burn-in", "burn_in", o.burn_in);
  const int threads = r.integer("--threads", "threads", o.threads);
  const std::string out_path = r.text("--out", "out", o.out_path);
  require_out_path(out_path);

  Timer timer;
  const Series series = local_decoherence_run(n, seed, grid, threads);
  const SeriesStats stats = summarize_series(series, burn_in);
  write_series_csv(out_path, "log10_abs_r", series);

  KeyValues manifest = {
      {"tool_version", kToolVersion},
      {"subcommand", "local"},
      {"n", std::to_string(n)},
      {"seed", std::to_string(seed)},
      {"t_max", format_double(grid.t_end)},
      {"steps", std::to_string(grid.points - 1)},
      {"burn_in", format_double(burn_in)},
      {"threads", std::to_string(threads)},
      {"out", out_path},
      {"wall_time_seconds", format_double(timer.seconds())},
      {"summary.baseline", format_double(stats.baseline)},
      {"summary.amplitude", format_double(stats.amplitude)},
  };
  write_kv_file(o.manifest_path.empty() ? default_manifest_path(out_path)
                                        : o.manifest_path,
                manifest);
  return 0;
}

int cmd_ensemble(CLI::App* cmd, Options& o) {
  const std::set<std::string> keys = {"n",      "scenario", "seed",
                                      "t_max",  "steps",    "branch",
                                      "burn_in", "threads",  "runs",
                                      "out"};
  const Resolver r(cmd, o, "ensemble", keys);
  RunConfig base;
  base.n = r.size("--n", "n", o.n);
  base.scenario = scenario_from_string(r.text("--scenario", "scenario", o.scenario));
  base.grid = {0.0, r.real("--t-max", "t_max", o.t_max),
               r.size("--steps", "steps", o.steps) + 1};
  base.branch = branch_from_int(r.integer("--branch", "branch", o.branch));
  base.burn_in_fraction = r.real("--burn-in", "burn_in", o.burn_in);
  const std::uint64_t master = r.u64("--seed", "seed", o.seed);
  const std::size_t runs = r.size("--runs", "runs", o.runs);
  const int threads = r.integer("--threads", "threads", o.threads);
  const std::string out_path = r.text("--out", "out", o.out_path);
  require_out_path(out_path);
  if (runs == 0) throw UsageError("runs: must be >= 1");

  // Member seeds are master, master + 1, ...
  std::vector<std::uint64_t> seeds(runs);
  for (std::size_t i = 0; i < runs; ++i) seeds[i] = master + i;

  Timer timer;
  std::ostringstream rows;
  rows << "seed,baseline,amplitude,decayed,degenerate\n";
  const EnsembleSummary summary = run_ensemble(
      base, seeds, threads, [&](std::uint64_t seed, const RunResult& run) {
        rows << seed << "," << format_double(run.baseline) << ","
             << format_double(run.amplitude) << "," << flag_int(run.decayed)
             << "," << flag_int(run.degenerate) << "\n";
      });
  {
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write '" + out_path + "'");
    out << rows.str();
    out.flush();
    if (!out) throw IoError("write failed for '" + out_path + "'");
  }

  KeyValues manifest = {
      {"tool_version", kToolVersion},
      {"subcommand", "ensemble"},
      {"n", std::to_string(base.n)},
      {"scenario", to_string(base.scenario)},
      {"seed", std::to_string(master)},
      {"runs", std::to_string(runs)},
      {"t_max", format_double(base.grid.t_end)},
      {"steps", std::to_string(base.grid.points - 1)},
      {"branch", to_string(base.branch)},
      {"burn_in", format_double(base.burn_in_fraction)},
      {"threads", std::to_string(threads)},
      {"out", out_path},
      {"wall_time_seconds", format_double(timer.seconds())},
      {"summary.decay_fraction", format_double(summary.decay_fraction)},
      {"summary.degenerate_count", std::to_string(summary.degenerate_count)},
      {"summary.median_baseline",
       format_double(percentile(summary.baselines, 0.5))},
  };
  write_kv_file(o.manifest_path.empty() ? default_manifest_path(out_path)
                                        : o.manifest_path,
                manifest);
  return 0;
}

int cmd_scaling(CLI::App* cmd, Options& o) {
  const std::set<std::string> keys = {"n_list", "scenario", "seed",
                                      "t_max",  "steps",    "branch",
                                      "burn_in", "threads",  "out"};
  const Resolver r(cmd, o, "scaling", keys);
  const std::vector<std::size_t> sizes =
      parse_n_list(r.text("--n-list", "n_list", o.n_list));
  const Scenario scenario =
      scenario_from_string(r.text("--scenario", "scenario", o.scenario));
  const std::uint64_t seed = r.u64("--seed", "seed", o.seed);
  const TimeGrid grid{0.0, r.real("--t-max", "t_max", o.t_max),
                      r.size("--steps", "steps", o.steps) + 1};
  const Branch branch =
      branch_from_int(r.integer("--branch", "branch", o.branch));
  const double burn_in = r.real("--burn-in", "burn_in", o.burn_in);
  const int threads = r.integer("--threads", "threads", o.threads);
  const std::string out_path = r.text("--out", "out", o.out_path);
  require_out_path(out_path);

  Timer timer;
  const auto results =
      scaling_study(sizes, scenario, seed, grid, branch, burn_in, threads);
  {
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write '" + out_path + "'");
    out << "n,baseline,amplitude,decayed,degenerate\n";
    for (const auto& [n, run] : results)
      out << n << "," << format_double(run.baseline) << ","
          << format_double(run.amplitude) << "," << flag_int(run.decayed) << ","
          << flag_int(run.degenerate) << "\n";
    out.flush();
    if (!out) throw IoError("write failed for '" + out_path + "'");
  }

  std::string n_list_text;
  for (std::size_t i = 0; i < sizes.size(); ++i)
    n_list_text += (i ? "," : "") + std::to_string(sizes[i]);
  KeyValues manifest = {
      {"tool_version", kToolVersion},
      {"subcommand", "scaling"},
      {"n_list", n_list_text},
      {"scenario", to_string(scenario)},
      {"seed", std::to_string(seed)},
      {"t_max", format_double(grid.t_end)},
      {"steps", std::to_string(grid.points - 1)},
      {"branch", to_string(branch)},
      {"burn_in", format_double(burn_in)},
      {"threads", std::to_string(threads)},
      {"out", out_path},
      {"wall_time_seconds", format_double(timer.seconds())},
  };
  write_kv_file(o.manifest_path.empty() ? default_manifest_path(out_path)
                                        : o.manifest_path,
                manifest);
  return 0;
}

int cmd_verify(CLI::App* cmd, Options& o) {
  const std::set<std::string> keys = {"max_n", "trials", "tol"};
  const Resolver r(cmd, o, "verify", keys);
  const std::size_t max_n = r.size("--max-n", "max_n", o.max_n);
  const std::size_t trials = r.size("--trials", "trials", o.trials);
  const double tol = r.real("--tol", "tol", o.tol);

  Timer timer;
  const VerifyReport report = run_verification(max_n, trials, tol);
  print_report(std::cout, report);

  if (!o.manifest_path.empty()) {
    KeyValues manifest = {
        {"tool_version", kToolVersion},
        {"subcommand", "verify"},
        {"max_n", std::to_string(max_n)},
        {"trials", std::to_string(trials)},
        {"tol", format_double(tol)},
        {"wall_time_seconds", format_double(timer.seconds())},
    };
    for (const VerifyCheck& check : report.checks)
      manifest.emplace_back("summary.worst." + check.name,
                            format_double(check.worst));
    write_kv_file(o.manifest_path, manifest);
  }
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-bath dephasing simulator"};
  app.require_subcommand(1);
  Options o;

  CLI::App* run = app.add_subcommand(
      "run", "normalized off-diagonal content Lambda(t) for one instance");
  add_grid_flags(run, o);
  run->add_option("--scenario", o.scenario, "sampling scenario: a|b|c|restricted-obs")
      ->capture_default_str();
  run->add_option("--branch", o.branch, "branch product: 0 (diagonal) or 1")
      ->capture_default_str();
  add_common_flags(run, o);

  CLI::App* local = app.add_subcommand(
      "local", "decoherence factor log10 |r(t)| for one instance");
  add_grid_flags(local, o);
  add_common_flags(local, o);

  CLI::App* ensemble =
      app.add_subcommand("ensemble", "independent runs over derived seeds");
  add_grid_flags(ensemble, o);
  ensemble->add_option("--scenario", o.scenario,
                       "sampling scenario: a|b|c|restricted-obs")
      ->capture_default_str();
  ensemble->add_option("--branch", o.branch, "branch product: 0 (diagonal) or 1")
      ->capture_default_str();
  ensemble->add_option("--runs", o.runs, "number of ensemble members")
      ->capture_default_str();
  add_common_flags(ensemble, o);

  CLI::App* scaling =
      app.add_subcommand("scaling", "one run per bath size in --n-list");
  add_grid_flags(scaling, o);
  scaling->add_option("--n-list", o.n_list, "comma-separated bath sizes")
      ->capture_default_str();
  scaling->add_option("--scenario", o.scenario,
                      "sampling scenario: a|b|c|restricted-obs")
      ->capture_default_str();
  scaling->add_option("--branch", o.branch, "branch product: 0 (diagonal) or 1")
      ->capture_default_str();
  add_common_flags(scaling, o);

  CLI::App* verify =
      app.add_subcommand("verify", "engine vs brute-force reference checks");
  verify->add_option("--max-n", o.max_n, "largest bath size to check (<= 12)")
      ->capture_default_str();
  verify->add_option("--trials", o.trials, "instances per bath size")
      ->capture_default_str();
  verify->add_option("--tol", o.tol, "relative tolerance for equivalence checks")
      ->capture_default_str();
  verify->add_option("--manifest", o.manifest_path, "optional manifest path");
  verify->add_option("--config", o.config_path,
                     "flat key = value file; command-line flags take precedence");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(run, o);
    if (local->parsed()) return cmd_local(local, o);
    if (ensemble->parsed()) return cmd_ensemble(ensemble, o);
    if (scaling->parsed()) return cmd_scaling(scaling, o);
    if (verify->parsed()) return cmd_verify(verify, o);
  } catch (const spinbath::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
