#include "spinbath/cli_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "spinbath/errors.hpp"
#include "spinbath/model.hpp"
#include "spinbath/oracle.hpp"
#include "spinbath/rng.hpp"

namespace spinbath {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

bool is_manifest_only_key(const std::string& key) {
  return key == "tool_version" || key == "subcommand" ||
         key == "wall_time_seconds" || key.rfind("summary.", 0) == 0;
}

}  // namespace

KeyValues read_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path + "'");
  KeyValues out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(line_no) +
                       ": expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty())
      throw UsageError(path + ":" + std::to_string(line_no) + ": empty key");
    out.emplace_back(key, value);
  }
  return out;
}

void write_kv_file(const std::string& path, const KeyValues& entries) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (const auto& [key, value] : entries) out << key << " = " << value << "\n";
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_series_csv(const std::string& path, const std::string& value_column,
                      const Series& series) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "t," << value_column << "\n";
  for (const SeriesPoint& point : series)
    out << format_double(point.t) << "," << format_double(point.value) << "\n";
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

ConfigFile::ConfigFile(const std::string& path,
                       const std::set<std::string>& allowed_keys) {
  for (auto& [key, value] : read_kv_file(path)) {
    if (allowed_keys.count(key)) {
      entries_.emplace_back(key, value);
    } else if (!is_manifest_only_key(key)) {
      throw UsageError("unknown configuration key '" + key + "' in " + path);
    }
  }
}

bool ConfigFile::has(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return true;
  return false;
}

std::string ConfigFile::get(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  throw UsageError("missing configuration key '" + key + "'");
}

std::uint64_t ConfigFile::get_u64(const std::string& key) const {
  return parse_u64(key, get(key));
}

std::size_t ConfigFile::get_size(const std::string& key) const {
  return parse_size(key, get(key));
}

double ConfigFile::get_double(const std::string& key) const {
  return parse_double(key, get(key));
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used, 0);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError(key + ": expected an unsigned integer, got '" + text + "'");
  }
}

std::int64_t parse_i64(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used, 0);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError(key + ": expected an integer, got '" + text + "'");
  }
}

std::size_t parse_size(const std::string& key, const std::string& text) {
  return static_cast<std::size_t>(parse_u64(key, text));
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError(key + ": expected a number, got '" + text + "'");
  }
}

namespace {

struct WorstTracker {
  double worst = 0.0;
  std::uint64_t seed = 0;

  void update(double err, std::uint64_t instance_seed) {
    if (err > worst) {
      worst = err;
      seed = instance_seed;
    }
  }
};

struct Instance {
  CouplingSet couplings;
  BathState bath;
  ProductObservable obs;
  SystemAmplitudes sys;
};

Instance sample_instance(std::size_t n, std::uint64_t seed) {
  Instance inst;
  RandomStream coupling_rng(seed, 0);
  RandomStream bath_rng(seed, 1);
  RandomStream obs_rng(seed, 2);
  RandomStream sys_rng(seed, 3);
  inst.couplings = sample_couplings(n, coupling_rng);
  inst.bath = sample_bath(n, Scenario::A, bath_rng);
  inst.obs = sample_observable(n, Scenario::A, obs_rng);
  const double p = sys_rng.next_double();
  inst.sys.a = std::polar(std::sqrt(p), sys_rng.uniform(0.0, 6.283185307179586));
  inst.sys.b =
      std::polar(std::sqrt(1.0 - p), sys_rng.uniform(0.0, 6.283185307179586));
  return inst;
}

std::uint64_t instance_seed(std::size_t n, std::size_t trial) {
  return (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(trial);
}

}  // namespace

VerifyReport run_verification(std::size_t max_n, std::size_t trials,
                              double tolerance) {
  if (trials == 0) throw UsageError("trials: must be >= 1");
  if (max_n == 0 || max_n > oracle::kMaxTermBathSize)
    throw UsageError("max-n: must lie in [1, " +
                     std::to_string(oracle::kMaxTermBathSize) + "]");

  WorstTracker gamma_err;
  WorstTracker r_err;
  WorstTracker sv_err;
  WorstTracker avg_err;

  for (std::size_t n = 1; n <= max_n; ++n) {
    for (std::size_t trial = 0; trial < trials; ++trial) {
      const std::uint64_t seed = instance_seed(n, trial);
      const Instance inst = sample_instance(n, seed);
      RandomStream time_rng(seed, 4);

      const oracle::TermList terms0 =
          oracle::enumerate_terms(inst.bath, inst.obs, inst.couplings,
                                  Branch::Diag0);
      const oracle::TermList terms1 =
          oracle::enumerate_terms(inst.bath, inst.obs, inst.couplings,
                                  Branch::OffDiag1);
      for (int k = 0; k < 10; ++k) {
        const double t = time_rng.uniform(0.0, 100.0);
        for (const auto* terms : {&terms0, &terms1}) {
          const Complex by_sum = oracle::gamma_by_sum(*terms, t);
          const Complex by_product = sc_to(
              gamma(inst.bath, inst.obs, inst.couplings, t, terms->branch));
          gamma_err.update(std::abs(by_product - by_sum) /
                               std::fmax(1.0, std::abs(by_sum)),
                           seed);
        }
        const Complex r_sum = oracle::r_by_sum(inst.bath, inst.couplings, t);
        const Complex r_prod = decoherence_factor(inst.bath, inst.couplings, t);
        r_err.update(std::abs(r_prod - r_sum) / std::fmax(1.0, std::abs(r_sum)),
                     seed);
      }
      for (int k = 0; k < 5; ++k) {
        const double t = time_rng.uniform(0.0, 100.0);
        const double direct = oracle::statevector_expectation(
            inst.sys, inst.bath, inst.obs, inst.couplings, t);
        const double assembled =
            expectation(inst.sys, inst.bath, inst.obs, inst.couplings, t);
        sv_err.update(std::fabs(assembled - direct) /
                          std::fmax(1.0, std::fabs(direct)),
                      seed);
      }
    }
  }

  // Long-time average vs the diagonal part, at a size where the grid can
  // resolve every nonzero energy gap comfortably.
  const std::size_t n_avg = std::min<std::size_t>(max_n, 8);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::uint64_t seed = instance_seed(n_avg, trial) ^ 0xAEAEull;
    const Instance inst = sample_instance(n_avg, seed);
    const std::size_t points = 100000;
    const TimeGrid grid{0.0, 1e4, points};
    Complex mean{0.0, 0.0};
    for (std::size_t k = 0; k < points; ++k)
      mean += sc_to(
          gamma(inst.bath, inst.obs, inst.couplings, grid.at(k), Branch::Diag0));
    mean /= static_cast<double>(points);
    const Complex diag = sc_to(gamma_diag(inst.bath, inst.obs, Branch::Diag0));
    const Complex at0 =
        sc_to(gamma(inst.bath, inst.obs, inst.couplings, 0.0, Branch::Diag0));
    avg_err.update(std::abs(mean - diag) / std::fmax(1e-30, std::abs(at0)),
                   seed);
  }

  VerifyReport report;
  report.checks = {
      {"gamma-vs-term-sum", gamma_err.worst, tolerance, gamma_err.seed,
       gamma_err.worst <= tolerance},
      {"r-vs-configuration-sum", r_err.worst, tolerance, r_err.seed,
       r_err.worst <= tolerance},
      {"expectation-vs-statevector", sv_err.worst, tolerance, sv_err.seed,
       sv_err.worst <= tolerance},
      {"time-average-vs-diagonal", avg_err.worst, 0.05, avg_err.seed,
       avg_err.worst <= 0.05},
  };
  report.pass = true;
  for (const VerifyCheck& check : report.checks) report.pass &= check.pass;
  return report;
}

void print_report(std::ostream& out, const VerifyReport& report) {
  for (const VerifyCheck& check : report.checks) {
    char line[160];
    std::snprintf(line, sizeof line, "check %-28s worst %.3e  tol %.1e  %s",
                  check.name.c_str(), check.worst, check.tolerance,
                  check.pass ? "PASS" : "FAIL");
    out << line;
    if (!check.pass) out << "  (seed 0x" << std::hex << check.worst_seed << std::dec << ")";
    out << "\n";
  }
  out << (report.pass ? "verification passed" : "verification FAILED") << "\n";
}

}  // namespace spinbath
