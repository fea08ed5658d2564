#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "spinbath/evolution.hpp"

namespace spinbath {

inline constexpr const char* kToolVersion = "0.1.0";

/// Ordered flat key = value document; used for config files and manifests.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses a flat key = value file ('#' starts a comment). Throws IoError
/// if the file cannot be read, UsageError on a malformed line.
KeyValues read_kv_file(const std::string& path);

void write_kv_file(const std::string& path, const KeyValues& entries);

/// Shortest decimal form that round-trips a double (17 significant digits).
std::string format_double(double value);

/// Header line "t,<value_column>" followed by one row per grid point,
/// ascending in t. Throws IoError with path context on write failure.
void write_series_csv(const std::string& path, const std::string& value_column,
                      const Series& series);

/// Config/manifest lookup with an allow-list. Keys that only a manifest
/// writes (tool_version, subcommand, wall_time_seconds, summary.*) are
/// accepted and ignored, so a manifest is directly reusable as a config
/// file; any other unknown key raises UsageError naming it.
class ConfigFile {
public:
  ConfigFile() = default;
  ConfigFile(const std::string& path, const std::set<std::string>& allowed_keys);

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;

  std::uint64_t get_u64(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  double get_double(const std::string& key) const;

private:
  KeyValues entries_;
};

std::uint64_t parse_u64(const std::string& key, const std::string& text);
std::int64_t parse_i64(const std::string& key, const std::string& text);
std::size_t parse_size(const std::string& key, const std::string& text);
double parse_double(const std::string& key, const std::string& text);

struct VerifyCheck {
  std::string name;
  double worst = 0.0;
  double tolerance = 0.0;
  std::uint64_t worst_seed = 0;
  bool pass = false;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool pass = false;
};

/// Cross-checks the product engine against the brute-force references:
/// branch products vs the term sum, r vs the configuration sum, the
/// assembled expectation value vs the state vector, and the long-time
/// average vs the diagonal part (fixed 5% criterion for the latter; the
/// supplied tolerance governs the three equivalence checks).
/// Requires 1 <= max_n <= 12 and trials >= 1 (UsageError otherwise).
VerifyReport run_verification(std::size_t max_n, std::size_t trials,
                              double tolerance);

void print_report(std::ostream& out, const VerifyReport& report);

}  // namespace spinbath
