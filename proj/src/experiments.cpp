#include "spinbath/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinbath/errors.hpp"
#include "spinbath/rng.hpp"

namespace spinbath {

namespace {

// Stream indices of the per-run sampling stages.
constexpr std::uint64_t kCouplingStream = 0;
constexpr std::uint64_t kBathStream = 1;
constexpr std::uint64_t kObservableStream = 2;
// Stream offset used to derive scaling-study sub-seeds.
constexpr std::uint64_t kScalingSeedStream = 1000;

std::vector<double> post_burn_in_values(const Series& series, double fraction) {
  std::vector<double> kept;
  const std::size_t start = burn_in_start(series.size(), fraction);
  kept.reserve(series.size() - start);
  for (std::size_t k = start; k < series.size(); ++k)
    kept.push_back(series[k].value);
  return kept;
}

}  // namespace

void validate(const RunConfig& config) {
  if (config.n == 0) throw InvalidModel("bath size must be >= 1");
  validate(config.grid);
  if (!(config.burn_in_fraction > 0.0 && config.burn_in_fraction < 1.0))
    throw InvalidModel("burn-in fraction must lie in (0, 1)");
}

std::size_t burn_in_start(std::size_t points, double fraction) {
  const auto start = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(points - 1)));
  return std::min(start, points - 1);
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0 || lo + 1 >= values.size()) return values[lo];
  if (values[lo] == values[lo + 1]) return values[lo];
  return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

SeriesStats summarize_series(const Series& series, double burn_in_fraction) {
  const std::vector<double> kept = post_burn_in_values(series, burn_in_fraction);
  SeriesStats stats;
  stats.baseline = percentile(kept, 0.5);
  stats.amplitude = percentile(kept, 0.95) - percentile(kept, 0.05);
  return stats;
}

std::pair<double, double> baseline_halves(const Series& series,
                                          double burn_in_fraction) {
  const std::vector<double> kept = post_burn_in_values(series, burn_in_fraction);
  const std::size_t half = kept.size() / 2;
  std::vector<double> first(kept.begin(), kept.begin() + half);
  std::vector<double> second(kept.begin() + half, kept.end());
  return {percentile(std::move(first), 0.5), percentile(std::move(second), 0.5)};
}

RunResult run_prepared(const RunConfig& config, const BathState& bath,
                       const ProductObservable& obs,
                       const CouplingSet& couplings, int threads) {
  validate(config);
  RunResult result;
  try {
    result.series = lambda_series(bath, obs, couplings, config.grid,
                                  config.branch, threads);
  } catch (const NormalizationDegenerate&) {
    result.degenerate = true;
    result.baseline = std::numeric_limits<double>::quiet_NaN();
    result.amplitude = std::numeric_limits<double>::quiet_NaN();
    return result;
  }
  const SeriesStats stats = summarize_series(result.series,
                                             config.burn_in_fraction);
  result.baseline = stats.baseline;
  result.amplitude = stats.amplitude;
  result.decayed = result.baseline < kDecayThreshold;
  return result;
}

RunResult run_single(const RunConfig& config, int threads) {
  validate(config);
  RandomStream coupling_rng(config.seed, kCouplingStream);
  RandomStream bath_rng(config.seed, kBathStream);
  RandomStream obs_rng(config.seed, kObservableStream);
  const CouplingSet couplings = sample_couplings(config.n, coupling_rng);
  const BathState bath = sample_bath(config.n, config.scenario, bath_rng);
  const ProductObservable obs =
      sample_observable(config.n, config.scenario, obs_rng);
  return run_prepared(config, bath, obs, couplings, threads);
}

EnsembleSummary run_ensemble(
    const RunConfig& base, const std::vector<std::uint64_t>& seeds, int threads,
    const std::function<void(std::uint64_t, const RunResult&)>& on_run) {
  if (seeds.empty()) throw InvalidModel("ensemble needs at least one seed");
  EnsembleSummary summary;
  std::size_t decayed = 0;
  for (const std::uint64_t seed : seeds) {
    RunConfig config = base;
    config.seed = seed;
    const RunResult run = run_single(config, threads);
    if (on_run) on_run(seed, run);
    if (run.degenerate) {
      ++summary.degenerate_count;
      continue;
    }
    summary.baselines.push_back(run.baseline);
    if (run.decayed) ++decayed;
  }
  summary.decay_fraction =
      summary.baselines.empty()
          ? 0.0
          : static_cast<double>(decayed) /
                static_cast<double>(summary.baselines.size());
  return summary;
}

std::vector<std::pair<std::size_t, RunResult>> scaling_study(
    const std::vector<std::size_t>& sizes, Scenario scenario,
    std::uint64_t seed, const TimeGrid& grid, Branch branch,
    double burn_in_fraction, int threads) {
  std::vector<std::pair<std::size_t, RunResult>> out;
  out.reserve(sizes.size());
  for (std::size_t idx = 0; idx < sizes.size(); ++idx) {
    RunConfig config;
    config.n = sizes[idx];
    config.scenario = scenario;
    config.seed = RandomStream(seed, kScalingSeedStream + idx).next_u64();
    config.grid = grid;
    config.branch = branch;
    config.burn_in_fraction = burn_in_fraction;
    out.emplace_back(sizes[idx], run_single(config, threads));
  }
  return out;
}

Series local_decoherence_run(std::size_t n, std::uint64_t seed,
                             const TimeGrid& grid, int threads) {
  if (n == 0) throw InvalidModel("bath size must be >= 1");
  RandomStream coupling_rng(seed, kCouplingStream);
  RandomStream bath_rng(seed, kBathStream);
  const CouplingSet couplings = sample_couplings(n, coupling_rng);
  const BathState bath = sample_bath(n, Scenario::A, bath_rng);
  return log_abs_r_series(bath, couplings, grid, threads);
}

}  // namespace spinbath
