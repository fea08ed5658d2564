#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "spinbath/evolution.hpp"
#include "spinbath/model.hpp"

namespace spinbath {

/// Everything a single normalized off-diagonal run needs. The seed fully
/// determines couplings, bath state, and observable through fixed stream
/// indices (0, 1, 2), so a config reproduces its run bit for bit.
struct RunConfig {
  std::size_t n = 100;
  Scenario scenario = Scenario::A;
  std::uint64_t seed = 0;
  TimeGrid grid{0.0, 100.0, 1001};
  Branch branch = Branch::Diag0;
  double burn_in_fraction = 0.1;
};

void validate(const RunConfig& config);

/// A run is classified as decayed when its post-burn-in baseline sits
/// below this many decades.
inline constexpr double kDecayThreshold = -1.0;

struct RunResult {
  Series series;            // empty when degenerate
  double baseline = 0.0;    // median of post-burn-in values
  double amplitude = 0.0;   // 95th minus 5th percentile of the same
  bool decayed = false;
  bool degenerate = false;
};

struct EnsembleSummary {
  std::vector<double> baselines;  // non-degenerate runs, in seed order
  double decay_fraction = 0.0;    // decayed / non-degenerate (0 if none)
  std::size_t degenerate_count = 0;
};

/// Index of the first grid point kept after burn-in:
/// ceil(fraction * (points - 1)).
std::size_t burn_in_start(std::size_t points, double fraction);

/// q-th percentile with linear interpolation (q in [0, 1]); the input
/// need not be sorted.
double percentile(std::vector<double> values, double q);

struct SeriesStats {
  double baseline = 0.0;
  double amplitude = 0.0;
};

SeriesStats summarize_series(const Series& series, double burn_in_fraction);

/// Medians of the first and second halves of the post-burn-in values,
/// for stationarity inspection.
std::pair<double, double> baseline_halves(const Series& series,
                                          double burn_in_fraction);

/// Samples an instance from the config's seed and normalizes the
/// off-diagonal content over the grid. A degenerate instance (nothing to
/// normalize against) is flagged, not fatal.
RunResult run_single(const RunConfig& config, int threads = 0);

/// Same as run_single but with the instance supplied by the caller.
RunResult run_prepared(const RunConfig& config, const BathState& bath,
                       const ProductObservable& obs,
                       const CouplingSet& couplings, int threads = 0);

/// Independent run_single per seed; deterministic given the seed list.
/// on_run, when set, observes every run (including degenerate ones) in
/// seed order.
EnsembleSummary run_ensemble(
    const RunConfig& base, const std::vector<std::uint64_t>& seeds,
    int threads = 0,
    const std::function<void(std::uint64_t, const RunResult&)>& on_run = {});

/// One run per bath size with sub-seeds derived from (seed, index), so
/// the per-size instances are independent but reproducible.
std::vector<std::pair<std::size_t, RunResult>> scaling_study(
    const std::vector<std::size_t>& sizes, Scenario scenario,
    std::uint64_t seed, const TimeGrid& grid, Branch branch = Branch::Diag0,
    double burn_in_fraction = 0.1, int threads = 0);

/// log10 |r(t)| over the grid (normalized by the t = 0 value, which is one
/// up to rounding). Couplings and bath are sampled from streams 0 and 1 of
/// the seed; bath phases do not enter r.
Series local_decoherence_run(std::size_t n, std::uint64_t seed,
                             const TimeGrid& grid, int threads = 0);

}  // namespace spinbath
