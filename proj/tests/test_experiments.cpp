#include <doctest.h>

#include <cmath>

#include "spinbath/errors.hpp"
#include "spinbath/experiments.hpp"
#include "spinbath/model.hpp"
#include "spinbath/rng.hpp"

using namespace spinbath;

TEST_CASE("burn_in_start and percentile") {
  CHECK(burn_in_start(1001, 0.1) == 100);
  CHECK(burn_in_start(2, 0.1) == 1);   // single post-burn-in point
  CHECK(burn_in_start(2, 0.9) == 1);

  CHECK(percentile({3.0, 1.0, 2.0}, 0.5) == 2.0);
  CHECK(percentile({1.0, 2.0, 3.0, 4.0}, 0.5) == 2.5);
  CHECK(percentile({1.0, 2.0}, 0.0) == 1.0);
  CHECK(percentile({1.0, 2.0}, 1.0) == 2.0);
  CHECK(std::isnan(percentile({}, 0.5)));
}

TEST_CASE("run_single on scenario C decays for any seed") {
  for (std::uint64_t seed : {1ull, 77ull, 123456789ull}) {
    RunConfig config;
    config.n = 100;
    config.scenario = Scenario::C;
    config.seed = seed;
    config.grid = {0.0, 100.0, 1001};
    const RunResult run = run_single(config, 2);
    CHECK_FALSE(run.degenerate);
    CHECK(run.decayed);
    CHECK(run.baseline < -1.0);
    REQUIRE(run.series.size() == 1001);
    CHECK(run.series[0].value == 0.0);
  }
}

TEST_CASE("run_single works on a two-point grid") {
  RunConfig config;
  config.n = 10;
  config.scenario = Scenario::A;
  config.seed = 7;
  config.grid = {0.0, 1.0, 2};
  const RunResult run = run_single(config, 1);
  CHECK_FALSE(run.degenerate);
  REQUIRE(run.series.size() == 2);
  CHECK(run.baseline == run.series[1].value);
  CHECK(run.amplitude == 0.0);
}

TEST_CASE("scenario A leaves some runs undecayed") {
  RunConfig config;
  config.n = 100;
  config.scenario = Scenario::A;
  config.grid = {0.0, 100.0, 1001};
  int undecayed = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    config.seed = seed;
    const RunResult run = run_single(config, 2);
    if (!run.degenerate && !run.decayed) ++undecayed;
  }
  CHECK(undecayed >= 1);
}

TEST_CASE("run_prepared flags degenerate instances instead of failing") {
  RunConfig config;
  config.n = 20;
  config.seed = 5;
  config.grid = {0.0, 10.0, 11};
  RandomStream cr(5, 0);
  const CouplingSet couplings = sample_couplings(20, cr);
  RandomStream br(5, 1);
  const BathState bath = sample_bath(20, Scenario::A, br);
  RandomStream orr(5, 2);
  ProductObservable obs = sample_observable(20, Scenario::A, orr);
  for (auto& w : obs.eps_ud) w = Complex(0.0, 0.0);  // Diag0 product constant
  const RunResult run = run_prepared(config, bath, obs, couplings, 1);
  CHECK(run.degenerate);
  CHECK(run.series.empty());
  CHECK_FALSE(run.decayed);
  CHECK(std::isnan(run.baseline));
}

TEST_CASE("run_ensemble aggregates and stays deterministic") {
  RunConfig base;
  base.n = 100;
  base.scenario = Scenario::C;
  base.grid = {0.0, 100.0, 1001};
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);

  std::size_t observed = 0;
  const EnsembleSummary summary = run_ensemble(
      base, seeds, 2, [&](std::uint64_t, const RunResult&) { ++observed; });
  CHECK(observed == 20);
  CHECK(summary.degenerate_count == 0);
  REQUIRE(summary.baselines.size() == 20);
  CHECK(summary.decay_fraction >= 0.9);  // strong decay in scenario C

  const EnsembleSummary again = run_ensemble(base, seeds, 1);
  CHECK(again.baselines == summary.baselines);
  CHECK(again.decay_fraction == summary.decay_fraction);

  const EnsembleSummary single = run_ensemble(base, {seeds[3]}, 2);
  REQUIRE(single.baselines.size() == 1);
  CHECK(single.baselines[0] == summary.baselines[3]);

  CHECK_THROWS_AS(run_ensemble(base, {}, 1), InvalidModel);
}

TEST_CASE("restricted-observable ensembles rarely decay") {
  RunConfig base;
  base.n = 100;
  base.scenario = Scenario::RestrictedObservableOnly;
  base.grid = {0.0, 100.0, 1001};
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
  const EnsembleSummary summary = run_ensemble(base, seeds, 2);
  CHECK(summary.decay_fraction <= 0.5);
}

TEST_CASE("scaling_study reduces to run_single per entry") {
  const TimeGrid grid{0.0, 200.0, 401};
  const auto results = scaling_study({100}, Scenario::A, 99, grid,
                                     Branch::Diag0, 0.1, 2);
  REQUIRE(results.size() == 1);
  CHECK(results[0].first == 100);

  RunConfig config;
  config.n = 100;
  config.scenario = Scenario::A;
  config.seed = RandomStream(99, 1000).next_u64();
  config.grid = grid;
  const RunResult direct = run_single(config, 2);
  CHECK(direct.baseline == results[0].second.baseline);
  CHECK(direct.series.size() == results[0].second.series.size());
}

TEST_CASE("baseline_halves splits the post-burn-in points") {
  Series series;
  for (int k = 0; k <= 100; ++k)
    series.push_back({static_cast<double>(k), k < 55 ? -1.0 : -3.0});
  const auto [first, second] = baseline_halves(series, 0.1);
  CHECK(first == -1.0);
  CHECK(second == -3.0);
}

TEST_CASE("local_decoherence_run starts at zero and sits near the dephasing floor") {
  // The post-burn-in median tracks the per-spin circular mean of
  // log10 |f_i|, about -0.133 N, with seed-to-seed spread ~ 0.09 sqrt(N).
  const TimeGrid grid{0.0, 100.0, 1001};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Series series = local_decoherence_run(20, seed, grid, 2);
    REQUIRE(series.size() == 1001);
    CHECK(series[0].t == 0.0);
    CHECK(series[0].value == 0.0);
    const double med = summarize_series(series, 0.1).baseline;
    CHECK(med < -1.5);
    CHECK(med > -4.5);
  }
}

TEST_CASE("config validation") {
  RunConfig config;
  config.n = 0;
  CHECK_THROWS_AS(validate(config), InvalidModel);
  config.n = 5;
  config.burn_in_fraction = 1.0;
  CHECK_THROWS_AS(validate(config), InvalidModel);
  config.burn_in_fraction = 0.1;
  config.grid = {0.0, 1.0, 1};
  CHECK_THROWS_AS(validate(config), GridError);
}
