#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spinbath/errors.hpp"
#include "spinbath/evolution.hpp"
#include "spinbath/model.hpp"
#include "spinbath/oracle.hpp"
#include "spinbath/rng.hpp"

using namespace spinbath;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

struct Instance {
  CouplingSet couplings;
  BathState bath;
  ProductObservable obs;
};

Instance random_instance(std::size_t n, std::uint64_t seed,
                         Scenario scenario = Scenario::A) {
  Instance inst;
  RandomStream cr(seed, 0);
  RandomStream br(seed, 1);
  RandomStream orr(seed, 2);
  inst.couplings = sample_couplings(n, cr);
  inst.bath = sample_bath(n, scenario, br);
  inst.obs = sample_observable(n, scenario, orr);
  return inst;
}

BathState two_level_bath(double alpha_sq) {
  BathState bath;
  bath.alpha = {Complex(std::sqrt(alpha_sq), 0.0)};
  bath.beta = {Complex(std::sqrt(1.0 - alpha_sq), 0.0)};
  return bath;
}

CouplingSet commensurate_couplings(std::size_t n, double period,
                                   std::uint64_t seed) {
  CouplingSet c;
  c.g.resize(n);
  RandomStream rng(seed, 7);
  for (auto& g : c.g) {
    const auto k = static_cast<std::int64_t>(rng.next_u64() % 11) - 5;
    g = kTwoPi * static_cast<double>(k) / period;
  }
  return c;
}

}  // namespace

TEST_CASE("decoherence_factor elementary values") {
  RandomStream br(1, 1);
  const BathState bath = sample_bath(200, Scenario::A, br);
  RandomStream cr(1, 0);
  const CouplingSet couplings = sample_couplings(200, cr);
  CHECK(std::abs(decoherence_factor(bath, couplings, 0.0) - Complex(1.0, 0.0)) <
        1e-12);

  // single spin fully up: pure phase e^{i g t}
  CouplingSet gpi;
  gpi.g = {kPi};
  CHECK(std::abs(decoherence_factor(two_level_bath(1.0), gpi, 2.0) -
                 Complex(1.0, 0.0)) < 1e-12);

  // balanced single spin at quarter period: cos(pi/2) = 0
  CHECK(std::abs(decoherence_factor(two_level_bath(0.5), gpi, 0.5)) < 1e-12);
}

TEST_CASE("decoherence_factor modulus never exceeds one") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance inst = random_instance(50, seed);
    RandomStream tr(seed, 9);
    for (int k = 0; k < 10; ++k) {
      const double t = tr.uniform(0.0, 1000.0);
      CHECK(std::abs(decoherence_factor(inst.bath, inst.couplings, t)) <=
            1.0 + 1e-10 * 50);
    }
  }
}

TEST_CASE("decoherence_factor requires matching lengths and finite t") {
  const Instance inst = random_instance(4, 3);
  CouplingSet three;
  three.g = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(decoherence_factor(inst.bath, three, 1.0), LengthMismatch);
  CHECK_THROWS_AS(decoherence_factor(inst.bath, inst.couplings, std::nan("")),
                  NonFiniteValue);
}

TEST_CASE("decoherence_factor equals the 2^N configuration sum") {
  const Instance inst = random_instance(10, 4);
  RandomStream tr(4, 9);
  for (int k = 0; k < 5; ++k) {
    const double t = tr.uniform(0.0, 100.0);
    const Complex by_sum = oracle::r_by_sum(inst.bath, inst.couplings, t);
    const Complex by_product =
        decoherence_factor(inst.bath, inst.couplings, t);
    CHECK(std::abs(by_product - by_sum) < 1e-10);
  }
}

TEST_CASE("gamma reduces to the local results for local observables") {
  const Instance inst = random_instance(100, 5);
  const ProductObservable local = local_observable(0.3, -0.4, Complex(0.2, 0.7),
                                                   100);
  RandomStream tr(5, 9);
  for (int k = 0; k < 5; ++k) {
    const double t = tr.uniform(0.0, 100.0);
    const Complex g0 =
        sc_to(gamma(inst.bath, local, inst.couplings, t, Branch::Diag0));
    CHECK(std::abs(g0 - Complex(1.0, 0.0)) < 1e-12);
    // same arithmetic path as the decoherence factor
    const Complex g1 =
        sc_to(gamma(inst.bath, local, inst.couplings, t, Branch::OffDiag1));
    CHECK(g1 == decoherence_factor(inst.bath, inst.couplings, t));
  }
}

TEST_CASE("gamma equals the 4^N term sum on both branches") {
  const Instance inst = random_instance(6, 6);
  for (Branch branch : {Branch::Diag0, Branch::OffDiag1}) {
    const oracle::TermList terms =
        oracle::enumerate_terms(inst.bath, inst.obs, inst.couplings, branch);
    RandomStream tr(6, 9);
    for (int k = 0; k < 10; ++k) {
      const double t = tr.uniform(0.0, 100.0);
      const Complex by_sum = oracle::gamma_by_sum(terms, t);
      const Complex by_product =
          sc_to(gamma(inst.bath, inst.obs, inst.couplings, t, branch));
      CHECK(std::abs(by_product - by_sum) <=
            1e-9 * std::fmax(1.0, std::abs(by_sum)));
    }
  }
}

TEST_CASE("gamma_diag elementary cases") {
  const Instance inst = random_instance(30, 7);
  const ProductObservable local = local_observable(1.0, 1.0, Complex(0, 0), 30);
  const ScaledComplex d0 = gamma_diag(inst.bath, local, Branch::Diag0);
  CHECK(std::abs(sc_to(d0) - Complex(1.0, 0.0)) < 1e-12);
  CHECK(d0.mantissa.imag() == 0.0);

  // all eps_ud zero kills every off-diagonal factor exactly
  ProductObservable wiped = inst.obs;
  for (auto& w : wiped.eps_ud) w = Complex(0.0, 0.0);
  CHECK(sc_is_zero(gamma_diag(inst.bath, wiped, Branch::OffDiag1)));
}

TEST_CASE("gamma_diag equals the zero-energy term sum") {
  const Instance inst = random_instance(6, 8);
  for (Branch branch : {Branch::Diag0, Branch::OffDiag1}) {
    const oracle::TermList terms =
        oracle::enumerate_terms(inst.bath, inst.obs, inst.couplings, branch);
    const Complex by_sum = oracle::diag_by_sum(terms);
    const Complex by_product = sc_to(gamma_diag(inst.bath, inst.obs, branch));
    CHECK(std::abs(by_product - by_sum) <=
          1e-9 * std::fmax(1e-30, std::abs(by_sum)));
  }
}

TEST_CASE("periodicity under commensurate couplings") {
  const double period = 37.0;
  const CouplingSet couplings = commensurate_couplings(50, period, 5);
  RandomStream br(5, 1);
  const BathState bath = sample_bath(50, Scenario::A, br);
  RandomStream orr(5, 2);
  const ProductObservable obs = sample_observable(50, Scenario::A, orr);
  RandomStream tr(5, 9);
  for (int k = 0; k < 5; ++k) {
    const double t = tr.uniform(0.0, 100.0);
    const Complex r_now = decoherence_factor(bath, couplings, t);
    const Complex r_later = decoherence_factor(bath, couplings, t + period);
    CHECK(std::abs(r_now - r_later) < 1e-9);
    for (Branch branch : {Branch::Diag0, Branch::OffDiag1}) {
      const Complex g_now = sc_to(gamma(bath, obs, couplings, t, branch));
      const Complex g_later =
          sc_to(gamma(bath, obs, couplings, t + period, branch));
      CHECK(std::abs(g_now - g_later) <=
            1e-9 * std::fmax(1e-300, std::abs(g_now)));
    }
  }
}

TEST_CASE("long-time average of gamma converges to gamma_diag") {
  // Fixed instance; the bound is instance-dependent (the window must cover
  // the smallest nonzero energy gap many times over), so the seed is pinned
  // to a typical case. Seed sweeps live in the verify report, which uses an
  // rms-based normalization that tolerates accidentally small gamma(0).
  const Instance inst = random_instance(8, 2);
  const TimeGrid grid{0.0, 1e4, 100000};
  Complex mean{0.0, 0.0};
  for (std::size_t k = 0; k < grid.points; ++k)
    mean += sc_to(
        gamma(inst.bath, inst.obs, inst.couplings, grid.at(k), Branch::Diag0));
  mean /= static_cast<double>(grid.points);
  const Complex diag = sc_to(gamma_diag(inst.bath, inst.obs, Branch::Diag0));
  const Complex at0 =
      sc_to(gamma(inst.bath, inst.obs, inst.couplings, 0.0, Branch::Diag0));
  CHECK(std::abs(mean - diag) <= 0.05 * std::abs(at0));
}

TEST_CASE("long-time average of |r|^2 matches the closed-form product") {
  RandomStream cr(3, 0);
  const CouplingSet couplings = sample_couplings(8, cr);
  RandomStream br(3, 1);
  const BathState bath = sample_bath(8, Scenario::A, br);
  double target = 1.0;
  for (std::size_t i = 0; i < 8; ++i) {
    const double u = std::norm(bath.alpha[i]);
    const double v = std::norm(bath.beta[i]);
    target *= u * u + v * v;
  }
  const TimeGrid grid{0.0, 1e4, 100000};
  double mean = 0.0;
  for (std::size_t k = 0; k < grid.points; ++k)
    mean += std::norm(decoherence_factor(bath, couplings, grid.at(k)));
  mean /= static_cast<double>(grid.points);
  CHECK(std::fabs(mean - target) <= 0.05 * target);
}

TEST_CASE("lambda_series normalization and degeneracy") {
  const Instance inst = random_instance(100, 1, Scenario::C);
  const TimeGrid grid{0.0, 100.0, 1001};
  const Series series =
      lambda_series(inst.bath, inst.obs, inst.couplings, grid, Branch::Diag0);
  REQUIRE(series.size() == 1001);
  CHECK(series[0].t == 0.0);
  CHECK(series[0].value == 0.0);

  // scenario C at N = 100 decays hard; median over t in [10, 100]
  std::vector<double> kept;
  for (std::size_t k = 100; k < series.size(); ++k)
    kept.push_back(series[k].value);
  std::sort(kept.begin(), kept.end());
  CHECK(kept[kept.size() / 2] < -2.0);

  // a constant branch product has nothing to normalize: eps_ud = 0 makes
  // the Diag0 product time-independent, Lambda identically zero
  ProductObservable wiped = inst.obs;
  for (auto& w : wiped.eps_ud) w = Complex(0.0, 0.0);
  CHECK_THROWS_AS(lambda_series(inst.bath, wiped, inst.couplings, grid,
                                Branch::Diag0),
                  NormalizationDegenerate);

  // ... while the OffDiag1 product still oscillates and normalizes fine
  const Series off = lambda_series(inst.bath, wiped, inst.couplings, grid,
                                   Branch::OffDiag1);
  CHECK(off[0].value == 0.0);

  CHECK_THROWS_AS(lambda_series(inst.bath, inst.obs, inst.couplings,
                                TimeGrid{1.0, 2.0, 10}, Branch::Diag0),
                  GridError);
  CHECK_THROWS_AS(lambda_series(inst.bath, inst.obs, inst.couplings,
                                TimeGrid{0.0, 2.0, 1}, Branch::Diag0),
                  GridError);
}

TEST_CASE("lambda_series is invariant under the thread count") {
  const Instance inst = random_instance(500, 17);
  const TimeGrid grid{0.0, 50.0, 301};
  const Series s1 =
      lambda_series(inst.bath, inst.obs, inst.couplings, grid, Branch::Diag0, 1);
  const Series s4 =
      lambda_series(inst.bath, inst.obs, inst.couplings, grid, Branch::Diag0, 4);
  REQUIRE(s1.size() == s4.size());
  for (std::size_t k = 0; k < s1.size(); ++k) {
    CHECK(s1[k].t == s4[k].t);
    CHECK(s1[k].value == s4[k].value);
  }
}

TEST_CASE("expectation reduces correctly for pure system states") {
  const Instance inst = random_instance(12, 21);
  const SystemAmplitudes up{Complex(1.0, 0.0), Complex(0.0, 0.0)};
  RandomStream tr(21, 9);
  for (int k = 0; k < 5; ++k) {
    const double t = tr.uniform(0.0, 100.0);
    const double direct = expectation(up, inst.bath, inst.obs, inst.couplings, t);
    const Complex g0 =
        sc_to(gamma(inst.bath, inst.obs, inst.couplings, t, Branch::Diag0));
    CHECK(direct ==
          doctest::Approx(inst.obs.s00 * g0.real()).epsilon(1e-12));
  }
}

TEST_CASE("expectation of the balanced sigma_z-type local observable is zero") {
  const Instance inst = random_instance(40, 22);
  const ProductObservable sz = local_observable(1.0, -1.0, Complex(0, 0), 40);
  const double isq = 1.0 / std::sqrt(2.0);
  const SystemAmplitudes balanced{Complex(isq, 0.0), Complex(isq, 0.0)};
  for (double t : {0.0, 0.7, 13.9, 77.7}) {
    CHECK(std::fabs(expectation(balanced, inst.bath, sz, inst.couplings, t)) <
          1e-12);
  }
}

TEST_CASE("expectation matches the state-vector oracle") {
  for (std::uint64_t seed = 31; seed <= 35; ++seed) {
    const Instance inst = random_instance(10, seed);
    RandomStream sr(seed, 3);
    const double p = sr.next_double();
    const SystemAmplitudes sys{
        std::polar(std::sqrt(p), sr.uniform(0.0, kTwoPi)),
        std::polar(std::sqrt(1.0 - p), sr.uniform(0.0, kTwoPi))};
    RandomStream tr(seed, 9);
    for (int k = 0; k < 5; ++k) {
      const double t = tr.uniform(0.0, 100.0);
      const double via_oracle = oracle::statevector_expectation(
          sys, inst.bath, inst.obs, inst.couplings, t);
      const double via_products =
          expectation(sys, inst.bath, inst.obs, inst.couplings, t);
      CHECK(std::fabs(via_products - via_oracle) <=
            1e-9 * std::fmax(1.0, std::fabs(via_oracle)));
    }
  }
}

TEST_CASE("expectation raises RangeOverflow when the product leaves range") {
  const std::size_t n = 2000;
  BathState bath;
  bath.alpha.assign(n, Complex(1.0, 0.0));
  bath.beta.assign(n, Complex(0.0, 0.0));
  CouplingSet couplings;
  couplings.g.assign(n, 0.1);
  ProductObservable obs = local_observable(1.0, 0.0, Complex(0, 0), n);
  for (auto& e : obs.eps_uu) e = 2.0;  // branch product 2^2000
  const SystemAmplitudes up{Complex(1.0, 0.0), Complex(0.0, 0.0)};
  CHECK_THROWS_AS(expectation(up, bath, obs, couplings, 0.0), RangeOverflow);
}

TEST_CASE("diag_expectation") {
  const Instance inst = random_instance(12, 41);
  RandomStream sr(41, 3);
  const double p = sr.next_double();
  const SystemAmplitudes sys{
      std::polar(std::sqrt(p), sr.uniform(0.0, kTwoPi)),
      std::polar(std::sqrt(1.0 - p), sr.uniform(0.0, kTwoPi))};

  // local observables keep only the system part
  const ProductObservable local =
      local_observable(0.8, -0.3, Complex(0.1, 0.4), 12);
  const double want = std::norm(sys.a) * 0.8 + std::norm(sys.b) * -0.3;
  CHECK(diag_expectation(sys, inst.bath, local) ==
        doctest::Approx(want).epsilon(1e-12));

  // with b = 0 only the Diag0 part survives
  const SystemAmplitudes up{Complex(1.0, 0.0), Complex(0.0, 0.0)};
  const double d0 = sc_to(gamma_diag(inst.bath, inst.obs, Branch::Diag0)).real();
  CHECK(diag_expectation(up, inst.bath, inst.obs) ==
        doctest::Approx(inst.obs.s00 * d0).epsilon(1e-12));
}

TEST_CASE("diag_expectation equals the period average of expectation") {
  // Binary-weight harmonics: no signed subset of {1,2,4,8,16,32} sums to
  // zero, so the period average keeps exactly the structural diagonal part.
  const double period = 16.0;
  CouplingSet couplings;
  for (int i = 0; i < 6; ++i)
    couplings.g.push_back(2.0 * kPi * static_cast<double>(1 << i) / period);
  RandomStream br(51, 1);
  const BathState bath = sample_bath(6, Scenario::A, br);
  RandomStream orr(51, 2);
  const ProductObservable obs = sample_observable(6, Scenario::A, orr);
  RandomStream sr(51, 3);
  const double p = sr.next_double();
  const SystemAmplitudes sys{
      std::polar(std::sqrt(p), sr.uniform(0.0, kTwoPi)),
      std::polar(std::sqrt(1.0 - p), sr.uniform(0.0, kTwoPi))};

  // 4096 uniform samples over one full period annihilate every nonzero
  // integer harmonic exactly
  const std::size_t samples = 4096;
  double mean = 0.0;
  for (std::size_t k = 0; k < samples; ++k)
    mean += expectation(sys, bath, obs, couplings,
                        period * static_cast<double>(k) /
                            static_cast<double>(samples));
  mean /= static_cast<double>(samples);
  CHECK(std::fabs(mean - diag_expectation(sys, bath, obs)) < 1e-8);
}

TEST_CASE("reduced_coherence") {
  const Instance inst = random_instance(20, 61);
  RandomStream sr(61, 3);
  const double p = sr.next_double();
  const SystemAmplitudes sys{
      std::polar(std::sqrt(p), sr.uniform(0.0, kTwoPi)),
      std::polar(std::sqrt(1.0 - p), sr.uniform(0.0, kTwoPi))};
  CHECK(std::abs(reduced_coherence(sys, inst.bath, inst.couplings, 0.0) -
                 sys.a * std::conj(sys.b)) < 1e-12);

  const SystemAmplitudes up{Complex(1.0, 0.0), Complex(0.0, 0.0)};
  CHECK(std::abs(reduced_coherence(up, inst.bath, inst.couplings, 33.3)) == 0.0);

  // local dephasing at N = 20: at least an order of magnitude by t = 5
  const double isq = 1.0 / std::sqrt(2.0);
  const SystemAmplitudes balanced{Complex(isq, 0.0), Complex(isq, 0.0)};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RandomStream cr(seed, 0);
    const CouplingSet couplings = sample_couplings(20, cr);
    RandomStream br(seed, 1);
    const BathState bath = sample_bath(20, Scenario::A, br);
    const double v0 = std::abs(reduced_coherence(balanced, bath, couplings, 0.0));
    const double v5 = std::abs(reduced_coherence(balanced, bath, couplings, 5.0));
    CHECK(v5 <= 0.1 * v0);
  }
}

TEST_CASE("time grid validation") {
  CHECK_THROWS_AS(validate(TimeGrid{-1.0, 1.0, 10}), GridError);
  CHECK_THROWS_AS(validate(TimeGrid{0.0, 0.0, 10}), GridError);
  CHECK_THROWS_AS(validate(TimeGrid{0.0, 1.0, 1}), GridError);
  const TimeGrid grid{0.0, 10.0, 101};
  validate(grid);
  CHECK(grid.at(0) == 0.0);
  CHECK(grid.at(100) == doctest::Approx(10.0).epsilon(1e-15));
}
