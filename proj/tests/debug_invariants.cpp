// Runs the product engine with assertions live (this target is built with
// NDEBUG undefined), so the per-factor mantissa-range checks in the
// extended-range accumulation actually execute, including at N = 10^6.
// Exits nonzero on any mismatch; an assertion failure aborts.

#include <cassert>
#include <cmath>
#include <complex>
#include <cstdio>

#include "spinbath/evolution.hpp"
#include "spinbath/model.hpp"
#include "spinbath/oracle.hpp"
#include "spinbath/rng.hpp"
#include "spinbath/scaled_complex.hpp"

using namespace spinbath;

int main() {
  int bad = 0;

  {
    // small-N equivalence under the asserting build
    RandomStream cr(6, 0), br(6, 1), orr(6, 2);
    const CouplingSet couplings = sample_couplings(6, cr);
    const BathState bath = sample_bath(6, Scenario::A, br);
    const ProductObservable obs = sample_observable(6, Scenario::A, orr);
    for (Branch branch : {Branch::Diag0, Branch::OffDiag1}) {
      const auto terms = oracle::enumerate_terms(bath, obs, couplings, branch);
      RandomStream tr(6, 9);
      for (int k = 0; k < 5; ++k) {
        const double t = tr.uniform(0.0, 100.0);
        const Complex by_sum = oracle::gamma_by_sum(terms, t);
        const Complex by_product = sc_to(gamma(bath, obs, couplings, t, branch));
        if (std::abs(by_product - by_sum) >
            1e-9 * std::fmax(1.0, std::abs(by_sum)))
          ++bad;
      }
    }
  }

  {
    // full-size sweep with per-factor invariant assertions firing
    const std::size_t n = 1000000;
    RandomStream cr(404, 0), br(404, 1), orr(404, 2);
    const CouplingSet couplings = sample_couplings(n, cr);
    const BathState bath = sample_bath(n, Scenario::A, br);
    const ProductObservable obs = sample_observable(n, Scenario::A, orr);
    for (double t : {0.0, 1e3, 1e6}) {
      for (Branch branch : {Branch::Diag0, Branch::OffDiag1}) {
        const ScaledComplex value = gamma(bath, obs, couplings, t, branch);
        if (!sc_invariant_holds(value)) ++bad;
        if (!std::isfinite(sc_log10_abs(value))) ++bad;
      }
    }
    for (Branch branch : {Branch::Diag0, Branch::OffDiag1}) {
      if (!sc_invariant_holds(gamma_diag(bath, obs, branch))) ++bad;
    }
  }

  if (bad == 0)
    std::printf("debug invariants: ok\n");
  else
    std::printf("debug invariants: %d check(s) failed\n", bad);
  return bad;
}
