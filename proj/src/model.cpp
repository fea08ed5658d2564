#include "spinbath/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spinbath/errors.hpp"

namespace spinbath {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNormTolerance = 1e-12;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw NonFiniteValue(std::string(what) + " is not finite");
}

void require_finite(Complex z, const char* what) {
  require_finite(z.real(), what);
  require_finite(z.imag(), what);
}

}  // namespace

void validate(const CouplingSet& couplings) {
  if (couplings.g.empty()) throw InvalidModel("coupling set must have N >= 1");
  for (double gi : couplings.g) require_finite(gi, "coupling");
}

void validate(const BathState& bath) {
  if (bath.alpha.empty()) throw InvalidModel("bath state must have N >= 1");
  if (bath.alpha.size() != bath.beta.size())
    throw InvalidModel("bath state has unequal alpha/beta lists");
  for (std::size_t i = 0; i < bath.alpha.size(); ++i) {
    require_finite(bath.alpha[i], "bath amplitude");
    require_finite(bath.beta[i], "bath amplitude");
    const double norm = std::norm(bath.alpha[i]) + std::norm(bath.beta[i]);
    if (std::abs(norm - 1.0) > kNormTolerance)
      throw InvalidModel("bath amplitude pair " + std::to_string(i) +
                         " is not normalized");
  }
}

void validate(const SystemAmplitudes& sys) {
  require_finite(sys.a, "system amplitude");
  require_finite(sys.b, "system amplitude");
  if (std::abs(std::norm(sys.a) + std::norm(sys.b) - 1.0) > kNormTolerance)
    throw InvalidModel("system amplitudes are not normalized");
}

void validate(const ProductObservable& obs) {
  if (obs.eps_uu.empty()) throw InvalidModel("observable must have N >= 1");
  if (obs.eps_uu.size() != obs.eps_dd.size() ||
      obs.eps_uu.size() != obs.eps_ud.size())
    throw InvalidModel("observable has unequal per-spin coefficient lists");
  require_finite(obs.s00, "s00");
  require_finite(obs.s11, "s11");
  require_finite(obs.s10, "s10");
  for (std::size_t i = 0; i < obs.eps_uu.size(); ++i) {
    require_finite(obs.eps_uu[i], "eps_uu");
    require_finite(obs.eps_dd[i], "eps_dd");
    require_finite(obs.eps_ud[i], "eps_ud");
  }
}

// Draw order: g_0, g_1, ..., g_{N-1}.
CouplingSet sample_couplings(std::size_t n, RandomStream& rng) {
  if (n == 0) throw InvalidModel("bath size must be >= 1");
  CouplingSet out;
  out.g.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.g[i] = rng.uniform(-kPi, kPi);
  return out;
}

// Draw order per spin: |alpha|^2, then (where the scenario has free phases)
// phase of alpha, phase of beta. Scenario C draws no phases at all.
BathState sample_bath(std::size_t n, Scenario scenario, RandomStream& rng) {
  if (n == 0) throw InvalidModel("bath size must be >= 1");
  const bool full_phase =
      scenario == Scenario::A || scenario == Scenario::RestrictedObservableOnly;
  const double phase_span = full_phase ? kTwoPi
                            : scenario == Scenario::B ? kPi / 2.0
                                                      : 0.0;
  BathState out;
  out.alpha.resize(n);
  out.beta.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pa = rng.next_double();  // |alpha|^2
    const double ra = std::sqrt(pa);
    const double rb = std::sqrt(1.0 - pa);
    if (phase_span > 0.0) {
      const double phi_a = rng.uniform(0.0, phase_span);
      const double phi_b = rng.uniform(0.0, phase_span);
      out.alpha[i] = std::polar(ra, phi_a);
      out.beta[i] = std::polar(rb, phi_b);
    } else {
      out.alpha[i] = ra;
      out.beta[i] = rb;
    }
  }
  return out;
}

// Draw order: s00, s11, |s10| (plus phase where free), then per spin
// eps_uu, eps_dd, |eps_ud| (plus phase where free).
ProductObservable sample_observable(std::size_t n, Scenario scenario,
                                    RandomStream& rng) {
  if (n == 0) throw InvalidModel("bath size must be >= 1");
  const bool nonneg_obs = scenario != Scenario::A && scenario != Scenario::B;
  const bool nonneg_diag = scenario != Scenario::A;
  const bool free_obs_phase = !nonneg_obs;

  ProductObservable out;
  out.s00 = nonneg_obs ? rng.next_double() : rng.uniform(-1.0, 1.0);
  out.s11 = nonneg_obs ? rng.next_double() : rng.uniform(-1.0, 1.0);
  {
    const double mag = rng.next_double();
    out.s10 = free_obs_phase ? std::polar(mag, rng.uniform(0.0, kTwoPi))
                             : Complex(mag, 0.0);
  }
  out.eps_uu.resize(n);
  out.eps_dd.resize(n);
  out.eps_ud.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.eps_uu[i] = nonneg_diag ? rng.next_double() : rng.uniform(-1.0, 1.0);
    out.eps_dd[i] = nonneg_diag ? rng.next_double() : rng.uniform(-1.0, 1.0);
    const double mag = rng.next_double();
    out.eps_ud[i] = free_obs_phase ? std::polar(mag, rng.uniform(0.0, kTwoPi))
                                   : Complex(mag, 0.0);
  }
  return out;
}

ProductObservable local_observable(double s00, double s11, Complex s10,
                                   std::size_t n) {
  if (n == 0) throw InvalidModel("bath size must be >= 1");
  ProductObservable out;
  out.s00 = s00;
  out.s11 = s11;
  out.s10 = s10;
  out.eps_uu.assign(n, 1.0);
  out.eps_dd.assign(n, 1.0);
  out.eps_ud.assign(n, Complex(0.0, 0.0));
  validate(out);
  return out;
}

const char* to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::A: return "a";
    case Scenario::B: return "b";
    case Scenario::C: return "c";
    case Scenario::RestrictedObservableOnly: return "restricted-obs";
  }
  return "?";
}

Scenario scenario_from_string(const std::string& token) {
  if (token == "a" || token == "A") return Scenario::A;
  if (token == "b" || token == "B") return Scenario::B;
  if (token == "c" || token == "C") return Scenario::C;
  if (token == "restricted-obs") return Scenario::RestrictedObservableOnly;
  throw UsageError("scenario: expected one of a|b|c|restricted-obs, got '" +
                   token + "'");
}

}  // namespace spinbath
