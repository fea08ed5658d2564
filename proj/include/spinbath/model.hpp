#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "spinbath/rng.hpp"

namespace spinbath {

using Complex = std::complex<double>;

/// Coupling constants g_i between the central spin and each bath spin,
/// in radians per unit time (hbar = 1).
struct CouplingSet {
  std::vector<double> g;

  std::size_t size() const { return g.size(); }
};

/// Initial product state of the bath: one amplitude pair (alpha_i, beta_i)
/// per spin, each pair normalized to |alpha|^2 + |beta|^2 = 1.
struct BathState {
  std::vector<Complex> alpha;
  std::vector<Complex> beta;

  std::size_t size() const { return alpha.size(); }
};

/// Amplitudes of the central spin states |0> and |1>.
struct SystemAmplitudes {
  Complex a;
  Complex b;
};

/// One product term of a global observable: a 2x2 Hermitian block on the
/// central spin (s01 = conj(s10) is implied) and a 2x2 Hermitian block per
/// bath spin (eps_du = conj(eps_ud) is implied). Multi-term observables are
/// handled by callers through linearity of the expectation value.
struct ProductObservable {
  double s00 = 0.0;
  double s11 = 0.0;
  Complex s10{0.0, 0.0};
  std::vector<double> eps_uu;
  std::vector<double> eps_dd;
  std::vector<Complex> eps_ud;

  std::size_t size() const { return eps_uu.size(); }
};

/// Sampling regimes for the initial bath state and the observable.
///   A                        fully random magnitudes, phases, and signs
///   B                        bath phases in [0, pi/2]; diagonal observable
///                            coefficients non-negative
///   C                        every stored coefficient replaced by its
///                            absolute value (all phases zero)
///   RestrictedObservableOnly observable restricted as in C, bath fully
///                            random as in A
enum class Scenario { A, B, C, RestrictedObservableOnly };

/// Throws InvalidModel / NonFiniteValue when an invariant is broken.
void validate(const CouplingSet& couplings);
void validate(const BathState& bath);
void validate(const SystemAmplitudes& sys);
void validate(const ProductObservable& obs);

// Samplers consume their stream in a fixed documented order, so a value is
// a pure function of (n, scenario, stream); see each definition. All draws
// are uniform.

/// g_i independent uniform on [-pi, pi].
CouplingSet sample_couplings(std::size_t n, RandomStream& rng);

/// |alpha_i|^2 uniform on [0, 1], |beta_i|^2 = 1 - |alpha_i|^2; phases per
/// scenario (A / RestrictedObservableOnly: [0, 2pi); B: [0, pi/2]; C: zero).
BathState sample_bath(std::size_t n, Scenario scenario, RandomStream& rng);

/// Coefficient ranges per scenario; see Scenario. Diagonal entries are
/// drawn from [-1, 1] (A, and the system block also in B), or [0, 1] where
/// the scenario forbids sign flips; off-diagonal entries have magnitude in
/// [0, 1] and a phase that is uniform or pinned to zero per scenario.
ProductObservable sample_observable(std::size_t n, Scenario scenario,
                                    RandomStream& rng);

/// Observable acting on the central spin only: identity on every bath spin
/// (eps_uu = eps_dd = 1, eps_ud = 0).
ProductObservable local_observable(double s00, double s11, Complex s10,
                                   std::size_t n);

const char* to_string(Scenario scenario);
Scenario scenario_from_string(const std::string& token);

}  // namespace spinbath
