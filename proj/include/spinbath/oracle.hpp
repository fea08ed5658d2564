#pragma once

#include <cstddef>
#include <vector>

#include "spinbath/evolution.hpp"
#include "spinbath/model.hpp"

namespace spinbath {
namespace oracle {

// Brute-force reference implementations, deliberately independent of the
// product engine. Size caps keep every check at desk scale; see
// enumerate_terms (N <= 12) and r_by_sum (N <= 20).

inline constexpr std::size_t kMaxTermBathSize = 12;
inline constexpr std::size_t kMaxRSumBathSize = 20;

/// One term of the 4^N expansion of a branch product: coefficient and the
/// total energy carried by its phase factor.
struct Term {
  Complex c{0.0, 0.0};
  double energy = 0.0;
};

/// All 4^N terms, sorted by energy ascending; ties keep enumeration order
/// (base-4 digits over per-spin choices, spin 0 least significant).
struct TermList {
  std::vector<Term> entries;
  std::size_t n = 0;
  Branch branch = Branch::Diag0;
};

/// Enumerates every assignment of spins to the four per-spin product
/// choices {uu, dd, ud, du}. Throws BathTooLarge above N = 12.
TermList enumerate_terms(const BathState& bath, const ProductObservable& obs,
                         const CouplingSet& couplings, Branch branch);

/// Compensated sum over the term list: sum_k c_k e^{i E_k t}.
Complex gamma_by_sum(const TermList& terms, double t);

/// Sum of the per-spin diagonal weights times the branch's diagonal
/// entries only: terms whose stored energy is exactly zero.
Complex diag_by_sum(const TermList& terms);

/// 2^N-configuration sum form of the decoherence factor. Throws
/// BathTooLarge above N = 20.
Complex r_by_sum(const BathState& bath, const CouplingSet& couplings, double t);

/// Full 2^(N+1)-amplitude state at time t; index = s * 2^N + m with system
/// bit s and bath bits m (bit i = spin i, 0 = up).
std::vector<Complex> build_statevector(const SystemAmplitudes& sys,
                                       const BathState& bath,
                                       const CouplingSet& couplings, double t);

/// <Psi(t)|O|Psi(t)> evaluated directly on the state vector. Throws
/// BathTooLarge above N = 12, and Error if the Hermitian expectation
/// acquires an imaginary residue above 1e-8.
double statevector_expectation(const SystemAmplitudes& sys,
                               const BathState& bath,
                               const ProductObservable& obs,
                               const CouplingSet& couplings, double t);

}  // namespace oracle
}  // namespace spinbath
