#pragma once

#include <cstddef>
#include <vector>

#include "spinbath/model.hpp"
#include "spinbath/scaled_complex.hpp"

namespace spinbath {

/// Selects one of the two N-fold product functions in the global
/// expectation value: Diag0 multiplies the diagonal system block,
/// OffDiag1 the off-diagonal one. They differ only in which per-spin
/// terms carry the time-dependent phase factors.
enum class Branch { Diag0, OffDiag1 };

/// Uniform linear grid; t_k = t_start + k * (t_end - t_start) / (points - 1).
struct TimeGrid {
  double t_start = 0.0;
  double t_end = 1.0;
  std::size_t points = 2;

  double dt() const { return (t_end - t_start) / static_cast<double>(points - 1); }
  double at(std::size_t k) const { return t_start + static_cast<double>(k) * dt(); }
};

/// Throws GridError unless 0 <= t_start < t_end and points >= 2.
void validate(const TimeGrid& grid);

struct SeriesPoint {
  double t = 0.0;
  double value = 0.0;
};
using Series = std::vector<SeriesPoint>;

/// Overlap of the two relative bath states,
/// r(t) = prod_i (|alpha_i|^2 e^{i g_i t} + |beta_i|^2 e^{-i g_i t}).
/// |r| <= 1; for very large N the native return value may underflow to 0,
/// use log_abs_r_series for log-scale readings.
Complex decoherence_factor(const BathState& bath, const CouplingSet& couplings,
                           double t);

/// The branch product at time t, accumulated factor by factor in extended
/// range. Per spin, with p = |alpha|^2 eps_uu, q = |beta|^2 eps_dd,
/// w = conj(alpha) beta eps_ud and theta = g t:
///   Diag0:    p + q + w e^{-i theta} + conj(w e^{-i theta})   (real)
///   OffDiag1: p e^{i theta} + w + conj(w) + q e^{-i theta}
ScaledComplex gamma(const BathState& bath, const ProductObservable& obs,
                    const CouplingSet& couplings, double t, Branch branch);

/// Time-independent part of the branch product: the per-spin terms that
/// carry no phase factor. Diag0: prod (p + q); OffDiag1: prod 2 Re(w).
ScaledComplex gamma_diag(const BathState& bath, const ProductObservable& obs,
                         Branch branch);

/// log10(|Lambda(t)| / |Lambda(0)|) on the grid, where
/// Lambda(t) = gamma(t) - gamma_diag. The grid must start at t = 0 and the
/// first entry is exactly 0. Throws NormalizationDegenerate when
/// |Lambda(0)| < 1e-13 * max(1, |gamma(0)|): the instance has no
/// off-diagonal content to track.
Series lambda_series(const BathState& bath, const ProductObservable& obs,
                     const CouplingSet& couplings, const TimeGrid& grid,
                     Branch branch, int threads = 0);

/// log10(|r(t)| / |r(0)|) on the grid (|r(0)| = 1 up to rounding), computed
/// in extended range so arbitrarily deep decays stay finite.
Series log_abs_r_series(const BathState& bath, const CouplingSet& couplings,
                        const TimeGrid& grid, int threads = 0);

/// Expectation value of the product observable in the evolved pure state:
///   |a|^2 s00 G0(t) + |b|^2 s11 G0(-t) + 2 Re[a conj(b) s10 G1(t)]
/// with G0/G1 the two branch products. Throws RangeOverflow if the result
/// exceeds the native double range.
double expectation(const SystemAmplitudes& sys, const BathState& bath,
                   const ProductObservable& obs, const CouplingSet& couplings,
                   double t);

/// Time-independent part of the expectation value:
///   (|a|^2 s00 + |b|^2 s11) G0_diag + 2 Re[a conj(b) s10] G1_diag.
double diag_expectation(const SystemAmplitudes& sys, const BathState& bath,
                        const ProductObservable& obs);

/// Off-diagonal element of the reduced system density matrix,
/// a conj(b) r(t).
Complex reduced_coherence(const SystemAmplitudes& sys, const BathState& bath,
                          const CouplingSet& couplings, double t);

const char* to_string(Branch branch);

}  // namespace spinbath
