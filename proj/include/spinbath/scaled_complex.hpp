#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>

#include "spinbath/errors.hpp"

namespace spinbath {

/// Extended-range complex number: value = mantissa * 2^exp2.
///
/// Either mantissa == 0 and exp2 == 0 (canonical zero), or
/// 0.5 <= |mantissa| < 1. Products of ~10^6 factors of typical magnitude
/// well below one stay representable, which native doubles cannot do.
struct ScaledComplex {
  std::complex<double> mantissa{0.0, 0.0};
  std::int64_t exp2 = 0;
};

namespace detail {

// Renormalizes m * 2^e into the canonical mantissa range. Scaling is by
// powers of two only, so the represented value is preserved exactly.
inline ScaledComplex sc_normalize(std::complex<double> m, std::int64_t e) {
  double mag = std::hypot(m.real(), m.imag());
  if (mag == 0.0) return {};
  int k = 0;
  std::frexp(mag, &k);
  m = {std::ldexp(m.real(), -k), std::ldexp(m.imag(), -k)};
  e += k;
  // hypot rounding can land exactly on a power of two; fix up by one step.
  mag = std::hypot(m.real(), m.imag());
  if (mag >= 1.0) {
    m *= 0.5;
    e += 1;
  } else if (mag < 0.5) {
    m += m;
    e -= 1;
  }
  return {m, e};
}

}  // namespace detail

inline bool sc_is_zero(const ScaledComplex& x) {
  return x.mantissa == std::complex<double>(0.0, 0.0);
}

inline ScaledComplex sc_from(std::complex<double> z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw NonFiniteValue("sc_from: component is NaN or infinite");
  return detail::sc_normalize(z, 0);
}

/// Converts back to a native double pair. Values below the native range
/// underflow gradually to zero; values above it raise RangeOverflow.
inline std::complex<double> sc_to(const ScaledComplex& x) {
  if (sc_is_zero(x)) return {0.0, 0.0};
  if (x.exp2 > 1100) throw RangeOverflow("sc_to: exponent too large for double");
  if (x.exp2 < -1200) return {0.0, 0.0};
  const int e = static_cast<int>(x.exp2);
  std::complex<double> z{std::ldexp(x.mantissa.real(), e),
                         std::ldexp(x.mantissa.imag(), e)};
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw RangeOverflow("sc_to: value exceeds double range");
  return z;
}

inline ScaledComplex sc_mul(const ScaledComplex& x, const ScaledComplex& y) {
  if (sc_is_zero(x) || sc_is_zero(y)) return {};
  std::int64_t e = 0;
  if (__builtin_add_overflow(x.exp2, y.exp2, &e))
    throw ExponentOverflow("sc_mul: exponent sum exceeds 64-bit range");
  return detail::sc_normalize(x.mantissa * y.mantissa, e);
}

inline ScaledComplex sc_mul(const ScaledComplex& x, std::complex<double> z) {
  return sc_mul(x, sc_from(z));
}

// Operands further apart than this many binary orders do not interact:
// the smaller one is absorbed. Far below double's 53-bit resolution.
inline constexpr std::int64_t kAbsorptionGapBits = 128;

inline ScaledComplex sc_add(const ScaledComplex& x, const ScaledComplex& y) {
  if (sc_is_zero(x)) return y;
  if (sc_is_zero(y)) return x;
  const ScaledComplex& big = (x.exp2 >= y.exp2) ? x : y;
  const ScaledComplex& small = (x.exp2 >= y.exp2) ? y : x;
  const std::int64_t gap = big.exp2 - small.exp2;
  if (gap > kAbsorptionGapBits) return big;
  const int shift = -static_cast<int>(gap);
  const std::complex<double> aligned{std::ldexp(small.mantissa.real(), shift),
                                     std::ldexp(small.mantissa.imag(), shift)};
  return detail::sc_normalize(big.mantissa + aligned, big.exp2);
}

inline ScaledComplex sc_neg(const ScaledComplex& x) {
  return {-x.mantissa, x.exp2};
}

inline ScaledComplex sc_sub(const ScaledComplex& x, const ScaledComplex& y) {
  return sc_add(x, sc_neg(y));
}

/// log10 of the modulus; -infinity for canonical zero.
inline double sc_log10_abs(const ScaledComplex& x) {
  if (sc_is_zero(x)) return -std::numeric_limits<double>::infinity();
  constexpr double log10_2 = 0.30102999566398119521;
  return std::log10(std::abs(x.mantissa)) +
         static_cast<double>(x.exp2) * log10_2;
}

/// True if the stored representation satisfies the class invariant.
inline bool sc_invariant_holds(const ScaledComplex& x) {
  if (sc_is_zero(x)) return x.exp2 == 0;
  const double mag = std::abs(x.mantissa);
  return mag >= 0.5 && mag < 1.0;
}

}  // namespace spinbath
