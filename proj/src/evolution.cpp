#include "spinbath/evolution.hpp"

#include <cassert>
#include <cmath>
#include <numbers>

#include "spinbath/errors.hpp"
#include "spinbath/parallel.hpp"

namespace spinbath {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Keeps phase arguments small so trig error stays bounded out to t ~ 1e6.
inline double reduced_phase(double g, double t) {
  return std::remainder(g * t, kTwoPi);
}

// Per-spin constants of the two branch products. With
// p = |alpha|^2 eps_uu, q = |beta|^2 eps_dd, w = conj(alpha) beta eps_ud:
//   Diag0 factor    = c0 + c1 cos(theta) + c2 sin(theta)       (real)
//   OffDiag1 factor = (c0 cos(theta) + c1) + i c3 sin(theta)
struct FactorTable {
  std::size_t n = 0;
  std::vector<double> g;
  std::vector<double> c0;  // p + q
  std::vector<double> c1;  // 2 Re w
  std::vector<double> c2;  // 2 Im w
  std::vector<double> c3;  // p - q
};

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw LengthMismatch("bath, observable, and couplings must share N");
}

FactorTable compile(const BathState& bath, const ProductObservable& obs,
                    const CouplingSet& couplings) {
  require_same_length(bath.size(), couplings.size());
  require_same_length(bath.size(), obs.size());
  FactorTable f;
  f.n = bath.size();
  f.g.resize(f.n);
  f.c0.resize(f.n);
  f.c1.resize(f.n);
  f.c2.resize(f.n);
  f.c3.resize(f.n);
  for (std::size_t i = 0; i < f.n; ++i) {
    const double p = std::norm(bath.alpha[i]) * obs.eps_uu[i];
    const double q = std::norm(bath.beta[i]) * obs.eps_dd[i];
    const Complex w = std::conj(bath.alpha[i]) * bath.beta[i] * obs.eps_ud[i];
    f.g[i] = couplings.g[i];
    f.c0[i] = p + q;
    f.c1[i] = 2.0 * w.real();
    f.c2[i] = 2.0 * w.imag();
    f.c3[i] = p - q;
  }
  return f;
}

// Table for r(t): the OffDiag1 product of the bath-identity observable.
FactorTable compile_identity(const BathState& bath,
                             const CouplingSet& couplings) {
  require_same_length(bath.size(), couplings.size());
  FactorTable f;
  f.n = bath.size();
  f.g.resize(f.n);
  f.c0.resize(f.n);
  f.c1.assign(f.n, 0.0);
  f.c2.assign(f.n, 0.0);
  f.c3.resize(f.n);
  for (std::size_t i = 0; i < f.n; ++i) {
    const double p = std::norm(bath.alpha[i]);
    const double q = std::norm(bath.beta[i]);
    f.g[i] = couplings.g[i];
    f.c0[i] = p + q;
    f.c3[i] = p - q;
  }
  return f;
}

// Running products are renormalized by exact powers of two, in release
// builds only when they leave [2^-500, 2^500]; the represented value is
// identical either way. Debug builds renormalize at every factor and check
// the mantissa range.
inline void renorm_real(double& prod, std::int64_t& e) {
#ifndef NDEBUG
  if (prod != 0.0) {
    int k = 0;
    prod = std::frexp(prod, &k);
    e += k;
    assert(std::fabs(prod) >= 0.5 && std::fabs(prod) < 1.0);
  }
#else
  const double a = std::fabs(prod);
  if (a > 0x1p500 || (a < 0x1p-500 && prod != 0.0)) {
    int k = 0;
    prod = std::frexp(prod, &k);
    e += k;
  }
#endif
}

inline void renorm_complex(double& re, double& im, std::int64_t& e) {
  const double a = std::fmax(std::fabs(re), std::fabs(im));
#ifndef NDEBUG
  if (a != 0.0) {
    int k = 0;
    std::frexp(a, &k);
    re = std::ldexp(re, -k);
    im = std::ldexp(im, -k);
    e += k;
    assert(std::fmax(std::fabs(re), std::fabs(im)) >= 0.5);
    assert(std::fmax(std::fabs(re), std::fabs(im)) < 1.0);
  }
#else
  if (a > 0x1p500 || (a < 0x1p-500 && a != 0.0)) {
    int k = 0;
    std::frexp(a, &k);
    re = std::ldexp(re, -k);
    im = std::ldexp(im, -k);
    e += k;
  }
#endif
}

ScaledComplex eval_diag0(const FactorTable& f, double t) {
  double prod = 1.0;
  std::int64_t e = 0;
  for (std::size_t i = 0; i < f.n; ++i) {
    const double theta = reduced_phase(f.g[i], t);
    prod *= f.c0[i] + f.c1[i] * std::cos(theta) + f.c2[i] * std::sin(theta);
    renorm_real(prod, e);
  }
  return detail::sc_normalize({prod, 0.0}, e);
}

ScaledComplex eval_offdiag1(const FactorTable& f, double t) {
  double re = 1.0;
  double im = 0.0;
  std::int64_t e = 0;
  for (std::size_t i = 0; i < f.n; ++i) {
    const double theta = reduced_phase(f.g[i], t);
    const double fr = f.c0[i] * std::cos(theta) + f.c1[i];
    const double fi = f.c3[i] * std::sin(theta);
    const double nr = re * fr - im * fi;
    const double ni = re * fi + im * fr;
    re = nr;
    im = ni;
    renorm_complex(re, im, e);
  }
  return detail::sc_normalize({re, im}, e);
}

ScaledComplex eval_branch(const FactorTable& f, double t, Branch branch) {
  return branch == Branch::Diag0 ? eval_diag0(f, t) : eval_offdiag1(f, t);
}

ScaledComplex eval_const_part(const FactorTable& f, Branch branch) {
  const std::vector<double>& c = branch == Branch::Diag0 ? f.c0 : f.c1;
  double prod = 1.0;
  std::int64_t e = 0;
  for (std::size_t i = 0; i < f.n; ++i) {
    prod *= c[i];
    renorm_real(prod, e);
  }
  return detail::sc_normalize({prod, 0.0}, e);
}

// Normalized log-magnitude series of sc-valued samples over a grid that
// must start at t = 0; entry 0 is pinned to exactly zero.
template <class Eval>
Series normalized_log_series(const TimeGrid& grid, double log_ref, int threads,
                             Eval&& eval_at) {
  Series out(grid.points);
  out[0] = {0.0, 0.0};
  parallel_for_blocks(grid.points - 1, threads,
                      [&](std::size_t lo, std::size_t hi) {
                        for (std::size_t j = lo; j < hi; ++j) {
                          const std::size_t k = j + 1;
                          const double t = grid.at(k);
                          out[k] = {t, sc_log10_abs(eval_at(t)) - log_ref};
                        }
                      });
  return out;
}

}  // namespace

void validate(const TimeGrid& grid) {
  if (!(grid.t_start >= 0.0) || !(grid.t_end > grid.t_start) ||
      !std::isfinite(grid.t_end))
    throw GridError("time grid requires 0 <= t_start < t_end");
  if (grid.points < 2) throw GridError("time grid requires at least 2 points");
}

Complex decoherence_factor(const BathState& bath, const CouplingSet& couplings,
                           double t) {
  if (!std::isfinite(t)) throw NonFiniteValue("t is not finite");
  const FactorTable f = compile_identity(bath, couplings);
  return sc_to(eval_offdiag1(f, t));
}

ScaledComplex gamma(const BathState& bath, const ProductObservable& obs,
                    const CouplingSet& couplings, double t, Branch branch) {
  if (!std::isfinite(t)) throw NonFiniteValue("t is not finite");
  return eval_branch(compile(bath, obs, couplings), t, branch);
}

ScaledComplex gamma_diag(const BathState& bath, const ProductObservable& obs,
                         Branch branch) {
  require_same_length(bath.size(), obs.size());
  CouplingSet zero;
  zero.g.assign(bath.size(), 0.0);
  return eval_const_part(compile(bath, obs, zero), branch);
}

Series lambda_series(const BathState& bath, const ProductObservable& obs,
                     const CouplingSet& couplings, const TimeGrid& grid,
                     Branch branch, int threads) {
  validate(grid);
  if (grid.t_start != 0.0)
    throw GridError("lambda_series requires a grid starting at t = 0");
  const FactorTable f = compile(bath, obs, couplings);
  const ScaledComplex diag = eval_const_part(f, branch);
  const ScaledComplex gamma0 = eval_branch(f, 0.0, branch);
  const ScaledComplex lambda0 = sc_sub(gamma0, diag);
  // Degenerate when |Lambda(0)| < 1e-13 * max(|gamma(0)|, |gamma_diag|):
  // the t = 0 cancellation leaves nothing to normalize against. The scale
  // is the product's own magnitude, which for large N sits far below one.
  const double log_lambda0 = sc_log10_abs(lambda0);
  const double log_cut =
      -13.0 + std::fmax(sc_log10_abs(gamma0), sc_log10_abs(diag));
  if (sc_is_zero(lambda0) || !(log_lambda0 >= log_cut))
    throw NormalizationDegenerate(
        "lambda(0) is negligible; no off-diagonal content to normalize against");
  return normalized_log_series(grid, log_lambda0, threads, [&](double t) {
    return sc_sub(eval_branch(f, t, branch), diag);
  });
}

Series log_abs_r_series(const BathState& bath, const CouplingSet& couplings,
                        const TimeGrid& grid, int threads) {
  validate(grid);
  if (grid.t_start != 0.0)
    throw GridError("log_abs_r_series requires a grid starting at t = 0");
  const FactorTable f = compile_identity(bath, couplings);
  const double log_r0 = sc_log10_abs(eval_offdiag1(f, 0.0));
  return normalized_log_series(grid, log_r0, threads, [&](double t) {
    return eval_offdiag1(f, t);
  });
}

double expectation(const SystemAmplitudes& sys, const BathState& bath,
                   const ProductObservable& obs, const CouplingSet& couplings,
                   double t) {
  if (!std::isfinite(t)) throw NonFiniteValue("t is not finite");
  validate(sys);
  const FactorTable f = compile(bath, obs, couplings);
  const double wa = std::norm(sys.a) * obs.s00;
  const double wb = std::norm(sys.b) * obs.s11;
  const Complex wc = sys.a * std::conj(sys.b) * obs.s10;

  const ScaledComplex term_a = sc_mul(eval_diag0(f, t), Complex(wa, 0.0));
  const ScaledComplex term_b = sc_mul(eval_diag0(f, -t), Complex(wb, 0.0));
  ScaledComplex cross = sc_mul(eval_offdiag1(f, t), wc);
  cross = detail::sc_normalize({2.0 * cross.mantissa.real(), 0.0}, cross.exp2);

  const Complex value = sc_to(sc_add(term_a, sc_add(term_b, cross)));
  assert(std::abs(value.imag()) <= 1e-10 * std::fmax(1.0, std::abs(value.real())));
  return value.real();
}

double diag_expectation(const SystemAmplitudes& sys, const BathState& bath,
                        const ProductObservable& obs) {
  validate(sys);
  const double wd = std::norm(sys.a) * obs.s00 + std::norm(sys.b) * obs.s11;
  const double wc = 2.0 * (sys.a * std::conj(sys.b) * obs.s10).real();
  const ScaledComplex d0 = sc_mul(gamma_diag(bath, obs, Branch::Diag0),
                                  Complex(wd, 0.0));
  const ScaledComplex d1 = sc_mul(gamma_diag(bath, obs, Branch::OffDiag1),
                                  Complex(wc, 0.0));
  return sc_to(sc_add(d0, d1)).real();
}

Complex reduced_coherence(const SystemAmplitudes& sys, const BathState& bath,
                          const CouplingSet& couplings, double t) {
  validate(sys);
  return sys.a * std::conj(sys.b) * decoherence_factor(bath, couplings, t);
}

const char* to_string(Branch branch) {
  return branch == Branch::Diag0 ? "0" : "1";
}

}  // namespace spinbath
