#include "spinbath/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "spinbath/errors.hpp"

namespace spinbath {
namespace oracle {

namespace {

// Neumaier-compensated accumulator.
struct Compensated {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    comp += std::fabs(sum) >= std::fabs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }

  double value() const { return sum + comp; }
};

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw LengthMismatch("bath, observable, and couplings must share N");
}

}  // namespace

TermList enumerate_terms(const BathState& bath, const ProductObservable& obs,
                         const CouplingSet& couplings, Branch branch) {
  const std::size_t n = bath.size();
  require_same_length(n, obs.size());
  require_same_length(n, couplings.size());
  if (n > kMaxTermBathSize)
    throw BathTooLarge("enumerate_terms is capped at N = " +
                       std::to_string(kMaxTermBathSize));

  // Per spin: the four product choices and the energy each contributes.
  // Choice 0 picks |alpha|^2 eps_uu, 1 picks |beta|^2 eps_dd, 2 picks
  // conj(alpha) beta eps_ud, 3 its conjugate. Which pair carries the
  // phase factors depends on the branch.
  std::vector<std::array<Complex, 4>> coeff(n);
  std::vector<std::array<double, 4>> energy(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex w = std::conj(bath.alpha[i]) * bath.beta[i] * obs.eps_ud[i];
    coeff[i] = {Complex(std::norm(bath.alpha[i]) * obs.eps_uu[i], 0.0),
                Complex(std::norm(bath.beta[i]) * obs.eps_dd[i], 0.0), w,
                std::conj(w)};
    const double g = couplings.g[i];
    if (branch == Branch::Diag0)
      energy[i] = {0.0, 0.0, -g, +g};
    else
      energy[i] = {+g, -g, 0.0, 0.0};
  }

  TermList out;
  out.n = n;
  out.branch = branch;
  const std::size_t count = std::size_t{1} << (2 * n);
  out.entries.resize(count);
  for (std::size_t lambda = 0; lambda < count; ++lambda) {
    Complex c{1.0, 0.0};
    double e = 0.0;
    std::size_t digits = lambda;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t choice = digits & 3u;
      digits >>= 2;
      c *= coeff[i][choice];
      e += energy[i][choice];
    }
    out.entries[lambda] = {c, e};
  }
  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const Term& a, const Term& b) { return a.energy < b.energy; });
  return out;
}

Complex gamma_by_sum(const TermList& terms, double t) {
  Compensated re, im;
  for (const Term& term : terms.entries) {
    const double phase = term.energy * t;
    const Complex v = term.c * Complex(std::cos(phase), std::sin(phase));
    re.add(v.real());
    im.add(v.imag());
  }
  return {re.value(), im.value()};
}

Complex diag_by_sum(const TermList& terms) {
  Compensated re, im;
  for (const Term& term : terms.entries) {
    if (term.energy == 0.0) {
      re.add(term.c.real());
      im.add(term.c.imag());
    }
  }
  return {re.value(), im.value()};
}

Complex r_by_sum(const BathState& bath, const CouplingSet& couplings, double t) {
  const std::size_t n = bath.size();
  require_same_length(n, couplings.size());
  if (n > kMaxRSumBathSize)
    throw BathTooLarge("r_by_sum is capped at N = " +
                       std::to_string(kMaxRSumBathSize));
  Compensated re, im;
  const std::size_t count = std::size_t{1} << n;
  for (std::size_t mask = 0; mask < count; ++mask) {
    double prob = 1.0;
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) {
        prob *= std::norm(bath.beta[i]);
        e -= couplings.g[i];
      } else {
        prob *= std::norm(bath.alpha[i]);
        e += couplings.g[i];
      }
    }
    const double phase = e * t;
    re.add(prob * std::cos(phase));
    im.add(prob * std::sin(phase));
  }
  return {re.value(), im.value()};
}

std::vector<Complex> build_statevector(const SystemAmplitudes& sys,
                                       const BathState& bath,
                                       const CouplingSet& couplings, double t) {
  const std::size_t n = bath.size();
  require_same_length(n, couplings.size());
  const std::size_t dim = std::size_t{1} << n;

  // Relative bath states: for system bit 0 spin-up amplitudes pick up
  // e^{+i g t / 2} and spin-down e^{-i g t / 2}; for bit 1 the reverse.
  std::vector<Complex> psi(2 * dim);
  for (int s = 0; s < 2; ++s) {
    const double sign = s == 0 ? +0.5 : -0.5;
    std::vector<Complex> env(1, Complex(1.0, 0.0));
    env.reserve(dim);
    for (std::size_t i = 0; i < n; ++i) {
      const Complex up = bath.alpha[i] * std::polar(1.0, sign * couplings.g[i] * t);
      const Complex down = bath.beta[i] * std::polar(1.0, -sign * couplings.g[i] * t);
      const std::size_t half = std::size_t{1} << i;
      env.resize(2 * half);
      for (std::size_t m = 0; m < half; ++m) {
        env[m + half] = env[m] * down;
        env[m] = env[m] * up;
      }
    }
    const Complex weight = s == 0 ? sys.a : sys.b;
    for (std::size_t m = 0; m < dim; ++m)
      psi[static_cast<std::size_t>(s) * dim + m] = weight * env[m];
  }
  return psi;
}

double statevector_expectation(const SystemAmplitudes& sys,
                               const BathState& bath,
                               const ProductObservable& obs,
                               const CouplingSet& couplings, double t) {
  const std::size_t n = bath.size();
  require_same_length(n, obs.size());
  require_same_length(n, couplings.size());
  if (n > kMaxTermBathSize)
    throw BathTooLarge("statevector_expectation is capped at N = " +
                       std::to_string(kMaxTermBathSize));
  validate(sys);

  const std::size_t dim = std::size_t{1} << n;
  const std::vector<Complex> psi = build_statevector(sys, bath, couplings, t);
  std::vector<Complex> phi = psi;

  // Apply the per-spin blocks to both system halves.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    const Complex euu(obs.eps_uu[i], 0.0);
    const Complex edd(obs.eps_dd[i], 0.0);
    const Complex eud = obs.eps_ud[i];
    for (std::size_t idx = 0; idx < 2 * dim; ++idx) {
      if (idx & bit) continue;
      const Complex up = phi[idx];
      const Complex down = phi[idx | bit];
      phi[idx] = euu * up + eud * down;
      phi[idx | bit] = std::conj(eud) * up + edd * down;
    }
  }
  // Apply the system block.
  for (std::size_t m = 0; m < dim; ++m) {
    const Complex top = phi[m];
    const Complex bottom = phi[dim + m];
    phi[m] = obs.s00 * top + std::conj(obs.s10) * bottom;
    phi[dim + m] = obs.s10 * top + obs.s11 * bottom;
  }

  Compensated re, im;
  for (std::size_t idx = 0; idx < 2 * dim; ++idx) {
    const Complex v = std::conj(psi[idx]) * phi[idx];
    re.add(v.real());
    im.add(v.imag());
  }
  const double real_part = re.value();
  const double imag_part = im.value();
  if (std::fabs(imag_part) > 1e-8 * std::fmax(1.0, std::fabs(real_part)))
    throw Error("statevector expectation has a non-Hermitian imaginary residue");
  return real_part;
}

}  // namespace oracle
}  // namespace spinbath
