// Independent reference computations used only by the tests.
#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "ruin/detail/tridiagonal.hpp"
#include "ruin/scalar.hpp"

namespace ruin::oracle {

/// n/d in lowest terms (the two-argument mpq_class constructor does not reduce).
inline Rational frac(long n, long d) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

struct EnumeratedLaw {
  std::vector<Rational> plus, minus;  // P(T = n, exit side), n = 0..n_max
};

/// Sums p^ups q^downs over all 2^n step sequences whose first exit from
/// (-k, k) happens exactly at step n.
inline EnumeratedLaw enumerate_paths(const Rational& p, int k, int n_max) {
  const Rational q = 1 - p;
  EnumeratedLaw law;
  law.plus.assign(static_cast<std::size_t>(n_max) + 1, Rational(0));
  law.minus.assign(law.plus.size(), Rational(0));
  for (int n = 1; n <= n_max; ++n) {
    for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
      int level = 0, ups = 0, first_exit = 0;
      for (int s = 0; s < n; ++s) {
        const bool up = (mask >> s) & 1ul;
        level += up ? 1 : -1;
        ups += up ? 1 : 0;
        if (std::abs(level) == k) {
          first_exit = s + 1;
          break;
        }
      }
      if (first_exit != n) continue;
      Rational w(1);
      for (int s = 0; s < ups; ++s) w *= p;
      for (int s = 0; s < n - ups; ++s) w *= q;
      (level > 0 ? law.plus : law.minus)[static_cast<std::size_t>(n)] += w;
    }
  }
  return law;
}

/// P_0(reach +size before -size) by solving the two-barrier linear system
/// (independent of the closed-form ratio of powers).
inline Rational exit_up_probability(const Rational& p, int size) {
  if (size == 1) return p;
  const std::size_t m = static_cast<std::size_t>(2 * size - 1);
  std::vector<Rational> lower(m, Rational(-(1 - p))), diag(m, Rational(1)), upper(m, Rational(-p)), rhs(m, Rational(0));
  rhs[m - 1] = p;
  auto x = detail::solve_tridiagonal(lower, diag, upper, rhs);
  return x[static_cast<std::size_t>(size - 1)];
}

/// Hazards of the subgame count by tracking the signed position after every
/// subgame: positions move by +-d(n) with the linear-solve exit
/// probabilities, and mass landing on +-k is harvested.
inline std::vector<Rational> hazards_by_position(const Rational& p, int k, const std::vector<int>& sizes) {
  std::vector<Rational> mass(static_cast<std::size_t>(2 * k + 1), Rational(0));
  mass[static_cast<std::size_t>(k)] = 1;
  std::vector<Rational> r(sizes.size(), Rational(0));
  for (std::size_t n = 1; n < sizes.size(); ++n) {
    const int d = sizes[n];
    const Rational up = exit_up_probability(p, d);
    std::vector<Rational> next(mass.size(), Rational(0));
    Rational alive(0), absorbed(0);
    for (int x = -k + 1; x <= k - 1; ++x) {
      const Rational& m = mass[static_cast<std::size_t>(x + k)];
      if (m == 0) continue;
      alive += m;
      for (int dir : {1, -1}) {
        const int y = x + dir * d;
        const Rational w = m * (dir > 0 ? up : Rational(1 - up));
        if (std::abs(y) >= k) {
          absorbed += w;
        } else {
          next[static_cast<std::size_t>(y + k)] += w;
        }
      }
    }
    r[n] = alive == 0 ? Rational(0) : Rational(absorbed / alive);
    mass.swap(next);
  }
  return r;
}

/// Exit-time density of Brownian motion with drift from [-k, k] by the
/// eigenfunction expansion, which converges fastest for large t:
///   f(t) = cosh(mu k) e^{-mu^2 t/2} sum_{j>=0} (-1)^j (2j+1) pi / (2k^2) e^{-(2j+1)^2 pi^2 t / (8 k^2)}.
inline double spectral_exit_density(double mu, double k, double t) {
  double s = 0.0;
  for (int j = 0; j < 100000; ++j) {
    const double m = 2.0 * j + 1.0;
    const double term = m * std::numbers::pi / (2.0 * k * k) * std::exp(-m * m * std::numbers::pi * std::numbers::pi * t / (8.0 * k * k));
    s += (j % 2 == 0 ? 1.0 : -1.0) * term;
    if (term < 1e-300 || (j > 3 && term < 1e-22 * std::fabs(s))) break;
  }
  return std::cosh(mu * k) * std::exp(-0.5 * mu * mu * t) * s;
}

/// P(T > t) by integrating the eigenfunction expansion term by term.
inline double spectral_exit_tail(double mu, double k, double t) {
  double s = 0.0;
  const double lam0 = 0.5 * mu * mu;
  for (int j = 0; j < 100000; ++j) {
    const double m = 2.0 * j + 1.0;
    const double rate = m * m * std::numbers::pi * std::numbers::pi / (8.0 * k * k) + lam0;
    const double term = m * std::numbers::pi / (2.0 * k * k) * std::exp(-rate * t) / rate;
    s += (j % 2 == 0 ? 1.0 : -1.0) * term;
    if (term < 1e-300 || (j > 3 && term < 1e-22 * std::fabs(s))) break;
  }
  return std::cosh(mu * k) * s;
}

}  // namespace ruin::oracle
