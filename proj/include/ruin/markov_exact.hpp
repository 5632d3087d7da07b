// Exact law of the two-sided exit time of a simple random walk, by dynamic
// programming over the 2k-1 interior states of the absorbing chain.
#pragma once

#include <vector>

#include "ruin/scalar.hpp"
#include "ruin/walk.hpp"

namespace ruin {

/// Law of an integer hitting time on {0, ..., horizon}, plus the mass beyond.
///
/// `k` is the smallest possible value of the time; its support lies on
/// k, k+2, k+4, ... so `k` also fixes the parity.
template <Scalar T>
struct DurationDist {
  int k = 1;
  std::vector<T> pmf;  // pmf[n] = P(time = n), n = 0..horizon
  T truncation_mass{0};

  int horizon() const { return static_cast<int>(pmf.size()) - 1; }
  bool even_parity() const { return k % 2 == 0; }

  T prob(int n) const {
    if (n < 0 || n > horizon()) return T(0);
    return pmf[static_cast<std::size_t>(n)];
  }

  /// P(time > n); exact up to the horizon, truncation_mass beyond it.
  T tail(int n) const {
    T s = truncation_mass;
    for (int m = horizon(); m > n && m >= 0; --m) s += pmf[static_cast<std::size_t>(m)];
    return s;
  }

  T total() const {
    T s = truncation_mass;
    for (const T& v : pmf) s += v;
    return s;
  }

  T mean_truncated() const {
    T s(0);
    for (int n = 0; n <= horizon(); ++n) s += T(n) * pmf[static_cast<std::size_t>(n)];
    return s;
  }
};

/// Joint law of (duration, exit side).
template <Scalar T>
struct JointDurationWinner {
  int k = 1;
  std::vector<T> plus;   // plus[n]  = P(T = n, exit at +k)
  std::vector<T> minus;  // minus[n] = P(T = n, exit at -k)
  T truncation_mass{0};

  int horizon() const { return static_cast<int>(plus.size()) - 1; }
  DurationDist<T> marginal() const;

  /// P(T=n, +k) - P(T=n) * pi_k^+(p) for each n; identically zero when the
  /// exit side is independent of the duration.
  std::vector<T> product_residual(const T& win) const;
};

template <Scalar T>
DurationDist<T> duration_pmf(const WalkParams<T>& w, int horizon);

template <Scalar T>
T duration_tail(const WalkParams<T>& w, int n);

template <Scalar T>
JointDurationWinner<T> joint_duration_winner(const WalkParams<T>& w, int horizon);

/// E[T]. Exact mode solves (I - Q) t = 1 on the interior states; float mode
/// sums P(T > n) until the surviving mass drops below tail_tol and adds a
/// geometric bound for the remainder.
template <Scalar T>
T expected_duration(const WalkParams<T>& w, double tail_tol = 1e-13, long max_horizon = 50'000'000);

/// Smallest horizon with P(T > horizon) < tol (float DP).
int horizon_for_tail(const WalkParams<double>& w, double tol, long max_horizon = 50'000'000);

/// Smallest n with P(T > n) <= 1 - level (float DP).
int duration_quantile(const WalkParams<double>& w, double level, long max_horizon = 50'000'000);

}  // namespace ruin
