// Two structural decompositions of the exit time:
//
//   geometric: T = Z + Y_1 + ... + Y_{N-1}, with N geometric on the number of
//              returns to 0, Y the conditioned return time and Z the
//              conditioned exit time;
//   subgame:   T = T^{|d(1)|} + ... + T^{|d(N)|}, a random number of smaller
//              symmetric games with a deterministic size schedule d(i).
//
// Both rebuild the full law by convolution and must agree with duration_pmf.
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ruin/markov_exact.hpp"
#include "ruin/walk.hpp"

namespace ruin {

/// Up-step probabilities of the walk conditioned to return to 0 before +-k.
template <Scalar T>
struct ConditionedChain {
  int k = 1;
  T p;
  std::vector<T> up;  // up[i] for i = 1..k-1; up[0] unused. Empty when k = 1.

  bool empty() const { return k < 2; }

  /// Conditional up-step probability at any level -(k-1)..(k-1), level != 0.
  /// Negative levels use u_{-i} = 1 - u_i.
  T u(int level) const;

  /// u_i - (p(1-p) + u_{i+1} u_i) for 1 <= i <= k-2; zero in exact mode.
  T recursion_residual(int i) const;
};

template <Scalar T>
struct GeometricDecomposition {
  int k = 1;
  T p;
  T return_prob;                       // P(T_0 < T^{|k|})
  std::optional<DurationDist<T>> dist_Y;  // absent when return_prob == 0
  DurationDist<T> dist_Z;

  T success_prob() const { return T(1) - return_prob; }
};

/// Deterministic subgame sizes d(i) and post-game distances y(i) from 0.
/// Index 0 holds the convention y(0) = 0; d(0) is unused.
struct SubgameSchedule {
  int k = 2;
  std::vector<int> y;
  std::vector<int> d;
  int cycle_start = 0;   // first index of the repeating block of y
  int cycle_length = 0;  // period of y (0 if not detected within n_max)

  int length() const { return static_cast<int>(y.size()) - 1; }
};

template <Scalar T>
struct HazardSchedule {
  SubgameSchedule schedule;
  std::vector<T> r;  // r[n] = P(N = n | N >= n), n = 1..n_max; r[0] unused
};

template <Scalar T>
struct EvenKReport {
  int k = 2;
  T half_win;      // pi^+_{k/2}(p)
  T success_prob;  // half_win^2 + (1 - half_win)^2
  DurationDist<T> reconstructed;
  T max_deviation;  // max_n |reconstructed(n) - dp(n)|
};

struct PiMonotonicityReport {
  int k = 1;
  std::vector<Rational> grid;
  std::vector<Rational> values;
  bool strictly_increasing = true;
  bool endpoints_ok = true;  // pi(0) = 0 and pi(1/2) = 1/2 when those are on the grid
};

template <Scalar T>
ConditionedChain<T> conditioned_chain(const WalkParams<T>& w);

/// P_start(hit 0 before +k) for 0 <= start <= k, from the two-barrier system.
template <Scalar T>
std::vector<T> hit_zero_first(const WalkParams<T>& w);

template <Scalar T>
T return_prob(const WalkParams<T>& w);

/// Law of the time to reach 0 from `start` (1..k-1) under the conditioned kernel.
template <Scalar T>
DurationDist<T> conditioned_return_time(const ConditionedChain<T>& chain, int start, int horizon);

/// Law of Z from 0 split by the side of the first step: (+1 side, -1 side).
/// Each side is itself a conditional law (normalized), or absent if that side
/// has zero weight.
template <Scalar T>
std::pair<std::optional<DurationDist<T>>, std::optional<DurationDist<T>>> conditioned_exit_by_side(
    const WalkParams<T>& w, int horizon);

template <Scalar T>
std::pair<std::optional<DurationDist<T>>, DurationDist<T>> conditioned_component_dists(
    const ConditionedChain<T>& chain, int horizon);

template <Scalar T>
GeometricDecomposition<T> geometric_decomposition(const WalkParams<T>& w, int horizon);

template <Scalar T>
DurationDist<T> reconstruct_geometric(const WalkParams<T>& w, int horizon);

SubgameSchedule subgame_schedule(int k, int n_max);

template <Scalar T>
HazardSchedule<T> hazard_rates(const WalkParams<T>& w, int n_max);

template <Scalar T>
DurationDist<T> reconstruct_subgame(const WalkParams<T>& w, int horizon);

template <Scalar T>
EvenKReport<T> even_k_geometric_check(const WalkParams<T>& w, int horizon);

PiMonotonicityReport pi_monotonicity_check(int k, const std::vector<Rational>& grid);

/// Truncated convolution of two laws on {0..horizon}; truncation mass is
/// recomputed as 1 - sum so nothing is dropped silently.
template <Scalar T>
DurationDist<T> convolve(const DurationDist<T>& a, const DurationDist<T>& b, int horizon);

}  // namespace ruin
