#pragma once

#include <stdexcept>
#include <string>

#include "ruin/scalar.hpp"

namespace ruin {

/// Simple random walk from 0 with up-step probability p, absorbed at +k or -k.
template <Scalar T>
struct WalkParams {
  T p;
  int k = 1;

  T q() const { return T(1) - p; }

  void validate() const {
    if (p < 0 || p > 1) throw std::invalid_argument("p must lie in [0, 1]");
    if (k < 1) throw std::invalid_argument("barrier k must be a positive integer");
  }
};

inline WalkParams<double> to_float(const WalkParams<Rational>& w) { return {nearest_double(w.p), w.k}; }
inline WalkParams<double> to_float(const WalkParams<double>& w) { return w; }

/// Probability of reaching +k before -k: p^k / (p^k + (1-p)^k).
template <Scalar T>
T win_prob(const WalkParams<T>& w) {
  w.validate();
  T up = ipow(w.p, w.k);
  T down = ipow(w.q(), w.k);
  return T(up / (up + down));
}

}  // namespace ruin
