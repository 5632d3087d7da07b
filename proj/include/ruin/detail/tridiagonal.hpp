#pragma once

#include <stdexcept>
#include <vector>

#include "ruin/scalar.hpp"

namespace ruin::detail {

// Thomas elimination for  lower[i]*x[i-1] + diag[i]*x[i] + upper[i]*x[i+1] = rhs[i].
// No pivoting; the absorbing-chain systems solved here are (weakly) diagonally
// dominant M-matrices, so every pivot stays positive.
template <Scalar T>
std::vector<T> solve_tridiagonal(const std::vector<T>& lower, const std::vector<T>& diag,
                                 const std::vector<T>& upper, const std::vector<T>& rhs) {
  const std::size_t n = diag.size();
  std::vector<T> c(n), d(n), x(n);
  if (n == 0) return x;
  for (std::size_t i = 0; i < n; ++i) {
    T pivot = diag[i];
    if (i > 0) pivot -= lower[i] * c[i - 1];
    if (pivot == 0) throw std::runtime_error("singular tridiagonal system");
    c[i] = (i + 1 < n) ? T(upper[i] / pivot) : T(0);
    T num = rhs[i];
    if (i > 0) num -= lower[i] * d[i - 1];
    d[i] = num / pivot;
  }
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

}  // namespace ruin::detail
