#pragma once

#include <functional>

namespace ruin {

struct QuadResult {
  double value = 0;
  double error = 0;  // sum of local Gauss/Kronrod error estimates
  int intervals = 0;
  bool converged = false;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature with an absolute
/// tolerance: the panel with the largest error estimate is bisected until the
/// summed estimate drops below abs_tol.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                              int max_intervals = 4000);

}  // namespace ruin
