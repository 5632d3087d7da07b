// Exit time of Brownian motion with drift mu from [-k, k]:
//   T_mu = inf{t >= 0 : mu t + B(t) not in [-k, k]},
// via its image-series density, adaptive quadrature for tails and moments,
// and a scaled random-walk approximation.
#pragma once

#include <cstdint>
#include <vector>

#include "ruin/markov_exact.hpp"
#include "ruin/simulation.hpp"

namespace ruin {

struct BrownianExit {
  double mu = 0.0;
  double k = 1.0;
  double series_tol = 1e-18;  // absolute threshold on one image pair
  double t_max = 0.0;         // 0: chosen adaptively
};

inline constexpr double kDensityTMin = 1e-8;

struct SeriesValue {
  double value = 0;
  int pairs = 0;                // image pairs summed beyond i = 0
  double last_pair_bound = 0;  // |term(i)| + |term(-i)| of the last pair
};

SeriesValue exit_density_series(const BrownianExit& be, double t);

double exit_density(const BrownianExit& be, double t);

/// P(T_mu > t) = 1 - int_0^t f.
double exit_tail(const BrownianExit& be, double t, double quad_tol);

struct TailIntegral {
  double integral = 0;       // int over [kDensityTMin, t_max]
  double t_max = 0;
  double tail_estimate = 0;  // remainder beyond t_max, exponential envelope
  double left_remainder = 0; // bound on int over (0, kDensityTMin]
  double quad_error = 0;
};

/// int_0^inf t^order f(t) dt, split into the quadrature part and the
/// certified remainders. Set be.t_max to fix the right end.
TailIntegral exit_moment(const BrownianExit& be, int order, double quad_tol, double tail_tol = 1e-10);

struct DensityGrid {
  std::vector<double> times;
  std::vector<double> values;
  double est_norm = 0;     // int over (0, t_max]
  double norm_defect = 0;  // |1 - est_norm - tail beyond t_max|
  double t_max = 0;
};

DensityGrid density_grid(const BrownianExit& be, const std::vector<double>& times, double quad_tol);

struct SweepReport {
  double k = 1;
  std::vector<double> mus;
  std::vector<double> times;
  std::vector<std::vector<double>> tails;    // tails[j][i] = P(T_{mu_j} > t_i)
  std::vector<std::vector<double>> margins;  // tails[j][i] - tails[j+1][i]
  double min_margin = 0;
  double quad_tol = 0;
  bool ordered = true;  // every margin >= -2 quad_tol
};

SweepReport monotonicity_sweep_serial(double k, const std::vector<double>& mus, const std::vector<double>& times,
                                      double quad_tol);
SweepReport monotonicity_sweep(double k, const std::vector<double>& mus, const std::vector<double>& times,
                               double quad_tol, int workers = 1);

/// Law of h * T^{|K|} for the walk with p = (1 + mu sqrt(h)) / 2 and
/// K = round(k / sqrt(h)).
struct ScaledExitDist {
  double mu = 0, k = 1, h = 0, p = 0.5;
  int barrier = 1;
  bool barrier_rounding_warning = false;
  DurationDist<double> steps;
  std::vector<double> step_tail;  // step_tail[n] = P(T > n)

  /// P(h T > t).
  double tail(double t) const;
  /// h E[T], from the exact expected number of steps.
  double mean() const;
};

ScaledExitDist rw_approx_exit_dist(double mu, double k, double h, double t_horizon);

struct EulerExitConfig {
  double mu = 0, k = 1;
  double dt = 1e-3;
  double t_cap = 50.0;  // paths still inside at t_cap are recorded as censored
  std::uint64_t paths = 0;
  std::uint64_t seed = 0;
  int workers = 1;
};

/// Exit grid indices: a path leaving during ((j-1) dt, j dt] is recorded as j.
struct EulerExitStats {
  Histogram exit_index;
  std::uint64_t censored = 0;
  double dt = 0;

  /// P(T > t) evaluated at a grid time t = j dt.
  double tail(double t) const;
  void merge(const EulerExitStats& other);
};

/// Gaussian Euler steps with the Brownian-bridge crossing correction between
/// grid points.
EulerExitStats simulate_exit_euler_serial(const EulerExitConfig& cfg);
EulerExitStats simulate_exit_euler(const EulerExitConfig& cfg);

namespace detail {
EulerExitStats euler_chunk(const EulerExitConfig& cfg, std::uint64_t chunk);
void validate_euler(const EulerExitConfig& cfg);
double sweep_tail(double k, double mu, double t, double quad_tol);
void validate_sweep(const std::vector<double>& mus, const std::vector<double>& times, double quad_tol);
SweepReport finish_sweep(double k, const std::vector<double>& mus, const std::vector<double>& times, double quad_tol,
                         std::vector<std::vector<double>> tails);
}  // namespace detail

}  // namespace ruin
