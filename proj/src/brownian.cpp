#include "ruin/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ruin/quadrature.hpp"

namespace ruin {

namespace {

void validate(const BrownianExit& be) {
  if (!(be.k > 0)) throw std::invalid_argument("interval half-width k must be positive");
  if (!(be.series_tol > 0)) throw std::invalid_argument("series_tol must be positive");
  if (!std::isfinite(be.mu)) throw std::invalid_argument("drift must be finite");
}

// Remainder of int_T^inf t^order f(t) dt under f(t) ~ f(T) exp(-rate (t - T)).
double exponential_remainder(double f_at, double t, double rate, int order) {
  double sum = 0.0, falling = 1.0;
  for (int j = 0; j <= order; ++j) {
    sum += falling * std::pow(t, order - j) / std::pow(rate, j + 1);
    falling *= order - j;
  }
  return f_at * sum;
}

struct RightEnd {
  double t_max;
  double remainder;
};

RightEnd choose_right_end(const BrownianExit& be, int order, double tail_tol) {
  auto remainder_at = [&](double t) -> double {
    const double ft = exit_density(be, t);
    if (ft <= 0.0) return 0.0;
    const double before = exit_density(be, 0.9 * t);
    const double rate = std::log(before / ft) / (0.1 * t);
    if (!(rate > 0)) return INFINITY;  // still rising
    return exponential_remainder(ft, t, rate, order);
  };
  if (be.t_max > 0) return {be.t_max, remainder_at(be.t_max)};
  double t = std::max(1.0, 4.0 * be.k * be.k);
  for (int iter = 0; iter < 200; ++iter, t *= 1.5) {
    const double r = remainder_at(t);
    if (r < tail_tol) return {t, r};
  }
  throw ResourceLimitError("could not certify the exit-time tail", t);
}

}  // namespace

SeriesValue exit_density_series(const BrownianExit& be, double t) {
  validate(be);
  if (!(t > 0)) throw std::invalid_argument("exit density needs t > 0");
  const double k = be.k;
  const double amu = std::fabs(be.mu);
  // log of (e^{-mu k} + e^{mu k}) e^{-mu^2 t / 2}, kept in log form against overflow.
  const double log_prefactor = amu * k + std::log1p(std::exp(-2.0 * amu * k)) - 0.5 * be.mu * be.mu * t;
  const double scale = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * t * std::sqrt(t));
  auto term = [&](double a) { return a * scale * std::exp(log_prefactor - a * a / (2.0 * t)); };

  SeriesValue out;
  out.value = term(k);
  const double peak = std::sqrt(t);
  int quiet = 0;
  for (long i = 1; i < 10'000'000; ++i) {
    const double outer = k + 4.0 * i * k;   // image at +(4i+1)k
    const double inner = k - 4.0 * i * k;   // image at -(4i-1)k
    const double up = term(outer), down = term(inner);
    out.value += up + down;
    ++out.pairs;
    out.last_pair_bound = std::fabs(up) + std::fabs(down);
    // Stop after two consecutive negligible pairs, once past the peak of a e^{-a^2/2t}.
    const bool past_peak = std::fabs(inner) > peak;
    quiet = (past_peak && out.last_pair_bound < be.series_tol) ? quiet + 1 : 0;
    if (quiet >= 2) break;
  }
  return out;
}

double exit_density(const BrownianExit& be, double t) { return exit_density_series(be, t).value; }

double exit_tail(const BrownianExit& be, double t, double quad_tol) {
  validate(be);
  if (!(quad_tol > 0)) throw std::invalid_argument("quad_tol must be positive");
  if (t < 0) throw std::invalid_argument("exit_tail needs t >= 0");
  if (t <= kDensityTMin) return 1.0;
  auto q = integrate_adaptive([&](double s) { return exit_density(be, s); }, kDensityTMin, t, quad_tol);
  return 1.0 - q.value;
}

TailIntegral exit_moment(const BrownianExit& be, int order, double quad_tol, double tail_tol) {
  validate(be);
  if (order < 0) throw std::invalid_argument("moment order must be non-negative");
  if (!(quad_tol > 0)) throw std::invalid_argument("quad_tol must be positive");
  TailIntegral out;
  const auto end = choose_right_end(be, order, tail_tol);
  out.t_max = end.t_max;
  out.tail_estimate = end.remainder;
  out.left_remainder = std::pow(kDensityTMin, order + 1) * exit_density(be, kDensityTMin);
  auto q = integrate_adaptive([&](double s) { return std::pow(s, order) * exit_density(be, s); }, kDensityTMin,
                              out.t_max, quad_tol);
  out.integral = q.value;
  out.quad_error = q.error;
  return out;
}

DensityGrid density_grid(const BrownianExit& be, const std::vector<double>& times, double quad_tol) {
  DensityGrid g;
  g.times = times;
  for (double t : times) g.values.push_back(exit_density(be, t));
  auto norm = exit_moment(be, 0, quad_tol);
  g.est_norm = norm.integral + norm.left_remainder;
  g.t_max = norm.t_max;
  g.norm_defect = std::fabs(1.0 - g.est_norm - norm.tail_estimate);
  return g;
}

double ScaledExitDist::tail(double t) const {
  if (t < 0) return 1.0;
  const auto n = static_cast<std::size_t>(std::floor(t / h + 1e-9));
  if (n >= step_tail.size()) return steps.truncation_mass;
  return step_tail[n];
}

double ScaledExitDist::mean() const { return h * expected_duration(WalkParams<double>{p, barrier}); }

ScaledExitDist rw_approx_exit_dist(double mu, double k, double h, double t_horizon) {
  if (!(h > 0)) throw std::invalid_argument("time step h must be positive");
  if (!(k > 0)) throw std::invalid_argument("interval half-width k must be positive");
  ScaledExitDist s;
  s.mu = mu;
  s.k = k;
  s.h = h;
  s.p = 0.5 * (1.0 + mu * std::sqrt(h));
  if (s.p < 0.0 || s.p > 1.0) throw std::invalid_argument("h too large for this drift: p(h) leaves [0,1]");
  s.barrier = std::max(1, static_cast<int>(std::lround(k / std::sqrt(h))));
  s.barrier_rounding_warning = std::fabs(s.barrier * std::sqrt(h) - k) / k > 1e-3;
  const int horizon = std::max(s.barrier, static_cast<int>(std::ceil(t_horizon / h)));
  s.steps = duration_pmf(WalkParams<double>{s.p, s.barrier}, horizon);
  s.step_tail.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
  double acc = s.steps.truncation_mass;
  for (int n = horizon; n >= 0; --n) {
    s.step_tail[static_cast<std::size_t>(n)] = acc;
    acc += s.steps.pmf[static_cast<std::size_t>(n)];
  }
  return s;
}

double EulerExitStats::tail(double t) const {
  const std::uint64_t total = exit_index.total() + censored;
  if (total == 0) return 1.0;
  const auto j = static_cast<std::int64_t>(std::floor(t / dt + 1e-9));
  const double exited = exit_index.ecdf(j) * static_cast<double>(exit_index.total());
  return 1.0 - exited / static_cast<double>(total);
}

void EulerExitStats::merge(const EulerExitStats& other) {
  exit_index.merge(other.exit_index);
  censored += other.censored;
  if (dt == 0) dt = other.dt;
}

namespace detail {

void validate_euler(const EulerExitConfig& cfg) {
  if (!(cfg.k > 0) || !(cfg.dt > 0) || !(cfg.t_cap > 0)) throw std::invalid_argument("invalid Euler exit configuration");
}

EulerExitStats euler_chunk(const EulerExitConfig& cfg, std::uint64_t chunk) {
  RngStream rng(cfg.seed, chunk);
  EulerExitStats st;
  st.dt = cfg.dt;
  const double sd = std::sqrt(cfg.dt), drift = cfg.mu * cfg.dt, k = cfg.k;
  const auto cap = static_cast<std::int64_t>(std::ceil(cfg.t_cap / cfg.dt));
  const auto n = std::min(kChunkTrials, cfg.paths - chunk * kChunkTrials);
  for (std::uint64_t path = 0; path < n; ++path) {
    double x = 0.0;
    std::int64_t j = 0;
    bool exited = false;
    while (j < cap) {
      ++j;
      const double y = x + drift + sd * rng.normal();
      if (y >= k || y <= -k) {
        exited = true;
        break;
      }
      // Bridge crossing probability between grid points; given both
      // endpoints it does not depend on the drift.
      const double cross_up = std::exp(-2.0 * (k - x) * (k - y) / cfg.dt);
      const double cross_down = std::exp(-2.0 * (k + x) * (k + y) / cfg.dt);
      const double stay = (1.0 - cross_up) * (1.0 - cross_down);
      if (rng.uniform() >= stay) {
        exited = true;
        break;
      }
      x = y;
    }
    if (exited) {
      st.exit_index.add(j);
    } else {
      ++st.censored;
    }
  }
  return st;
}

double sweep_tail(double k, double mu, double t, double quad_tol) {
  return exit_tail(BrownianExit{mu, k}, t, quad_tol);
}

SweepReport finish_sweep(double k, const std::vector<double>& mus, const std::vector<double>& times, double quad_tol,
                         std::vector<std::vector<double>> tails) {
  SweepReport rep;
  rep.k = k;
  rep.mus = mus;
  rep.times = times;
  rep.quad_tol = quad_tol;
  rep.tails = std::move(tails);
  rep.min_margin = INFINITY;
  for (std::size_t j = 0; j + 1 < mus.size(); ++j) {
    std::vector<double> row;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double m = rep.tails[j][i] - rep.tails[j + 1][i];
      row.push_back(m);
      rep.min_margin = std::min(rep.min_margin, m);
      if (m < -2.0 * quad_tol) rep.ordered = false;
    }
    rep.margins.push_back(std::move(row));
  }
  if (rep.margins.empty()) rep.min_margin = 0.0;
  return rep;
}

}  // namespace detail

namespace detail {

void validate_sweep(const std::vector<double>& mus, const std::vector<double>& times, double quad_tol) {
  if (mus.empty() || times.empty()) throw std::invalid_argument("sweep grids must be non-empty");
  if (!(quad_tol > 0)) throw std::invalid_argument("quad_tol must be positive");
  for (std::size_t j = 0; j < mus.size(); ++j) {
    if (mus[j] < 0) throw std::invalid_argument("sweep drifts must be >= 0");
    if (j > 0 && mus[j] < mus[j - 1]) throw std::invalid_argument("sweep drifts must be ascending");
  }
}

}  // namespace detail

SweepReport monotonicity_sweep_serial(double k, const std::vector<double>& mus, const std::vector<double>& times,
                                      double quad_tol) {
  detail::validate_sweep(mus, times, quad_tol);
  std::vector<std::vector<double>> tails(mus.size(), std::vector<double>(times.size()));
  for (std::size_t j = 0; j < mus.size(); ++j) {
    for (std::size_t i = 0; i < times.size(); ++i) tails[j][i] = detail::sweep_tail(k, mus[j], times[i], quad_tol);
  }
  return detail::finish_sweep(k, mus, times, quad_tol, std::move(tails));
}

EulerExitStats simulate_exit_euler_serial(const EulerExitConfig& cfg) {
  detail::validate_euler(cfg);
  EulerExitStats total;
  total.dt = cfg.dt;
  for (std::uint64_t c = 0; c < detail::chunk_count(cfg.paths); ++c) total.merge(detail::euler_chunk(cfg, c));
  return total;
}

}  // namespace ruin
