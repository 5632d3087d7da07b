#include <omp.h>

#include <algorithm>
#include <exception>
#include <vector>

#include "ruin/brownian.hpp"

namespace ruin {

SweepReport monotonicity_sweep(double k, const std::vector<double>& mus, const std::vector<double>& times,
                               double quad_tol, int workers) {
  detail::validate_sweep(mus, times, quad_tol);
  const long long cells = static_cast<long long>(mus.size() * times.size());
  std::vector<std::vector<double>> tails(mus.size(), std::vector<double>(times.size()));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cells));
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, workers))
  for (long long c = 0; c < cells; ++c) {
    const auto j = static_cast<std::size_t>(c) / times.size();
    const auto i = static_cast<std::size_t>(c) % times.size();
    try {
      tails[j][i] = detail::sweep_tail(k, mus[j], times[i], quad_tol);
    } catch (...) {
      errors[static_cast<std::size_t>(c)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return detail::finish_sweep(k, mus, times, quad_tol, std::move(tails));
}

EulerExitStats simulate_exit_euler(const EulerExitConfig& cfg) {
  detail::validate_euler(cfg);
  const auto chunks = static_cast<long long>(detail::chunk_count(cfg.paths));
  std::vector<EulerExitStats> parts(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, cfg.workers))
  for (long long c = 0; c < chunks; ++c) parts[static_cast<std::size_t>(c)] = detail::euler_chunk(cfg, static_cast<std::uint64_t>(c));
  EulerExitStats total;
  total.dt = cfg.dt;
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace ruin
