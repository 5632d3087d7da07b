#include <omp.h>

#include <algorithm>
#include <exception>
#include <vector>

#include "ruin/simulation.hpp"

namespace ruin {

namespace {

// Runs `chunk_fn(c)` for every chunk on `workers` threads, then merges the
// per-chunk results in chunk order.
template <typename Stats, typename ChunkFn>
Stats run_chunked(std::uint64_t trials, int workers, ChunkFn chunk_fn) {
  const auto chunks = static_cast<long long>(detail::chunk_count(trials));
  std::vector<Stats> parts(static_cast<std::size_t>(chunks));
  std::vector<std::exception_ptr> errors(parts.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, workers))
  for (long long c = 0; c < chunks; ++c) {
    try {
      parts[static_cast<std::size_t>(c)] = chunk_fn(static_cast<std::uint64_t>(c));
    } catch (...) {
      errors[static_cast<std::size_t>(c)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  Stats total;
  for (const auto& part : parts) total.merge(part);
  return total;
}

}  // namespace

CoupledRunStats run_coupled(const CoupledRunConfig& cfg) {
  const auto setup = detail::prepare_coupled(cfg, false);
  return run_chunked<CoupledRunStats>(cfg.trials, cfg.workers,
                                      [&](std::uint64_t c) { return detail::coupled_chunk(setup, cfg, c); });
}

CoupledRunStats run_coupled_duration(const CoupledRunConfig& cfg) {
  const auto setup = detail::prepare_coupled(cfg, true);
  return run_chunked<CoupledRunStats>(cfg.trials, cfg.workers,
                                      [&](std::uint64_t c) { return detail::coupled_duration_chunk(setup, cfg, c); });
}

WalkRunStats run_walks(const WalkRunConfig& cfg) {
  cfg.params.validate();
  return run_chunked<WalkRunStats>(cfg.trials, cfg.workers, [&](std::uint64_t c) { return detail::walk_chunk(cfg, c); });
}

}  // namespace ruin
