// Serial reference runners; the OpenMP versions must reproduce these exactly.
#include "ruin/simulation.hpp"

namespace ruin {

CoupledRunStats run_coupled_serial(const CoupledRunConfig& cfg) {
  const auto setup = detail::prepare_coupled(cfg, false);
  CoupledRunStats total;
  for (std::uint64_t c = 0; c < detail::chunk_count(cfg.trials); ++c) total.merge(detail::coupled_chunk(setup, cfg, c));
  return total;
}

CoupledRunStats run_coupled_duration_serial(const CoupledRunConfig& cfg) {
  const auto setup = detail::prepare_coupled(cfg, true);
  CoupledRunStats total;
  for (std::uint64_t c = 0; c < detail::chunk_count(cfg.trials); ++c) {
    total.merge(detail::coupled_duration_chunk(setup, cfg, c));
  }
  return total;
}

WalkRunStats run_walks_serial(const WalkRunConfig& cfg) {
  cfg.params.validate();
  WalkRunStats total;
  for (std::uint64_t c = 0; c < detail::chunk_count(cfg.trials); ++c) total.merge(detail::walk_chunk(cfg, c));
  return total;
}

}  // namespace ruin
