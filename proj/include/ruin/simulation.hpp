// Monte Carlo engine: plain walks, the monotone coupling of conditioned return
// times, and empirical stochastic-dominance checks.
//
// Trials are cut into fixed-size chunks; chunk c always draws from
// RngStream(seed, c). Aggregates are integer counts merged in chunk order, so
// the serial reference and the OpenMP runners agree bit for bit for any
// worker count.
#pragma once

#include <cstdint>
#include <vector>

#include "ruin/decomposition.hpp"
#include "ruin/rng.hpp"
#include "ruin/walk.hpp"

namespace ruin {

inline constexpr std::int64_t kDefaultStepCap = 1'000'000'000;
inline constexpr std::uint64_t kChunkTrials = 4096;

struct WalkOutcome {
  std::int64_t duration = 0;
  int winner = 0;  // +1 for +k, -1 for -k
};

WalkOutcome simulate_walk(const WalkParams<double>& w, RngStream& rng, std::int64_t step_cap = kDefaultStepCap);

struct CoupledDraw {
  std::int64_t y = 0;
  std::int64_t y_prime = 0;
  bool path_ordered = true;  // the p'-walk never sat strictly below the p-walk
};

/// One draw of (Y_start(p), Y_start(p')) for the walks conditioned to return
/// to 0 before +-k. Same level: one uniform against both thresholds, so the
/// p'-walk steps up whenever the p-walk does. Different levels: independent
/// uniforms. Requires low.p <= high.p <= 1/2.
CoupledDraw simulate_conditioned_coupled(const ConditionedChain<double>& low, const ConditionedChain<double>& high,
                                         int start, RngStream& rng, std::int64_t step_cap = kDefaultStepCap);

CoupledDraw simulate_conditioned_coupled(double p, double p_prime, int k, int start, RngStream& rng);

/// Coupled draw of (T(p), T(p')) assembled from coupled components: the number
/// of returns through shared uniforms, Z as 1 + Y_{k-1}, each Y as 1 + Y_1.
CoupledDraw simulate_coupled_duration(const ConditionedChain<double>& low, const ConditionedChain<double>& high,
                                      double return_low, double return_high, RngStream& rng);

class Histogram {
 public:
  void add(std::int64_t value);
  void merge(const Histogram& other);
  std::uint64_t total() const { return total_; }
  std::uint64_t count(std::int64_t value) const;
  std::int64_t max_value() const { return static_cast<std::int64_t>(counts_.size()) - 1; }
  /// Fraction of samples <= t.
  double ecdf(std::int64_t t) const;
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  bool operator==(const Histogram&) const = default;

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

struct CoupledRunConfig {
  double p = 0.5;
  double p_prime = 0.5;
  int k = 2;
  int start = 1;  // start level for conditioned return times; ignored for durations
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct CoupledRunStats {
  std::uint64_t trials = 0;
  std::uint64_t ordering_violations = 0;
  Histogram low, high;
  std::uint64_t sum_low = 0, sum_high = 0;

  double mean_low() const { return trials ? static_cast<double>(sum_low) / trials : 0.0; }
  double mean_high() const { return trials ? static_cast<double>(sum_high) / trials : 0.0; }
  void merge(const CoupledRunStats& other);
  bool operator==(const CoupledRunStats&) const = default;
};

struct WalkRunConfig {
  WalkParams<double> params{0.5, 1};
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct WalkRunStats {
  std::uint64_t trials = 0;
  std::uint64_t wins_plus = 0;
  Histogram durations;
  std::uint64_t sum_duration = 0;
  std::uint64_t sum_duration_sq = 0;
  std::uint64_t sum_duration_plus = 0;  // sum of durations of +k exits

  double mean() const { return trials ? static_cast<double>(sum_duration) / trials : 0.0; }
  double win_frequency() const { return trials ? static_cast<double>(wins_plus) / trials : 0.0; }
  /// Sample correlation between the duration and the indicator of a +k exit.
  double duration_winner_correlation() const;
  void merge(const WalkRunStats& other);
  bool operator==(const WalkRunStats&) const = default;
};

// Serial reference runners.
CoupledRunStats run_coupled_serial(const CoupledRunConfig& cfg);
CoupledRunStats run_coupled_duration_serial(const CoupledRunConfig& cfg);
WalkRunStats run_walks_serial(const WalkRunConfig& cfg);

// OpenMP runners (cfg.workers threads); identical results to the serial ones.
CoupledRunStats run_coupled(const CoupledRunConfig& cfg);
CoupledRunStats run_coupled_duration(const CoupledRunConfig& cfg);
WalkRunStats run_walks(const WalkRunConfig& cfg);

/// DKW half-width for n samples at miscoverage alpha.
double dkw_band(std::uint64_t n, double alpha);

struct DominanceReport {
  int k = 1;
  double p_low = 0, p_high = 0;
  std::uint64_t trials = 0;
  double confidence = 0.99;
  double band = 0;
  std::vector<double> ecdf_low, ecdf_high;  // index t = 0..max observed duration
  bool dominance_holds = true;              // no t with ecdf_low(t) + band < ecdf_high(t) - band
  long first_violation = -1;

  double tail_low(std::size_t t) const { return t < ecdf_low.size() ? 1.0 - ecdf_low[t] : 0.0; }
  double tail_high(std::size_t t) const { return t < ecdf_high.size() ? 1.0 - ecdf_high[t] : 0.0; }
};

/// Simulates both walks and checks T(low) <=_st T(high) within DKW bands.
DominanceReport empirical_dominance(const WalkParams<double>& low, const WalkParams<double>& high,
                                    std::uint64_t trials, double confidence, std::uint64_t seed, int workers = 1);

/// Compares two coupled-run histograms the same way (low should be dominated).
DominanceReport dominance_from_histograms(const Histogram& low, const Histogram& high, double confidence);

namespace detail {

// Per-chunk kernels shared by the serial and OpenMP runners.
struct CoupledSetup {
  ConditionedChain<double> low, high;
  double return_low = 0, return_high = 0;
};

CoupledSetup prepare_coupled(const CoupledRunConfig& cfg, bool need_return_probs);
std::uint64_t chunk_count(std::uint64_t trials);
std::uint64_t chunk_trials(std::uint64_t trials, std::uint64_t chunk);
CoupledRunStats coupled_chunk(const CoupledSetup& s, const CoupledRunConfig& cfg, std::uint64_t chunk);
CoupledRunStats coupled_duration_chunk(const CoupledSetup& s, const CoupledRunConfig& cfg, std::uint64_t chunk);
WalkRunStats walk_chunk(const WalkRunConfig& cfg, std::uint64_t chunk);

}  // namespace detail

}  // namespace ruin
