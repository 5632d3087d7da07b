#include "ruin/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ruin {

WalkOutcome simulate_walk(const WalkParams<double>& w, RngStream& rng, std::int64_t step_cap) {
  w.validate();
  std::int64_t level = 0, steps = 0;
  while (level < w.k && level > -w.k) {
    if (steps >= step_cap) throw ResourceLimitError("simulate_walk: step cap reached", static_cast<double>(steps));
    level += rng.uniform() < w.p ? 1 : -1;
    ++steps;
  }
  return {steps, level > 0 ? 1 : -1};
}

CoupledDraw simulate_conditioned_coupled(const ConditionedChain<double>& low, const ConditionedChain<double>& high,
                                         int start, RngStream& rng, std::int64_t step_cap) {
  if (low.k != high.k) throw std::invalid_argument("coupled walks need the same barrier");
  if (low.empty()) throw std::invalid_argument("no conditioned chain for k = 1");
  if (start < 1 || start >= low.k) throw std::out_of_range("start level must lie in 1..k-1");
  if (!(low.p <= high.p && high.p <= 0.5)) throw std::invalid_argument("coupling needs p <= p' <= 1/2");

  const auto& ul = low.up;
  const auto& uh = high.up;
  int a = start, b = start;
  CoupledDraw out;
  while (a > 0 || b > 0) {
    if (out.y_prime >= step_cap) {
      throw ResourceLimitError("simulate_conditioned_coupled: step cap reached", static_cast<double>(out.y_prime));
    }
    if (a > 0 && a == b) {
      // Shared uniform: u_low(a) <= u_high(a), so an up-step of the p-walk
      // forces an up-step of the p'-walk.
      const double u = rng.uniform();
      a += u < ul[static_cast<std::size_t>(a)] ? 1 : -1;
      b += u < uh[static_cast<std::size_t>(b)] ? 1 : -1;
      ++out.y;
      ++out.y_prime;
    } else {
      if (a > 0) {
        a += rng.uniform() < ul[static_cast<std::size_t>(a)] ? 1 : -1;
        ++out.y;
      }
      if (b > 0) {
        b += rng.uniform() < uh[static_cast<std::size_t>(b)] ? 1 : -1;
        ++out.y_prime;
      }
    }
    if (a > b) out.path_ordered = false;
  }
  return out;
}

CoupledDraw simulate_conditioned_coupled(double p, double p_prime, int k, int start, RngStream& rng) {
  return simulate_conditioned_coupled(conditioned_chain(WalkParams<double>{p, k}),
                                      conditioned_chain(WalkParams<double>{p_prime, k}), start, rng);
}

CoupledDraw simulate_coupled_duration(const ConditionedChain<double>& low, const ConditionedChain<double>& high,
                                      double return_low, double return_high, RngStream& rng) {
  if (low.k == 1) return {1, 1, true};
  if (!(return_low <= return_high)) throw std::invalid_argument("return probabilities out of order");
  CoupledDraw total;
  // Z = 1 + Y_{k-1} in law.
  auto z = simulate_conditioned_coupled(low, high, low.k - 1, rng);
  total.y = 1 + z.y;
  total.y_prime = 1 + z.y_prime;
  total.path_ordered = z.path_ordered;
  bool low_alive = true;
  while (true) {
    const double u = rng.uniform();
    const bool low_returns = low_alive && u < return_low;
    const bool high_returns = u < return_high;
    if (!high_returns) break;
    auto y = simulate_conditioned_coupled(low, high, 1, rng);
    if (low_returns) total.y += 1 + y.y;
    total.y_prime += 1 + y.y_prime;
    total.path_ordered = total.path_ordered && y.path_ordered;
    low_alive = low_returns;
  }
  return total;
}

void Histogram::add(std::int64_t value) {
  if (value < 0) throw std::invalid_argument("histogram values must be non-negative");
  const auto idx = static_cast<std::size_t>(value);
  if (idx >= counts_.size()) counts_.resize(idx + 1, 0);
  ++counts_[idx];
  ++total_;
}

void Histogram::merge(const Histogram& other) {
  if (other.counts_.size() > counts_.size()) counts_.resize(other.counts_.size(), 0);
  for (std::size_t i = 0; i < other.counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
}

std::uint64_t Histogram::count(std::int64_t value) const {
  if (value < 0 || static_cast<std::size_t>(value) >= counts_.size()) return 0;
  return counts_[static_cast<std::size_t>(value)];
}

double Histogram::ecdf(std::int64_t t) const {
  if (total_ == 0 || t < 0) return 0.0;
  std::uint64_t below = 0;
  const auto last = std::min<std::size_t>(static_cast<std::size_t>(t) + 1, counts_.size());
  for (std::size_t i = 0; i < last; ++i) below += counts_[i];
  return static_cast<double>(below) / static_cast<double>(total_);
}

void CoupledRunStats::merge(const CoupledRunStats& other) {
  trials += other.trials;
  ordering_violations += other.ordering_violations;
  low.merge(other.low);
  high.merge(other.high);
  sum_low += other.sum_low;
  sum_high += other.sum_high;
}

double WalkRunStats::duration_winner_correlation() const {
  if (trials < 2) return 0.0;
  const double n = static_cast<double>(trials);
  const double mean_d = sum_duration / n;
  const double mean_w = wins_plus / n;
  const double cov = sum_duration_plus / n - mean_d * mean_w;
  const double var_d = sum_duration_sq / n - mean_d * mean_d;
  const double var_w = mean_w * (1.0 - mean_w);
  if (var_d <= 0 || var_w <= 0) return 0.0;
  return cov / std::sqrt(var_d * var_w);
}

void WalkRunStats::merge(const WalkRunStats& other) {
  trials += other.trials;
  wins_plus += other.wins_plus;
  durations.merge(other.durations);
  sum_duration += other.sum_duration;
  sum_duration_sq += other.sum_duration_sq;
  sum_duration_plus += other.sum_duration_plus;
}

double dkw_band(std::uint64_t n, double alpha) {
  if (n == 0) return 1.0;
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

DominanceReport dominance_from_histograms(const Histogram& low, const Histogram& high, double confidence) {
  if (!(confidence > 0 && confidence < 1)) throw std::invalid_argument("confidence must lie in (0,1)");
  DominanceReport rep;
  rep.confidence = confidence;
  rep.trials = std::min(low.total(), high.total());
  const double alpha = 1.0 - confidence;
  const double band_low = dkw_band(low.total(), alpha);
  const double band_high = dkw_band(high.total(), alpha);
  rep.band = std::max(band_low, band_high);
  const std::int64_t top = std::max(low.max_value(), high.max_value());
  for (std::int64_t t = 0; t <= top; ++t) {
    rep.ecdf_low.push_back(low.ecdf(t));
    rep.ecdf_high.push_back(high.ecdf(t));
    if (rep.ecdf_low.back() + band_low < rep.ecdf_high.back() - band_high) {
      if (rep.dominance_holds) rep.first_violation = t;
      rep.dominance_holds = false;
    }
  }
  return rep;
}

DominanceReport empirical_dominance(const WalkParams<double>& low, const WalkParams<double>& high,
                                    std::uint64_t trials, double confidence, std::uint64_t seed, int workers) {
  low.validate();
  high.validate();
  if (low.k != high.k) throw std::invalid_argument("dominance compares walks with the same barrier");
  if (!(low.p <= high.p && high.p <= 0.5)) throw std::invalid_argument("dominance needs p_low <= p_high <= 1/2");
  // Distinct seeds keep the two samples independent.
  auto lo = run_walks({low, trials, seed, workers});
  auto hi = run_walks({high, trials, seed ^ 0x9e3779b97f4a7c15ULL, workers});
  auto rep = dominance_from_histograms(lo.durations, hi.durations, confidence);
  rep.k = low.k;
  rep.p_low = low.p;
  rep.p_high = high.p;
  return rep;
}

namespace detail {

CoupledSetup prepare_coupled(const CoupledRunConfig& cfg, bool need_return_probs) {
  if (!(cfg.p >= 0 && cfg.p <= cfg.p_prime && cfg.p_prime <= 0.5)) {
    throw std::invalid_argument("coupling needs 0 <= p <= p' <= 1/2");
  }
  CoupledSetup s;
  s.low = conditioned_chain(WalkParams<double>{cfg.p, cfg.k});
  s.high = conditioned_chain(WalkParams<double>{cfg.p_prime, cfg.k});
  if (need_return_probs) {
    s.return_low = return_prob(WalkParams<double>{cfg.p, cfg.k});
    s.return_high = return_prob(WalkParams<double>{cfg.p_prime, cfg.k});
    // Equal parameters must give equal thresholds bit for bit.
    if (cfg.p == cfg.p_prime) s.return_high = s.return_low;
  } else if (cfg.start < 1 || cfg.start >= cfg.k) {
    throw std::out_of_range("start level must lie in 1..k-1");
  }
  return s;
}

std::uint64_t chunk_count(std::uint64_t trials) { return (trials + kChunkTrials - 1) / kChunkTrials; }

std::uint64_t chunk_trials(std::uint64_t trials, std::uint64_t chunk) {
  return std::min(kChunkTrials, trials - chunk * kChunkTrials);
}

CoupledRunStats coupled_chunk(const CoupledSetup& s, const CoupledRunConfig& cfg, std::uint64_t chunk) {
  RngStream rng(cfg.seed, chunk);
  CoupledRunStats st;
  const auto n = chunk_trials(cfg.trials, chunk);
  for (std::uint64_t t = 0; t < n; ++t) {
    auto d = simulate_conditioned_coupled(s.low, s.high, cfg.start, rng);
    ++st.trials;
    if (d.y > d.y_prime || !d.path_ordered) ++st.ordering_violations;
    st.low.add(d.y);
    st.high.add(d.y_prime);
    st.sum_low += static_cast<std::uint64_t>(d.y);
    st.sum_high += static_cast<std::uint64_t>(d.y_prime);
  }
  return st;
}

CoupledRunStats coupled_duration_chunk(const CoupledSetup& s, const CoupledRunConfig& cfg, std::uint64_t chunk) {
  RngStream rng(cfg.seed, chunk);
  CoupledRunStats st;
  const auto n = chunk_trials(cfg.trials, chunk);
  for (std::uint64_t t = 0; t < n; ++t) {
    auto d = simulate_coupled_duration(s.low, s.high, s.return_low, s.return_high, rng);
    ++st.trials;
    if (d.y > d.y_prime || !d.path_ordered) ++st.ordering_violations;
    st.low.add(d.y);
    st.high.add(d.y_prime);
    st.sum_low += static_cast<std::uint64_t>(d.y);
    st.sum_high += static_cast<std::uint64_t>(d.y_prime);
  }
  return st;
}

WalkRunStats walk_chunk(const WalkRunConfig& cfg, std::uint64_t chunk) {
  RngStream rng(cfg.seed, chunk);
  WalkRunStats st;
  const auto n = chunk_trials(cfg.trials, chunk);
  for (std::uint64_t t = 0; t < n; ++t) {
    auto o = simulate_walk(cfg.params, rng);
    const auto d = static_cast<std::uint64_t>(o.duration);
    ++st.trials;
    st.durations.add(o.duration);
    st.sum_duration += d;
    st.sum_duration_sq += d * d;
    if (o.winner > 0) {
      ++st.wins_plus;
      st.sum_duration_plus += d;
    }
  }
  return st;
}

}  // namespace detail

}  // namespace ruin
