#include "ruin/decomposition.hpp"

#include <map>
#include <stdexcept>
#include <string>

#include "ruin/detail/tridiagonal.hpp"

namespace ruin {

namespace {

template <Scalar T>
DurationDist<T> point_mass(int at, int horizon) {
  DurationDist<T> d;
  d.k = at;
  d.pmf.assign(static_cast<std::size_t>(horizon) + 1, T(0));
  if (at <= horizon) {
    d.pmf[static_cast<std::size_t>(at)] = T(1);
  } else {
    d.truncation_mass = T(1);
  }
  return d;
}

template <Scalar T>
void refresh_truncation(DurationDist<T>& d) {
  T s(0);
  for (const T& v : d.pmf) s += v;
  d.truncation_mass = T(1) - s;
}

// Law of 1 + X, kept on the same horizon.
template <Scalar T>
DurationDist<T> shifted_by_one(const DurationDist<T>& d) {
  DurationDist<T> out;
  out.k = d.k + 1;
  out.pmf.assign(d.pmf.size(), T(0));
  for (std::size_t n = 1; n < d.pmf.size(); ++n) out.pmf[n] = d.pmf[n - 1];
  refresh_truncation(out);
  return out;
}

// Walk on distances 1..k-1 from 0 with outward probability `out[i]`, started
// at level `start` at time `t0`; absorbed at `target` (0 or k). Returns the law
// of the absorption time.
template <Scalar T>
DurationDist<T> level_chain_absorption(const std::vector<T>& out, int k, int start, int t0, int target,
                                       int horizon) {
  DurationDist<T> d;
  d.k = t0 + (target == 0 ? start : k - start);
  d.pmf.assign(static_cast<std::size_t>(horizon) + 1, T(0));
  std::vector<T> cur(static_cast<std::size_t>(k) + 1, T(0)), next(cur.size(), T(0));
  cur[static_cast<std::size_t>(start)] = T(1);
  for (int n = t0 + 1; n <= horizon; ++n) {
    for (auto& v : next) v = T(0);
    for (int i = 1; i < k; ++i) {
      const T& mass = cur[static_cast<std::size_t>(i)];
      if (mass == 0) continue;
      const T& a = out[static_cast<std::size_t>(i)];
      next[static_cast<std::size_t>(i + 1)] += mass * a;
      next[static_cast<std::size_t>(i - 1)] += mass * (T(1) - a);
    }
    d.pmf[static_cast<std::size_t>(n)] = next[static_cast<std::size_t>(target)];
    next[0] = T(0);
    next[static_cast<std::size_t>(k)] = T(0);
    cur.swap(next);
  }
  T alive(0);
  for (const T& v : cur) alive += v;
  d.truncation_mass = alive;
  return d;
}

template <Scalar T>
std::vector<T> cumulative(const std::vector<T>& v) {
  std::vector<T> out(v.size());
  T s(0);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (s += v[i]);
  return out;
}

// G = head_weight * H + tail_weight * (W * G) on {0..horizon}, W(0) = 0.
template <Scalar T>
std::vector<T> compound_solve(const std::vector<T>& head, const std::vector<T>& w, const T& tail_weight) {
  std::vector<T> g(head.size(), T(0));
  for (std::size_t n = 0; n < g.size(); ++n) {
    T acc = head[n];
    for (std::size_t j = 1; j <= n; ++j) {
      if (w[j] == 0) continue;
      const T& gj = g[n - j];
      if (gj == 0) continue;
      acc += tail_weight * w[j] * gj;
    }
    g[n] = acc;
  }
  return g;
}

template <Scalar T>
T max_abs_diff(const DurationDist<T>& a, const DurationDist<T>& b) {
  T worst(0);
  const int h = std::min(a.horizon(), b.horizon());
  for (int n = 0; n <= h; ++n) {
    T diff = abs_value(T(a.prob(n) - b.prob(n)));
    if (diff > worst) worst = diff;
  }
  return worst;
}

}  // namespace

template <Scalar T>
T ConditionedChain<T>::u(int level) const {
  if (level == 0 || level >= k || level <= -k) throw std::out_of_range("level outside the conditioned chain");
  if (level > 0) return up[static_cast<std::size_t>(level)];
  return T(1) - up[static_cast<std::size_t>(-level)];
}

template <Scalar T>
T ConditionedChain<T>::recursion_residual(int i) const {
  if (i < 1 || i > k - 2) throw std::out_of_range("recursion holds for 1 <= i <= k-2");
  const T& ui = up[static_cast<std::size_t>(i)];
  const T& next = up[static_cast<std::size_t>(i + 1)];
  return ui - (p * (T(1) - p) + next * ui);
}

template <Scalar T>
ConditionedChain<T> conditioned_chain(const WalkParams<T>& w) {
  w.validate();
  ConditionedChain<T> c;
  c.k = w.k;
  c.p = w.p;
  if (w.k < 2) return c;
  c.up.assign(static_cast<std::size_t>(w.k), T(0));
  const T pq = w.p * w.q();
  for (int i = w.k - 2; i >= 1; --i) {
    c.up[static_cast<std::size_t>(i)] = pq / (T(1) - c.up[static_cast<std::size_t>(i + 1)]);
  }
  return c;
}

template <Scalar T>
std::vector<T> hit_zero_first(const WalkParams<T>& w) {
  w.validate();
  const int k = w.k;
  std::vector<T> h(static_cast<std::size_t>(k) + 1, T(0));
  h[0] = T(1);
  if (k < 2) return h;
  const std::size_t m = static_cast<std::size_t>(k - 1);
  std::vector<T> lower(m, T(-w.q())), diag(m, T(1)), upper(m, T(-w.p)), rhs(m, T(0));
  rhs[0] = w.q();
  auto x = detail::solve_tridiagonal(lower, diag, upper, rhs);
  for (std::size_t i = 0; i < m; ++i) h[i + 1] = x[i];
  return h;
}

template <Scalar T>
T return_prob(const WalkParams<T>& w) {
  w.validate();
  if (w.k < 2) return T(0);
  auto up_side = hit_zero_first(w);
  auto down_side = hit_zero_first(WalkParams<T>{w.q(), w.k});
  return w.p * up_side[1] + w.q() * down_side[1];
}

template <Scalar T>
DurationDist<T> conditioned_return_time(const ConditionedChain<T>& chain, int start, int horizon) {
  if (chain.empty()) throw std::invalid_argument("conditioned chain is empty for k = 1");
  if (start < 1 || start >= chain.k) throw std::out_of_range("start level must lie in 1..k-1");
  if (horizon < 0) throw std::invalid_argument("horizon must be non-negative");
  return level_chain_absorption(chain.up, chain.k, start, 0, 0, horizon);
}

template <Scalar T>
std::pair<std::optional<DurationDist<T>>, std::optional<DurationDist<T>>> conditioned_exit_by_side(
    const WalkParams<T>& w, int horizon) {
  w.validate();
  if (horizon < w.k) throw std::invalid_argument("horizon must be at least k");
  std::pair<std::optional<DurationDist<T>>, std::optional<DurationDist<T>>> sides;
  if (w.k == 1) {
    if (w.p > 0) sides.first = point_mass<T>(1, horizon);
    if (w.q() > 0) sides.second = point_mass<T>(1, horizon);
    return sides;
  }
  // Doob h-transform with g(i) = P_i(reach distance k before 0) on each side.
  auto side_law = [&](const T& outward) -> std::optional<DurationDist<T>> {
    auto to_zero = hit_zero_first(WalkParams<T>{outward, w.k});
    std::vector<T> g(to_zero.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = T(1) - to_zero[i];
    if (outward == 0 || g[1] == 0) return std::nullopt;
    std::vector<T> out(g.size(), T(0));
    for (int i = 1; i < w.k; ++i) {
      out[static_cast<std::size_t>(i)] = outward * g[static_cast<std::size_t>(i + 1)] / g[static_cast<std::size_t>(i)];
    }
    return level_chain_absorption(out, w.k, 1, 1, w.k, horizon);
  };
  sides.first = side_law(w.p);
  sides.second = side_law(w.q());
  return sides;
}

template <Scalar T>
std::pair<std::optional<DurationDist<T>>, DurationDist<T>> conditioned_component_dists(
    const ConditionedChain<T>& chain, int horizon) {
  const WalkParams<T> w{chain.p, chain.k};
  w.validate();
  if (horizon < w.k) throw std::invalid_argument("horizon must be at least k");

  std::optional<DurationDist<T>> dist_y;
  if (!chain.empty() && return_prob(w) > 0) {
    // Y = 1 + (time from level 1 back to 0); the law from -1 is the same.
    dist_y = shifted_by_one(conditioned_return_time(chain, 1, horizon));
    dist_y->k = 2;
  }

  // First-step split of the walk that reaches +-k before returning to 0.
  T weight_up(0), weight_down(0);
  if (w.k == 1) {
    weight_up = w.p;
    weight_down = w.q();
  } else {
    weight_up = w.p * (T(1) - hit_zero_first(w)[1]);
    weight_down = w.q() * (T(1) - hit_zero_first(WalkParams<T>{w.q(), w.k})[1]);
  }
  auto [up_side, down_side] = conditioned_exit_by_side(w, horizon);
  DurationDist<T> dist_z;
  dist_z.k = w.k;
  dist_z.pmf.assign(static_cast<std::size_t>(horizon) + 1, T(0));
  const T total = weight_up + weight_down;
  for (int n = 0; n <= horizon; ++n) {
    T v(0);
    if (up_side) v += weight_up * up_side->prob(n);
    if (down_side) v += weight_down * down_side->prob(n);
    dist_z.pmf[static_cast<std::size_t>(n)] = v / total;
  }
  refresh_truncation(dist_z);
  return {std::move(dist_y), std::move(dist_z)};
}

template <Scalar T>
GeometricDecomposition<T> geometric_decomposition(const WalkParams<T>& w, int horizon) {
  GeometricDecomposition<T> g;
  g.k = w.k;
  g.p = w.p;
  g.return_prob = return_prob(w);
  auto [y, z] = conditioned_component_dists(conditioned_chain(w), horizon);
  g.dist_Y = std::move(y);
  g.dist_Z = std::move(z);
  return g;
}

template <Scalar T>
DurationDist<T> convolve(const DurationDist<T>& a, const DurationDist<T>& b, int horizon) {
  DurationDist<T> c;
  c.k = a.k + b.k;
  c.pmf.assign(static_cast<std::size_t>(horizon) + 1, T(0));
  for (int i = 0; i <= std::min(horizon, a.horizon()); ++i) {
    const T& ai = a.pmf[static_cast<std::size_t>(i)];
    if (ai == 0) continue;
    for (int j = 0; i + j <= horizon && j <= b.horizon(); ++j) {
      const T& bj = b.pmf[static_cast<std::size_t>(j)];
      if (bj == 0) continue;
      c.pmf[static_cast<std::size_t>(i + j)] += ai * bj;
    }
  }
  refresh_truncation(c);
  return c;
}

template <Scalar T>
DurationDist<T> reconstruct_geometric(const WalkParams<T>& w, int horizon) {
  auto g = geometric_decomposition(w, horizon);
  if (!g.dist_Y) return g.dist_Z;
  // Law of Y_1 + ... + Y_{N-1}: G = s*delta_0 + r*(Y * G).
  std::vector<T> head(static_cast<std::size_t>(horizon) + 1, T(0));
  head[0] = g.success_prob();
  DurationDist<T> sum_y;
  sum_y.k = 0;
  sum_y.pmf = compound_solve(head, g.dist_Y->pmf, g.return_prob);
  refresh_truncation(sum_y);
  auto t = convolve(g.dist_Z, sum_y, horizon);
  t.k = w.k;
  return t;
}

SubgameSchedule subgame_schedule(int k, int n_max) {
  if (k < 2) throw std::invalid_argument("the subgame decomposition needs k > 1");
  if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  SubgameSchedule s;
  s.k = k;
  s.y.assign(static_cast<std::size_t>(n_max) + 1, 0);
  s.d.assign(static_cast<std::size_t>(n_max) + 1, 0);
  std::map<int, int> first_seen;
  for (int i = 1; i <= n_max; ++i) {
    const int prev = s.y[static_cast<std::size_t>(i - 1)];
    int& d = s.d[static_cast<std::size_t>(i)];
    int& y = s.y[static_cast<std::size_t>(i)];
    if (prev > 0) {
      d = k - prev;
      y = std::abs(prev - d);
    } else {
      d = 1;
      y = 1;
    }
    if (s.cycle_length == 0) {
      auto [it, inserted] = first_seen.emplace(y, i);
      if (!inserted) {
        s.cycle_start = it->second;
        s.cycle_length = i - it->second;
      }
    }
  }
  return s;
}

template <Scalar T>
HazardSchedule<T> hazard_rates(const WalkParams<T>& w, int n_max) {
  w.validate();
  HazardSchedule<T> h;
  h.schedule = subgame_schedule(w.k, n_max);
  h.r.assign(static_cast<std::size_t>(n_max) + 1, T(0));
  std::map<int, T> pi;
  auto pi_of = [&](int size) -> const T& {
    auto it = pi.find(size);
    if (it == pi.end()) it = pi.emplace(size, win_prob(WalkParams<T>{w.p, size})).first;
    return it->second;
  };
  for (int n = 1; n <= n_max; ++n) {
    const int prev = h.schedule.y[static_cast<std::size_t>(n - 1)];
    if (prev == 0) continue;
    const T& a = pi_of(prev);
    const T& b = pi_of(h.schedule.d[static_cast<std::size_t>(n)]);
    h.r[static_cast<std::size_t>(n)] = a * b + (T(1) - a) * (T(1) - b);
  }
  return h;
}

namespace {

template <Scalar T>
DurationDist<T> subgame_law(const WalkParams<T>& w, int horizon, std::map<int, DurationDist<T>>& memo) {
  if (w.k == 1) return point_mass<T>(1, horizon);
  if (auto it = memo.find(w.k); it != memo.end()) return it->second;

  const auto hz = hazard_rates(w, horizon);
  DurationDist<T> law;
  law.k = w.k;
  law.pmf.assign(static_cast<std::size_t>(horizon) + 1, T(0));
  DurationDist<T> elapsed = point_mass<T>(0, horizon);  // law of tau after n-1 games
  T alive(1);                                          // P(N >= n)
  for (int n = 1; n <= horizon && alive != 0; ++n) {
    const int size = hz.schedule.d[static_cast<std::size_t>(n)];
    elapsed = convolve(elapsed, subgame_law(WalkParams<T>{w.p, size}, horizon, memo), horizon);
    const T& r = hz.r[static_cast<std::size_t>(n)];
    if (r != 0) {
      const T stop = r * alive;
      for (int m = 0; m <= horizon; ++m) {
        const T& e = elapsed.pmf[static_cast<std::size_t>(m)];
        if (e != 0) law.pmf[static_cast<std::size_t>(m)] += stop * e;
      }
    }
    alive *= T(1) - r;
  }
  refresh_truncation(law);
  memo.emplace(w.k, law);
  return law;
}

}  // namespace

template <Scalar T>
DurationDist<T> reconstruct_subgame(const WalkParams<T>& w, int horizon) {
  w.validate();
  if (horizon < w.k) throw std::invalid_argument("horizon must be at least k");
  std::map<int, DurationDist<T>> memo;
  return subgame_law(w, horizon, memo);
}

template <Scalar T>
EvenKReport<T> even_k_geometric_check(const WalkParams<T>& w, int horizon) {
  w.validate();
  if (w.k % 2 != 0) throw std::invalid_argument("even-k decomposition needs an even barrier");
  if (horizon < w.k) throw std::invalid_argument("horizon must be at least k");
  const WalkParams<T> half{w.p, w.k / 2};
  EvenKReport<T> rep;
  rep.k = w.k;
  rep.half_win = win_prob(half);
  rep.success_prob = rep.half_win * rep.half_win + (T(1) - rep.half_win) * (T(1) - rep.half_win);

  const auto half_law = duration_pmf(half, horizon);
  const auto pair = convolve(half_law, half_law, horizon);
  std::vector<T> head(pair.pmf.size());
  for (std::size_t n = 0; n < head.size(); ++n) head[n] = rep.success_prob * pair.pmf[n];
  rep.reconstructed.k = w.k;
  rep.reconstructed.pmf = compound_solve(head, pair.pmf, T(T(1) - rep.success_prob));
  refresh_truncation(rep.reconstructed);
  rep.max_deviation = max_abs_diff(rep.reconstructed, duration_pmf(w, horizon));
  return rep;
}

PiMonotonicityReport pi_monotonicity_check(int k, const std::vector<Rational>& grid) {
  PiMonotonicityReport rep;
  rep.k = k;
  rep.grid = grid;
  for (const auto& p : grid) {
    if (p < 0 || p > Rational(1, 2)) throw std::invalid_argument("grid must lie within [0, 1/2]");
    rep.values.push_back(win_prob(WalkParams<Rational>{p, k}));
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1] && rep.values[i] > rep.values[i - 1])) rep.strictly_increasing = false;
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] == 0 && rep.values[i] != 0) rep.endpoints_ok = false;
    if (grid[i] == Rational(1, 2) && rep.values[i] != Rational(1, 2)) rep.endpoints_ok = false;
  }
  return rep;
}

#define RUIN_INSTANTIATE(T)                                                                              \
  template struct ConditionedChain<T>;                                                                   \
  template ConditionedChain<T> conditioned_chain(const WalkParams<T>&);                                  \
  template std::vector<T> hit_zero_first(const WalkParams<T>&);                                          \
  template T return_prob(const WalkParams<T>&);                                                          \
  template DurationDist<T> conditioned_return_time(const ConditionedChain<T>&, int, int);                \
  template std::pair<std::optional<DurationDist<T>>, std::optional<DurationDist<T>>>                     \
  conditioned_exit_by_side(const WalkParams<T>&, int);                                                   \
  template std::pair<std::optional<DurationDist<T>>, DurationDist<T>> conditioned_component_dists(       \
      const ConditionedChain<T>&, int);                                                                  \
  template GeometricDecomposition<T> geometric_decomposition(const WalkParams<T>&, int);                 \
  template DurationDist<T> reconstruct_geometric(const WalkParams<T>&, int);                             \
  template HazardSchedule<T> hazard_rates(const WalkParams<T>&, int);                                    \
  template DurationDist<T> reconstruct_subgame(const WalkParams<T>&, int);                               \
  template EvenKReport<T> even_k_geometric_check(const WalkParams<T>&, int);                             \
  template DurationDist<T> convolve(const DurationDist<T>&, const DurationDist<T>&, int);

RUIN_INSTANTIATE(double)
RUIN_INSTANTIATE(Rational)

#undef RUIN_INSTANTIATE

}  // namespace ruin
