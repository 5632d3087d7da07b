#include "ruin/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ruin/brownian.hpp"
#include "ruin/closed_form.hpp"
#include "ruin/decomposition.hpp"
#include "ruin/io.hpp"
#include "ruin/markov_exact.hpp"
#include "ruin/simulation.hpp"

namespace ruin::cli {

namespace {

using io::Json;
using io::scalar_from_text;

// Every option of every subcommand; each subcommand binds only what it uses.
struct Args {
  std::string p, p_prime, p_grid;
  int k = 0;
  int horizon = 0;
  std::string n_grid;
  std::string n_max = "auto";
  std::string mode = "exact";
  std::string constant = "calibrated";
  std::string terms = "as-printed";
  double tail_tol = 1e-13;
  std::uint64_t trials = 100'000;
  std::uint64_t seed = 1;
  int workers = 1;
  int start = 1;
  bool full = false;
  std::string method = "exact";
  double confidence = 0.99;
  std::string mu = "0";
  double bk = 1.0;
  std::string t_grid;
  std::string h_grid = "4e-4,1e-4";
  double quad_tol = 1e-10;
  double series_tol = 1e-18;
  std::uint64_t euler_paths = 0;
  double dt = 1e-3;
  std::string format = "csv";
  std::string out;
};

struct Report {
  Json params = Json::object();
  Json summary = Json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
  std::optional<Json> document;  // replaces the generic JSON layout when set
  int status = kOk;
};

Json cell(double x) { return x; }
Json cell(const Rational& x) { return format_scalar(x); }

std::string render(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) return format_scalar(v.get<double>());
  return v.dump();
}

std::string to_csv(const Report& r) {
  io::CsvTable t(r.columns);
  for (const auto& row : r.rows) {
    std::vector<std::string> cells;
    for (const auto& v : row) cells.push_back(render(v));
    t.add_row(std::move(cells));
  }
  return t.str();
}

std::string to_json(const std::string& command, const Report& r) {
  Json j;
  j["command"] = command;
  j["params"] = r.params;
  if (r.document) {
    for (const auto& [key, value] : r.document->items()) j[key] = value;
  } else {
    j["columns"] = r.columns;
    Json rows = Json::array();
    for (const auto& row : r.rows) rows.push_back(Json(row));
    j["rows"] = std::move(rows);
  }
  j["summary"] = r.summary;
  return j.dump(2) + "\n";
}

template <typename F>
Report with_mode(const std::string& mode, F&& f) {
  if (mode == "exact") return f.template operator()<Rational>();
  return f.template operator()<double>();
}

template <Scalar T>
bool exceeds(const T& deviation, double float_tol) {
  if constexpr (std::same_as<T, Rational>) {
    return deviation != 0;
  } else {
    return !(deviation <= float_tol);
  }
}

std::vector<int> parse_int_grid(const std::string& text) {
  std::vector<int> out;
  for (const auto& r : io::parse_rational_grid(text)) {
    if (r.get_den() != 1 || !r.get_num().fits_sint_p()) throw std::invalid_argument("step counts must be integers");
    out.push_back(static_cast<int>(r.get_num().get_si()));
  }
  return out;
}

int parse_n_max(const std::string& text) {
  auto v = parse_int_grid(text);
  if (v.size() != 1 || v[0] < 1) throw std::invalid_argument("--n-max must be a positive integer");
  return v[0];
}

// ---- markov_exact ---------------------------------------------------------

Report cmd_pmf(const Args& a) {
  return with_mode(a.mode, [&]<Scalar T>() {
    const WalkParams<T> w{scalar_from_text<T>(a.p), a.k};
    const auto d = duration_pmf(w, a.horizon);
    Report r;
    r.params = {{"p", cell(w.p)}, {"k", w.k}, {"horizon", a.horizon}, {"mode", a.mode}};
    r.columns = {"n", "prob"};
    for (int n = w.k; n <= d.horizon(); n += 2) r.rows.push_back({n, cell(d.prob(n))});
    r.document = io::dist_to_json(d);
    r.summary = {{"truncation_mass", cell(d.truncation_mass)}};
    return r;
  });
}

Report cmd_tail(const Args& a) {
  return with_mode(a.mode, [&]<Scalar T>() {
    const WalkParams<T> w{scalar_from_text<T>(a.p), a.k};
    const auto ns = parse_int_grid(a.n_grid);
    const int top = *std::max_element(ns.begin(), ns.end());
    if (*std::min_element(ns.begin(), ns.end()) < 0) throw std::invalid_argument("n must be non-negative");
    const auto d = duration_pmf(w, std::max(top, w.k));
    Report r;
    r.params = {{"p", cell(w.p)}, {"k", w.k}, {"n", a.n_grid}, {"mode", a.mode}};
    r.columns = {"n", "tail"};
    for (int n : ns) r.rows.push_back({n, cell(d.tail(n))});
    r.summary = {{"points", ns.size()}};
    return r;
  });
}

Report cmd_winprob(const Args& a) {
  return with_mode(a.mode, [&]<Scalar T>() {
    const WalkParams<T> w{scalar_from_text<T>(a.p), a.k};
    const T pi = win_prob(w);
    Report r;
    r.params = {{"p", cell(w.p)}, {"k", w.k}, {"mode", a.mode}};
    r.columns = {"p", "k", "win_prob"};
    r.rows.push_back({cell(w.p), w.k, cell(pi)});
    r.summary = {{"win_prob", cell(pi)}};
    return r;
  });
}

Report cmd_joint(const Args& a) {
  return with_mode(a.mode, [&]<Scalar T>() {
    const WalkParams<T> w{scalar_from_text<T>(a.p), a.k};
    const auto j = joint_duration_winner(w, a.horizon);
    const auto residual = j.product_residual(win_prob(w));
    Report r;
    r.params = {{"p", cell(w.p)}, {"k", w.k}, {"horizon", a.horizon}, {"mode", a.mode}};
    r.columns = {"n", "plus", "minus", "residual"};
    T worst(0);
    for (int n = w.k; n <= j.horizon(); n += 2) {
      const auto i = static_cast<std::size_t>(n);
      r.rows.push_back({n, cell(j.plus[i]), cell(j.minus[i]), cell(residual[i])});
      worst = std::max(worst, T(abs_value(residual[i])));
    }
    r.summary = {{"max_abs_residual", cell(worst)}, {"truncation_mass", cell(j.truncation_mass)}};
    if (exceeds(worst, 1e-12)) r.status = kPropertyViolated;
    return r;
  });
}

Report cmd_mean(const Args& a) {
  return with_mode(a.mode, [&]<Scalar T>() {
    const WalkParams<T> w{scalar_from_text<T>(a.p), a.k};
    const T m = expected_duration(w, a.tail_tol);
    Report r;
    r.params = {{"p", cell(w.p)}, {"k", w.k}, {"mode", a.mode}};
    if constexpr (std::same_as<T, double>) r.params["tail_tol"] = a.tail_tol;
    r.columns = {"p", "k", "mean"};
    r.rows.push_back({cell(w.p), w.k, cell(m)});
    r.summary = {{"mean", cell(m)}};
    return r;
  });
}

// ---- closed_form ----------------------------------------------------------

FellerConstant feller_constant(const std::string& s) {
  return s == "as-printed" ? FellerConstant::as_printed : FellerConstant::calibrated;
}

KarniTerms karni_terms(const std::string& s) {
  return s == "image-series" ? KarniTerms::image_series : KarniTerms::as_printed;
}

Report cmd_feller(const Args& a) {
  const WalkParams<double> w{parse_double(a.p), a.k};
  Report r;
  r.params = {{"p", w.p}, {"k", w.k}, {"n", a.n_grid}, {"constant", a.constant}};
  r.columns = {"n", "prob"};
  for (int n : parse_int_grid(a.n_grid)) r.rows.push_back({n, feller_pmf(w, n, feller_constant(a.constant))});
  if (w.k >= 2) r.summary["printed_to_true_ratio"] = feller_printed_to_true_ratio(w);
  return r;
}

Report cmd_karni(const Args& a) {
  const WalkParams<double> w{parse_double(a.p), a.k};
  Report r;
  r.params = {{"p", w.p}, {"k", w.k}, {"n", a.n_grid}, {"terms", a.terms}};
  r.columns = {"n", "prob"};
  for (int n : parse_int_grid(a.n_grid)) r.rows.push_back({n, karni_pmf(w, n, karni_terms(a.terms))});
  r.summary = {{"points", r.rows.size()}};
  return r;
}

Report cmd_xval(const Args& a) {
  const WalkParams<double> w{parse_double(a.p), a.k};
  const int n_max = parse_n_max(a.n_max == "auto" ? "60" : a.n_max);
  const auto rep = cross_validate(w, n_max, karni_terms(a.terms));
  Report r;
  r.params = {{"p", w.p}, {"k", w.k}, {"n_max", n_max}, {"terms", a.terms}};
  r.columns = {"n",     "dp",    "feller_printed", "feller_calibrated", "printed_ratio", "karni", "karni_image_series",
               "abs_diff_feller", "abs_diff_karni"};
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  for (const auto& e : rep.entries) {
    r.rows.push_back({e.n, e.dp, e.feller_printed, e.feller_calibrated, opt(e.printed_ratio), opt(e.karni),
                      e.karni_image_series, e.abs_diff_feller, opt(e.abs_diff_karni)});
  }
  r.summary = {{"constant_ratio_estimate", opt(rep.constant_ratio_estimate)},
               {"constant_ratio_spread", rep.constant_ratio_spread},
               {"max_abs_diff_feller", rep.max_abs_diff_feller},
               {"max_abs_diff_karni", rep.max_abs_diff_karni},
               {"max_abs_diff_image_series", rep.max_abs_diff_image_series}};
  const bool ok = rep.max_abs_diff_feller <= 1e-12 && rep.max_abs_diff_karni <= 1e-12 &&
                  rep.max_abs_diff_image_series <= 1e-12 && rep.constant_ratio_spread <= 1e-10;
  r.summary["status"] = ok ? "agree" : "mismatch";
  if (!ok) r.status = kPropertyViolated;
  return r;
}

// ---- decomposition --------------------------------------------------------

Report cmd_uchain(const Args& a) {
  return with_mode(a.mode, [&]<Scalar T>() {
    const WalkParams<T> w{scalar_from_text<T>(a.p), a.k};
    const auto c = conditioned_chain(w);
    Report r;
    r.params = {{"p", cell(w.p)}, {"k", w.k}, {"mode", a.mode}};
    r.columns = {"i", "u", "residual"};
    T worst(0);
    for (int i = 1; i < c.k; ++i) {
      Json res = nullptr;
      if (i <= c.k - 2) {
        const T v = c.recursion_residual(i);
        worst = std::max(worst, T(abs_value(v)));
        res = cell(v);
      }
      r.rows.push_back({i, cell(c.u(i)), res});
    }
    r.summary = {{"levels", c.empty() ? 0 : c.k - 1}, {"max_abs_residual", cell(worst)}};
    if (exceeds(worst, 1e-12)) r.status = kPropertyViolated;
    return r;
  });
}

Report cmd_returnprob(const Args& a) {
  return with_mode(a.mode, [&]<Scalar T>() {
    const WalkParams<T> w{scalar_from_text<T>(a.p), a.k};
    const T rp = return_prob(w);
    Report r;
    r.params = {{"p", cell(w.p)}, {"k", w.k}, {"mode", a.mode}};
    r.columns = {"p", "k", "return_prob", "success_prob"};
    r.rows.push_back({cell(w.p), w.k, cell(rp), cell(T(T(1) - rp))});
    r.summary = {{"return_prob", cell(rp)}};
    return r;
  });
}

template <Scalar T>
T max_abs_gap(const DurationDist<T>& x, const DurationDist<T>& y) {
  T worst = abs_value(T(x.truncation_mass - y.truncation_mass));
  for (int n = 0; n <= std::max(x.horizon(), y.horizon()); ++n) worst = std::max(worst, T(abs_value(T(x.prob(n) - y.prob(n)))));
  return worst;
}

Report cmd_decomp_geo(const Args& a) {
  return with_mode(a.mode, [&]<Scalar T>() {
    const WalkParams<T> w{scalar_from_text<T>(a.p), a.k};
    const auto g = geometric_decomposition(w, a.horizon);
    const auto rec = reconstruct_geometric(w, a.horizon);
    const auto dp = duration_pmf(w, a.horizon);
    Report r;
    r.params = {{"p", cell(w.p)}, {"k", w.k}, {"horizon", a.horizon}, {"mode", a.mode}};
    r.columns = {"n", "dp", "reconstructed", "y_law", "z_law"};
    for (int n = 0; n <= a.horizon; ++n) {
      r.rows.push_back({n, cell(dp.prob(n)), cell(rec.prob(n)), g.dist_Y ? cell(g.dist_Y->prob(n)) : Json(nullptr),
                        cell(g.dist_Z.prob(n))});
    }
    const T gap = max_abs_gap(rec, dp);
    r.summary = {{"return_prob", cell(g.return_prob)}, {"max_abs_diff", cell(gap)}};
    r.summary["status"] = exceeds(gap, 1e-10) ? "mismatch" : "agree";
    if (exceeds(gap, 1e-10)) r.status = kPropertyViolated;
    return r;
  });
}

Report cmd_schedule(const Args& a) {
  const int n_max = parse_n_max(a.n_max == "auto" ? std::to_string(4 * std::max(a.k, 1)) : a.n_max);
  const auto s = subgame_schedule(a.k, n_max);
  Report r;
  r.params = {{"k", a.k}, {"n_max", n_max}};
  r.columns = {"i", "y", "d"};
  r.rows.push_back({0, s.y[0], nullptr});
  for (int i = 1; i <= s.length(); ++i) r.rows.push_back({i, s.y[i], s.d[i]});
  r.summary = {{"cycle_start", s.cycle_start}, {"cycle_length", s.cycle_length}};
  return r;
}

Report cmd_hazards(const Args& a) {
  return with_mode(a.mode, [&]<Scalar T>() {
    const WalkParams<T> w{scalar_from_text<T>(a.p), a.k};
    const int n_max = parse_n_max(a.n_max == "auto" ? std::to_string(4 * std::max(a.k, 1)) : a.n_max);
    const auto h = hazard_rates(w, n_max);
    Report r;
    r.params = {{"p", cell(w.p)}, {"k", w.k}, {"n_max", n_max}, {"mode", a.mode}};
    r.columns = {"n", "y_prev", "d", "r"};
    for (int n = 1; n <= n_max; ++n) r.rows.push_back({n, h.schedule.y[n - 1], h.schedule.d[n], cell(h.r[n])});
    r.summary = {{"cycle_length", h.schedule.cycle_length}};
    return r;
  });
}

Report cmd_decomp_sub(const Args& a) {
  return with_mode(a.mode, [&]<Scalar T>() {
    const WalkParams<T> w{scalar_from_text<T>(a.p), a.k};
    const auto rec = reconstruct_subgame(w, a.horizon);
    const auto dp = duration_pmf(w, a.horizon);
    Report r;
    r.params = {{"p", cell(w.p)}, {"k", w.k}, {"horizon", a.horizon}, {"mode", a.mode}};
    r.columns = {"n", "dp", "reconstructed"};
    for (int n = 0; n <= a.horizon; ++n) r.rows.push_back({n, cell(dp.prob(n)), cell(rec.prob(n))});
    const T gap = max_abs_gap(rec, dp);
    r.summary = {{"max_abs_diff", cell(gap)}};
    r.summary["status"] = exceeds(gap, 1e-10) ? "mismatch" : "agree";
    if (exceeds(gap, 1e-10)) r.status = kPropertyViolated;
    return r;
  });
}

Report cmd_evenk(const Args& a) {
  return with_mode(a.mode, [&]<Scalar T>() {
    const WalkParams<T> w{scalar_from_text<T>(a.p), a.k};
    const auto rep = even_k_geometric_check(w, a.horizon);
    const auto dp = duration_pmf(w, a.horizon);
    Report r;
    r.params = {{"p", cell(w.p)}, {"k", w.k}, {"horizon", a.horizon}, {"mode", a.mode}};
    r.columns = {"n", "dp", "reconstructed"};
    for (int n = 0; n <= a.horizon; ++n) r.rows.push_back({n, cell(dp.prob(n)), cell(rep.reconstructed.prob(n))});
    r.summary = {{"half_win", cell(rep.half_win)},
                 {"success_prob", cell(rep.success_prob)},
                 {"max_deviation", cell(rep.max_deviation)}};
    r.summary["status"] = exceeds(rep.max_deviation, 1e-10) ? "mismatch" : "agree";
    if (exceeds(rep.max_deviation, 1e-10)) r.status = kPropertyViolated;
    return r;
  });
}

// ---- simulation -----------------------------------------------------------

Report cmd_simulate(const Args& a) {
  const WalkParams<double> w{parse_double(a.p), a.k};
  w.validate();
  const auto s = run_walks({w, a.trials, a.seed, a.workers});
  const int top = static_cast<int>(s.durations.max_value());
  const auto dp = duration_pmf(w, std::max(top, w.k));
  Report r;
  r.params = {{"p", w.p}, {"k", w.k}, {"trials", a.trials}, {"seed", a.seed}};
  r.columns = {"n", "count", "frequency", "dp"};
  for (int n = 0; n <= top; ++n) {
    const auto c = s.durations.count(n);
    if (c == 0) continue;
    r.rows.push_back({n, c, static_cast<double>(c) / static_cast<double>(s.trials), dp.prob(n)});
  }
  r.summary = {{"mean", s.mean()},
               {"win_frequency", s.win_frequency()},
               {"duration_winner_correlation", s.duration_winner_correlation()}};
  return r;
}

Report cmd_couple(const Args& a) {
  const CoupledRunConfig cfg{parse_double(a.p), parse_double(a.p_prime), a.k, a.start, a.trials, a.seed, a.workers};
  const auto s = a.full ? run_coupled_duration(cfg) : run_coupled(cfg);
  Report r;
  r.params = {{"p", cfg.p}, {"p_prime", cfg.p_prime}, {"k", cfg.k}, {"trials", cfg.trials}, {"seed", cfg.seed},
              {"target", a.full ? "duration" : "return_time"}};
  if (!a.full) r.params["start"] = cfg.start;
  r.columns = {"t", "ecdf_low", "ecdf_high"};
  const auto top = std::max(s.low.max_value(), s.high.max_value());
  for (std::int64_t t = 0; t <= top; ++t) r.rows.push_back({t, s.low.ecdf(t), s.high.ecdf(t)});
  r.summary = {{"ordering_violations", s.ordering_violations}, {"mean_low", s.mean_low()}, {"mean_high", s.mean_high()}};
  if (s.ordering_violations != 0) r.status = kPropertyViolated;
  return r;
}

Report dominance_exact(const Args& a) {
  return with_mode(a.mode, [&]<Scalar T>() {
    const auto grid = io::parse_rational_grid(a.p_grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i] < 0 || grid[i] > Rational(1, 2)) throw std::invalid_argument("--p-grid must lie within [0, 1/2]");
      if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("--p-grid must be strictly increasing");
    }
    int n_max = 0;
    if (a.n_max == "auto") {
      for (const auto& p : grid) n_max = std::max(n_max, duration_quantile({nearest_double(p), a.k}, 0.999));
    } else {
      n_max = parse_n_max(a.n_max);
    }
    n_max = std::max(n_max, a.k);
    std::vector<DurationDist<T>> laws;
    for (const auto& p : grid) laws.push_back(duration_pmf(WalkParams<T>{from_rational<T>(p), a.k}, n_max));

    Report r;
    r.params = {{"k", a.k}, {"p_grid", a.p_grid}, {"n_max", n_max}, {"mode", a.mode}};
    r.columns = {"n"};
    for (const auto& p : grid) r.columns.push_back("p=" + format_scalar(from_rational<T>(p)));
    long violations = 0;
    Json first = nullptr;
    for (int n = 0; n <= n_max; ++n) {
      std::vector<Json> row{n};
      for (std::size_t j = 0; j < laws.size(); ++j) {
        const T tail = laws[j].tail(n);
        row.push_back(cell(tail));
        if (j > 0 && tail < laws[j - 1].tail(n)) {
          ++violations;
          if (first.is_null()) first = {{"n", n}, {"p", format_scalar(from_rational<T>(grid[j]))}};
        }
      }
      r.rows.push_back(std::move(row));
    }
    r.summary = {{"status", violations == 0 ? "ordered" : "violated"}, {"violations", violations}, {"first_violation", first}};
    if (violations != 0) r.status = kPropertyViolated;
    return r;
  });
}

Report dominance_mc(const Args& a) {
  const WalkParams<double> low{parse_double(a.p), a.k}, high{parse_double(a.p_prime), a.k};
  const auto rep = empirical_dominance(low, high, a.trials, a.confidence, a.seed, a.workers);
  Report r;
  r.params = {{"k", a.k}, {"p", low.p}, {"p_prime", high.p}, {"trials", a.trials}, {"confidence", a.confidence},
              {"seed", a.seed}};
  r.columns = {"t", "ecdf_low", "ecdf_high", "band"};
  for (std::size_t t = 0; t < rep.ecdf_low.size(); ++t) r.rows.push_back({t, rep.ecdf_low[t], rep.ecdf_high[t], rep.band});
  r.summary = {{"status", rep.dominance_holds ? "ordered" : "violated"},
               {"band", rep.band},
               {"first_violation", rep.first_violation}};
  if (!rep.dominance_holds) r.status = kPropertyViolated;
  return r;
}

Report cmd_dominance(const Args& a) { return a.method == "mc" ? dominance_mc(a) : dominance_exact(a); }

// ---- brownian -------------------------------------------------------------

Report cmd_bm_density(const Args& a) {
  const BrownianExit be{parse_double(a.mu), a.bk, a.series_tol};
  const auto g = density_grid(be, io::parse_double_grid(a.t_grid), a.quad_tol);
  Report r;
  r.params = {{"mu", be.mu}, {"k", be.k}, {"t", a.t_grid}, {"quad_tol", a.quad_tol}, {"series_tol", a.series_tol}};
  r.columns = {"t", "density"};
  for (std::size_t i = 0; i < g.times.size(); ++i) r.rows.push_back({g.times[i], g.values[i]});
  r.summary = {{"est_norm", g.est_norm}, {"norm_defect", g.norm_defect}, {"t_max", g.t_max}};
  if (!(g.norm_defect <= 1e-8)) r.status = kPropertyViolated;
  return r;
}

Report cmd_bm_tail(const Args& a) {
  const BrownianExit be{parse_double(a.mu), a.bk, a.series_tol};
  Report r;
  r.params = {{"mu", be.mu}, {"k", be.k}, {"t", a.t_grid}, {"quad_tol", a.quad_tol}};
  r.columns = {"t", "tail"};
  for (double t : io::parse_double_grid(a.t_grid)) r.rows.push_back({t, exit_tail(be, t, a.quad_tol)});
  r.summary = {{"points", r.rows.size()}};
  return r;
}

Report cmd_bm_sweep(const Args& a) {
  const auto mus = io::parse_double_grid(a.mu);
  const auto ts = io::parse_double_grid(a.t_grid);
  const auto rep = monotonicity_sweep(a.bk, mus, ts, a.quad_tol, a.workers);
  Report r;
  r.params = {{"k", a.bk}, {"mu", a.mu}, {"t", a.t_grid}, {"quad_tol", a.quad_tol}};
  r.columns = {"t"};
  for (double mu : mus) r.columns.push_back("mu=" + format_scalar(mu));
  for (std::size_t i = 0; i < ts.size(); ++i) {
    std::vector<Json> row{ts[i]};
    for (std::size_t j = 0; j < mus.size(); ++j) row.push_back(rep.tails[j][i]);
    r.rows.push_back(std::move(row));
  }
  r.summary = {{"status", rep.ordered ? "ordered" : "violated"}, {"min_margin", rep.min_margin}};
  if (!rep.ordered) r.status = kPropertyViolated;
  return r;
}

Report cmd_bm_converge(const Args& a) {
  const double mu = parse_double(a.mu);
  auto hs = io::parse_double_grid(a.h_grid);
  std::sort(hs.begin(), hs.end(), std::greater<>());
  const auto ts = io::parse_double_grid(a.t_grid);
  const double t_top = *std::max_element(ts.begin(), ts.end());
  std::vector<double> exact;
  for (double t : ts) exact.push_back(exit_tail({mu, a.bk}, t, a.quad_tol));

  Report r;
  r.params = {{"mu", mu}, {"k", a.bk}, {"h", a.h_grid}, {"t", a.t_grid}, {"quad_tol", a.quad_tol}};
  r.columns = {"method", "h", "barrier", "p", "rounding_warning", "sup_dist"};
  bool decreasing = true;
  double prev = INFINITY, last = 0;
  for (double h : hs) {
    const auto d = rw_approx_exit_dist(mu, a.bk, h, t_top);
    double sup = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) sup = std::max(sup, std::fabs(d.tail(ts[i]) - exact[i]));
    r.rows.push_back({"random_walk", h, d.barrier, d.p, d.barrier_rounding_warning, sup});
    if (!(sup < prev)) decreasing = false;
    prev = last = sup;
  }
  r.summary = {{"status", decreasing ? "decreasing" : "not_decreasing"}, {"finest_sup_dist", last}};
  if (a.euler_paths > 0) {
    const auto mc = simulate_exit_euler({mu, a.bk, a.dt, std::max(10.0, 2 * t_top), a.euler_paths, a.seed, a.workers});
    double sup = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) sup = std::max(sup, std::fabs(mc.tail(ts[i]) - exact[i]));
    r.rows.push_back({"euler", a.dt, nullptr, nullptr, nullptr, sup});
    r.summary["euler_sup_dist"] = sup;
    r.params["euler_paths"] = a.euler_paths;
    r.params["seed"] = a.seed;
  }
  if (!decreasing) r.status = kPropertyViolated;
  return r;
}

// ---- plumbing -------------------------------------------------------------

void write_artifact(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open output file '" + path + "'");
  f << text;
  f.close();
  if (!f) throw std::runtime_error("failed writing output file '" + path + "'");
}

std::string headline(const std::string& command, const Report& r) {
  std::string line = command + ":";
  for (const auto& [key, value] : r.summary.items()) {
    line += " " + key + "=" + (value.is_object() ? value.dump() : render(value));
  }
  return line;
}

}  // namespace

int run(int argc, const char* const* argv) {
  Args a;
  CLI::App app{"Exit times of the simple random walk from a symmetric interval", "ruin"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML file with option values ([subcommand] sections)");

  std::map<std::string, std::function<Report(const Args&)>> commands;
  auto sub = [&](const std::string& name, const std::string& help, std::function<Report(const Args&)> fn) {
    commands[name] = std::move(fn);
    auto* s = app.add_subcommand(name, help);
    s->add_option("--format", a.format, "Artifact format")->check(CLI::IsMember({"csv", "json"}));
    s->add_option("--out", a.out, "Artifact path (default: $RUIN_OUT_DIR/<command>.<format>, else stdout)");
    return s;
  };
  auto p_opt = [&](CLI::App* s) { s->add_option("--p", a.p, "Up-step probability (num/den or decimal)")->required(); };
  auto k_opt = [&](CLI::App* s) { s->add_option("--k", a.k, "Barrier")->required(); };
  auto mode_opt = [&](CLI::App* s) {
    s->add_option("--mode", a.mode, "Arithmetic")->check(CLI::IsMember({"exact", "float"}))->capture_default_str();
  };
  auto horizon_opt = [&](CLI::App* s) { s->add_option("--horizon", a.horizon, "Last step count")->required(); };
  auto walk = [&](CLI::App* s) {
    p_opt(s);
    k_opt(s);
    mode_opt(s);
  };
  auto mc_opts = [&](CLI::App* s) {
    s->add_option("--trials", a.trials, "Number of trials")->capture_default_str();
    s->add_option("--seed", a.seed, "Random seed")->capture_default_str();
    s->add_option("--workers", a.workers, "OpenMP threads (results do not depend on it)")->capture_default_str();
  };
  auto bm = [&](CLI::App* s, bool single_mu) {
    s->add_option("--mu", a.mu, single_mu ? "Drift" : "Drift grid (a:b:step or list)")->capture_default_str();
    s->add_option("--k", a.bk, "Half-width of the interval")->capture_default_str();
    s->add_option("--quad-tol", a.quad_tol, "Absolute quadrature tolerance")->capture_default_str();
  };

  auto* s = sub("pmf", "Exact law of the exit time", cmd_pmf);
  walk(s);
  horizon_opt(s);
  s = sub("tail", "P(T > n)", cmd_tail);
  walk(s);
  s->add_option("--n", a.n_grid, "Step counts (a:b:step or list)")->required();
  s = sub("winprob", "Probability of exiting at +k", cmd_winprob);
  walk(s);
  s = sub("joint", "Joint law of exit time and side", cmd_joint);
  walk(s);
  horizon_opt(s);
  s = sub("mean", "Expected exit time", cmd_mean);
  walk(s);
  s->add_option("--tail-tol", a.tail_tol, "Surviving mass at which float summation stops")->capture_default_str();

  s = sub("feller", "Cosine-sum closed form", cmd_feller);
  p_opt(s);
  k_opt(s);
  s->add_option("--n", a.n_grid, "Step counts")->required();
  s->add_option("--constant", a.constant)->check(CLI::IsMember({"as-printed", "calibrated"}))->capture_default_str();
  s = sub("karni", "Binomial closed form", cmd_karni);
  p_opt(s);
  k_opt(s);
  s->add_option("--n", a.n_grid, "Step counts")->required();
  s->add_option("--terms", a.terms)->check(CLI::IsMember({"as-printed", "image-series"}))->capture_default_str();
  s = sub("xval", "Cross-validate both closed forms against the DP", cmd_xval);
  p_opt(s);
  k_opt(s);
  s->add_option("--n-max", a.n_max, "Last step count (auto: 60)")->capture_default_str();
  s->add_option("--terms", a.terms)->check(CLI::IsMember({"as-printed", "image-series"}))->capture_default_str();

  s = sub("uchain", "Up-step probabilities of the walk conditioned to return to 0", cmd_uchain);
  walk(s);
  s = sub("returnprob", "P(return to 0 before +-k)", cmd_returnprob);
  walk(s);
  s = sub("decomp-geo", "Rebuild the law from Z + Y_1 + ... + Y_{N-1}", cmd_decomp_geo);
  walk(s);
  horizon_opt(s);
  s = sub("schedule", "Subgame sizes d(i) and distances y(i)", cmd_schedule);
  k_opt(s);
  s->add_option("--n-max", a.n_max, "Number of subgames (auto: 4k)")->capture_default_str();
  s = sub("hazards", "Hazard rates of the number of subgames", cmd_hazards);
  walk(s);
  s->add_option("--n-max", a.n_max, "Number of subgames (auto: 4k)")->capture_default_str();
  s = sub("decomp-sub", "Rebuild the law from the subgame decomposition", cmd_decomp_sub);
  walk(s);
  horizon_opt(s);
  s = sub("evenk", "Geometric number of paired half-size games (even k)", cmd_evenk);
  walk(s);
  horizon_opt(s);

  s = sub("simulate", "Monte Carlo walks", cmd_simulate);
  p_opt(s);
  k_opt(s);
  mc_opts(s);
  s = sub("couple", "Monotone coupling of conditioned return times", cmd_couple);
  p_opt(s);
  k_opt(s);
  s->add_option("--p-prime", a.p_prime, "Second up-step probability, p <= p' <= 1/2")->required();
  s->add_option("--start", a.start, "Start level 1..k-1")->capture_default_str();
  s->add_flag("--full", a.full, "Couple full exit times instead of return times");
  mc_opts(s);
  s = sub("dominance", "Check that P(T > n) increases in p on [0, 1/2]", cmd_dominance);
  k_opt(s);
  mode_opt(s);
  s->add_option("--method", a.method, "exact DP sweep or Monte Carlo")->check(CLI::IsMember({"exact", "mc"}))->capture_default_str();
  s->add_option("--p-grid", a.p_grid, "Grid for --method exact");
  s->add_option("--n-max", a.n_max, "Last step count (auto: 0.999 quantile)")->capture_default_str();
  s->add_option("--p", a.p, "Lower p for --method mc");
  s->add_option("--p-prime", a.p_prime, "Higher p for --method mc");
  s->add_option("--confidence", a.confidence)->capture_default_str();
  mc_opts(s);

  s = sub("bm-density", "Exit-time density of drifted Brownian motion", cmd_bm_density);
  bm(s, true);
  s->add_option("--t", a.t_grid, "Times")->required();
  s->add_option("--series-tol", a.series_tol)->capture_default_str();
  s = sub("bm-tail", "P(T_mu > t)", cmd_bm_tail);
  bm(s, true);
  s->add_option("--t", a.t_grid, "Times")->required();
  s = sub("bm-sweep", "Check that tails decrease in |mu|", cmd_bm_sweep);
  bm(s, false);
  s->add_option("--t", a.t_grid, "Times")->required();
  s->add_option("--workers", a.workers)->capture_default_str();
  s = sub("bm-converge", "Scaled random walk (and Euler) tails against the exact tail", cmd_bm_converge);
  bm(s, true);
  a.t_grid = "0.1,0.25,0.5,1,2,5";
  s->add_option("--t", a.t_grid, "Times")->capture_default_str();
  s->add_option("--h-grid", a.h_grid, "Random-walk time steps h")->capture_default_str();
  s->add_option("--euler-paths", a.euler_paths, "Also simulate this many Euler paths")->capture_default_str();
  s->add_option("--dt", a.dt, "Euler step")->capture_default_str();
  mc_opts(s);

  // The config file is a top-level option; accept it after the subcommand too.
  std::vector<std::string> args(argv + 1, argv + argc);
  std::vector<std::string> front;
  for (std::size_t i = 0; i < args.size();) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      front.insert(front.end(), {args[i], args[i + 1]});
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      front.push_back(args[i]);
      args.erase(args.begin() + static_cast<long>(i));
    } else {
      ++i;
    }
  }
  args.insert(args.begin(), front.begin(), front.end());
  std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector

  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsageError;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  if (command == "dominance") {
    const bool exact = a.method == "exact";
    if (exact && a.p_grid.empty()) {
      std::cerr << "error: dominance --method exact needs --p-grid\n";
      return kUsageError;
    }
    if (!exact && (a.p.empty() || a.p_prime.empty())) {
      std::cerr << "error: dominance --method mc needs --p and --p-prime\n";
      return kUsageError;
    }
  }

  Report report;
  std::string text;
  try {
    report = commands.at(command)(a);
    text = a.format == "json" ? to_json(command, report) : to_csv(report);
    std::string path = a.out;
    if (path.empty()) {
      if (const char* dir = std::getenv("RUIN_OUT_DIR"); dir && *dir) {
        path = (std::filesystem::path(dir) / (command + "." + a.format)).string();
      }
    }
    if (path.empty()) {
      std::cout << text;
      std::cerr << headline(command, report) << "\n";
    } else {
      write_artifact(path, text);
      std::cout << headline(command, report) << " -> " << path << "\n";
    }
  } catch (const ResourceLimitError& e) {
    std::cerr << "error: " << e.what() << " (partial result " << format_scalar(e.partial()) << ")\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return report.status;
}

}  // namespace ruin::cli
