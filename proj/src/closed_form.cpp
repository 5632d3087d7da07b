#include "ruin/closed_form.hpp"

#include <gmpxx.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ruin/markov_exact.hpp"

namespace ruin {

namespace {

constexpr int kDirectLimit = 300;  // above this, accumulate in log space

double log_power(double base, int exponent) {
  if (exponent == 0) return 0.0;
  return exponent * std::log(base);  // -inf for base 0
}

// log[p^a q^b + p^b q^a]
double log_bracket(double p, double q, int a, int b) {
  double x = log_power(p, a) + log_power(q, b);
  double y = log_power(p, b) + log_power(q, a);
  double hi = std::max(x, y), lo = std::min(x, y);
  if (hi == -std::numeric_limits<double>::infinity()) return hi;
  return hi + std::log1p(std::exp(lo - hi));
}

double bracket(double p, double q, int a, int b) {
  return std::pow(p, a) * std::pow(q, b) + std::pow(p, b) * std::pow(q, a);
}

// sin(pi j / 2) without rounding noise.
int quarter_turn_sine(int j) {
  switch (j % 4) {
    case 1: return 1;
    case 3: return -1;
    default: return 0;
  }
}

// C(m, twice_r / 2); zero for odd twice_r or an index outside [0, m].
mpz_class binom_half(int m, long twice_r) {
  if (twice_r % 2 != 0) return 0;
  long r = twice_r / 2;
  if (r < 0 || r > m) return 0;
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(m), static_cast<unsigned long>(r));
  return out;
}

bool valid_point(const WalkParams<double>& w, int n) { return n >= w.k && (n - w.k) % 2 == 0; }

}  // namespace

double feller_pmf(const WalkParams<double>& w, int n, FellerConstant constant) {
  w.validate();
  if (!valid_point(w, n)) return 0.0;
  if (w.k == 1) return n == 1 ? 1.0 : 0.0;

  const int k = w.k;
  const double p = w.p, q = 1.0 - w.p;
  const int a = (n + k) / 2, b = (n - k) / 2;
  const double angle = std::numbers::pi / (2.0 * k);

  double value = 0.0;
  if (n <= kDirectLimit) {
    double s = 0.0;
    for (int j = 1; j < k; ++j) {
      int sgn = quarter_turn_sine(j);
      if (sgn == 0) continue;
      s += sgn * std::pow(std::cos(angle * j), n - 1) * std::sin(angle * j);
    }
    value = std::ldexp(bracket(p, q, a, b), n + 1) / k * s;
  } else {
    const double prefix = (n + 1) * std::numbers::ln2 - std::log(static_cast<double>(k)) + log_bracket(p, q, a, b);
    for (int j = 1; j < k; ++j) {
      int sgn = quarter_turn_sine(j);
      if (sgn == 0) continue;
      double lt = prefix + (n - 1) * std::log(std::cos(angle * j)) + std::log(std::sin(angle * j));
      value += sgn * std::exp(lt);
    }
  }
  if (constant == FellerConstant::calibrated) value /= feller_printed_to_true_ratio(w);
  return value;
}

double feller_printed_to_true_ratio(const WalkParams<double>& w) {
  w.validate();
  if (w.k < 2) throw std::invalid_argument("the cosine sum is empty for k = 1; no ratio to calibrate");
  double dp = duration_pmf(w, w.k).prob(w.k);
  return feller_pmf(w, w.k, FellerConstant::as_printed) / dp;
}

double karni_pmf(const WalkParams<double>& w, int n, KarniTerms terms) {
  w.validate();
  const int k = w.k;
  if (terms == KarniTerms::as_printed && n < 5 * k) {
    throw std::out_of_range("five-term binomial formula requires n >= 5k (n=" + std::to_string(n) +
                            ", k=" + std::to_string(k) + ")");
  }
  if (n < 1 || !valid_point(w, n)) return 0.0;

  const int m = n - 1;
  mpz_class count;
  if (terms == KarniTerms::as_printed) {
    count = binom_half(m, n - k) - binom_half(m, n - 3L * k) - binom_half(m, n + k) + binom_half(m, n - 5L * k) +
            binom_half(m, n + 3L * k);
  } else {
    // Paths from 0 to k-1 in n-1 steps inside (-k, k), by reflection in both barriers.
    const long reach = n / (2L * k) + 2;
    for (long j = -reach; j <= reach; ++j) {
      count += binom_half(m, n - k - 4L * j * k);
      count -= binom_half(m, n + k + 4L * j * k);
    }
  }
  if (count == 0) return 0.0;

  const double p = w.p, q = 1.0 - w.p;
  const int a = (n + k) / 2, b = (n - k) / 2;
  long exponent = 0;
  double mantissa = mpz_get_d_2exp(&exponent, count.get_mpz_t());
  if (n <= kDirectLimit) return std::ldexp(mantissa, static_cast<int>(exponent)) * bracket(p, q, a, b);
  double sign = mantissa < 0 ? -1.0 : 1.0;
  return sign * std::exp(std::log(std::fabs(mantissa)) + exponent * std::numbers::ln2 + log_bracket(p, q, a, b));
}

double pmf_derivative_sign_expression(const WalkParams<double>& w, int n) {
  const double p = w.p, q = 1.0 - w.p;
  const double pk = std::pow(p, w.k), qk = std::pow(q, w.k);
  return n * (1.0 - 2.0 * p) * (pk + qk) + w.k * (pk - qk);
}

ClosedFormReport cross_validate(const WalkParams<double>& w, int n_max, KarniTerms karni_terms) {
  w.validate();
  if (n_max < w.k) throw std::invalid_argument("n_max must be at least k");
  ClosedFormReport report;
  report.k = w.k;
  report.p = w.p;
  report.karni_terms = karni_terms;

  const auto dp = duration_pmf(w, n_max);
  const double ratio = w.k >= 2 ? feller_printed_to_true_ratio(w) : 1.0;

  double ratio_sum = 0.0;
  int ratio_count = 0;
  for (int n = w.k; n <= n_max; n += 2) {
    ClosedFormEntry e;
    e.n = n;
    e.dp = dp.prob(n);
    e.feller_printed = feller_pmf(w, n, FellerConstant::as_printed);
    e.feller_calibrated = e.feller_printed / ratio;
    e.abs_diff_feller = std::fabs(e.feller_calibrated - e.dp);
    e.karni_image_series = karni_pmf(w, n, KarniTerms::image_series);
    report.max_abs_diff_image_series = std::max(report.max_abs_diff_image_series, std::fabs(e.karni_image_series - e.dp));
    if (n >= 5 * w.k) {
      e.karni = karni_pmf(w, n, karni_terms);
      e.abs_diff_karni = std::fabs(*e.karni - e.dp);
      report.max_abs_diff_karni = std::max(report.max_abs_diff_karni, *e.abs_diff_karni);
    }
    if (w.k >= 2 && e.dp > std::numeric_limits<double>::min()) {
      e.printed_ratio = e.feller_printed / e.dp;
      ratio_sum += *e.printed_ratio;
      ++ratio_count;
    }
    report.max_abs_diff_feller = std::max(report.max_abs_diff_feller, e.abs_diff_feller);
    report.entries.push_back(e);
  }
  if (ratio_count > 0) {
    double mean = ratio_sum / ratio_count;
    report.constant_ratio_estimate = mean;
    double spread = 0.0;
    for (const auto& e : report.entries) {
      if (e.printed_ratio) spread += (*e.printed_ratio - mean) * (*e.printed_ratio - mean);
    }
    report.constant_ratio_spread = std::sqrt(spread / ratio_count);
  }
  return report;
}

}  // namespace ruin
