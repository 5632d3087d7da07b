// Closed-form point probabilities of the two-sided exit time and their
// cross-validation against the exact DP.
#pragma once

#include <optional>
#include <vector>

#include "ruin/walk.hpp"

namespace ruin {

/// Which overall constant to use in the cosine-sum formula.
///   as_printed : k^{-1} 2^{n+1} [...] sum_j ...
///   calibrated : as_printed divided by its ratio to the DP value at n = k.
/// The ratio turns out to be exactly 2 for every (p, k) tested.
enum class FellerConstant { as_printed, calibrated };

/// Which binomial terms to keep in the reflection formula.
///   as_printed   : the five-term bracket, only valid for n <= 5k+1
///   image_series : every term of the alternating reflection sum
enum class KarniTerms { as_printed, image_series };

double feller_pmf(const WalkParams<double>& w, int n, FellerConstant constant);

/// as_printed / DP at n = k (the calibration point). Requires k >= 2.
double feller_printed_to_true_ratio(const WalkParams<double>& w);

/// Throws std::out_of_range for n < 5k in as_printed mode.
double karni_pmf(const WalkParams<double>& w, int n, KarniTerms terms = KarniTerms::as_printed);

/// n(1-2p)(p^k+(1-p)^k) + k(p^k-(1-p)^k): the sign of d/dp of either formula.
double pmf_derivative_sign_expression(const WalkParams<double>& w, int n);

struct ClosedFormEntry {
  int n = 0;
  double feller_printed = 0;
  double feller_calibrated = 0;
  std::optional<double> karni;  // present only for n >= 5k
  double karni_image_series = 0;
  double dp = 0;
  double abs_diff_feller = 0;  // |feller_calibrated - dp|
  std::optional<double> abs_diff_karni;
  std::optional<double> printed_ratio;  // feller_printed / dp, when dp > 0 and k >= 2
};

struct ClosedFormReport {
  int k = 1;
  double p = 0;
  KarniTerms karni_terms = KarniTerms::as_printed;
  std::vector<ClosedFormEntry> entries;
  std::optional<double> constant_ratio_estimate;  // mean of printed_ratio
  double constant_ratio_spread = 0;               // standard deviation of printed_ratio
  double max_abs_diff_feller = 0;
  double max_abs_diff_karni = 0;
  double max_abs_diff_image_series = 0;
};

ClosedFormReport cross_validate(const WalkParams<double>& w, int n_max,
                                KarniTerms karni_terms = KarniTerms::as_printed);

}  // namespace ruin
