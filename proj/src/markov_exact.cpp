#include "ruin/markov_exact.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ruin/detail/tridiagonal.hpp"

namespace ruin {

namespace {

// Sub-probability vector over the interior states -(k-1)..(k-1), stored at
// offset k-1. One call to step() advances one time unit and returns the mass
// absorbed at +k and -k during that step.
class FloatStepper {
 public:
  explicit FloatStepper(const WalkParams<double>& w)
      : p_(w.p), q_(1.0 - w.p), cur_(2 * w.k - 1, 0.0), next_(cur_.size(), 0.0) {
    cur_[static_cast<std::size_t>(w.k - 1)] = 1.0;
  }

  void step(double& plus, double& minus) {
    const std::size_t m = cur_.size();
    plus = p_ * cur_[m - 1];
    minus = q_ * cur_[0];
    for (std::size_t j = 0; j < m; ++j) {
      double from_below = j > 0 ? p_ * cur_[j - 1] : 0.0;
      double from_above = j + 1 < m ? q_ * cur_[j + 1] : 0.0;
      next_[j] = from_below + from_above;
    }
    cur_.swap(next_);
  }

  double survivors() const {
    double s = 0.0;
    for (double v : cur_) s += v;
    return s;
  }

 private:
  double p_, q_;
  std::vector<double> cur_, next_;
};

// Exact kernel for p = a/b: the state after n steps is kept as integers over
// the common denominator b^n, so each step is two small-integer multiplies per
// state and no gcd work until harvest.
class ExactStepper {
 public:
  explicit ExactStepper(const WalkParams<Rational>& w)
      : cur_(static_cast<std::size_t>(2 * w.k - 1)), next_(cur_.size()), denom_(1) {
    mpz_class num = w.p.get_num();
    mpz_class den = w.p.get_den();
    if (!num.fits_ulong_p() || !den.fits_ulong_p()) {
      throw std::invalid_argument("exact mode needs p = a/b with a, b fitting in 64 bits");
    }
    up_ = num.get_ui();
    down_ = den.get_ui() - up_;
    base_ = den.get_ui();
    cur_[static_cast<std::size_t>(w.k - 1)] = 1;
  }

  void step(Rational& plus, Rational& minus) {
    const std::size_t m = cur_.size();
    mpz_class a, b;
    mpz_mul_ui(a.get_mpz_t(), cur_[m - 1].get_mpz_t(), up_);
    mpz_mul_ui(b.get_mpz_t(), cur_[0].get_mpz_t(), down_);
    for (std::size_t j = 0; j < m; ++j) {
      mpz_set_ui(next_[j].get_mpz_t(), 0);
      if (j > 0) mpz_addmul_ui(next_[j].get_mpz_t(), cur_[j - 1].get_mpz_t(), up_);
      if (j + 1 < m) mpz_addmul_ui(next_[j].get_mpz_t(), cur_[j + 1].get_mpz_t(), down_);
    }
    cur_.swap(next_);
    mpz_mul_ui(denom_.get_mpz_t(), denom_.get_mpz_t(), base_);
    plus = Rational(a, denom_);
    plus.canonicalize();
    minus = Rational(b, denom_);
    minus.canonicalize();
  }

  Rational survivors() const {
    mpz_class s = 0;
    for (const auto& v : cur_) s += v;
    Rational r(s, denom_);
    r.canonicalize();
    return r;
  }

 private:
  unsigned long up_ = 0, down_ = 0, base_ = 1;
  std::vector<mpz_class> cur_, next_;
  mpz_class denom_;
};

template <Scalar T>
using StepperFor = std::conditional_t<std::same_as<T, double>, FloatStepper, ExactStepper>;

void check_horizon(int k, int horizon) {
  if (horizon < k) {
    throw std::invalid_argument("horizon " + std::to_string(horizon) + " is below barrier k=" + std::to_string(k));
  }
}

}  // namespace

template <Scalar T>
DurationDist<T> JointDurationWinner<T>::marginal() const {
  DurationDist<T> d;
  d.k = k;
  d.pmf.resize(plus.size());
  for (std::size_t n = 0; n < plus.size(); ++n) d.pmf[n] = plus[n] + minus[n];
  d.truncation_mass = truncation_mass;
  return d;
}

template <Scalar T>
std::vector<T> JointDurationWinner<T>::product_residual(const T& win) const {
  std::vector<T> r(plus.size());
  for (std::size_t n = 0; n < plus.size(); ++n) r[n] = plus[n] - (plus[n] + minus[n]) * win;
  return r;
}

template <Scalar T>
JointDurationWinner<T> joint_duration_winner(const WalkParams<T>& w, int horizon) {
  w.validate();
  check_horizon(w.k, horizon);
  JointDurationWinner<T> j;
  j.k = w.k;
  j.plus.assign(static_cast<std::size_t>(horizon) + 1, T(0));
  j.minus.assign(static_cast<std::size_t>(horizon) + 1, T(0));
  StepperFor<T> stepper(w);
  for (int n = 1; n <= horizon; ++n) {
    stepper.step(j.plus[static_cast<std::size_t>(n)], j.minus[static_cast<std::size_t>(n)]);
  }
  j.truncation_mass = stepper.survivors();
  return j;
}

template <Scalar T>
DurationDist<T> duration_pmf(const WalkParams<T>& w, int horizon) {
  return joint_duration_winner(w, horizon).marginal();
}

template <Scalar T>
T duration_tail(const WalkParams<T>& w, int n) {
  w.validate();
  if (n < 0) throw std::invalid_argument("n must be non-negative");
  if (n < w.k) return T(1);
  return duration_pmf(w, n).truncation_mass;
}

template <>
Rational expected_duration<Rational>(const WalkParams<Rational>& w, double, long) {
  w.validate();
  const std::size_t m = static_cast<std::size_t>(2 * w.k - 1);
  std::vector<Rational> lower(m, Rational(-w.q())), diag(m, Rational(1)), upper(m, Rational(-w.p)),
      rhs(m, Rational(1));
  auto t = detail::solve_tridiagonal(lower, diag, upper, rhs);
  return t[static_cast<std::size_t>(w.k - 1)];
}

template <>
double expected_duration<double>(const WalkParams<double>& w, double tail_tol, long max_horizon) {
  w.validate();
  if (!(tail_tol > 0)) throw std::invalid_argument("tail_tol must be positive");
  FloatStepper stepper(w);
  // E[T] = sum_{n>=0} P(T > n).
  double sum = 0.0;
  double surv = 1.0, surv_prev = 1.0, surv_prev2 = 1.0;  // P(T > n), n-1, n-2
  long n = 0;
  while (surv >= tail_tol) {
    if (n >= max_horizon) {
      throw ResourceLimitError("expected_duration: horizon cap " + std::to_string(max_horizon) +
                                   " reached, partial sum " + format_scalar(sum),
                               sum);
    }
    sum += surv;
    double plus = 0, minus = 0;
    stepper.step(plus, minus);
    surv_prev2 = surv_prev;
    surv_prev = surv;
    surv = stepper.survivors();
    ++n;
  }
  if (surv > 0) {
    // Survival decays geometrically; the two-step ratio removes the parity wobble.
    double rho = surv_prev2 > 0 ? std::sqrt(surv / surv_prev2) : 0.0;
    if (rho < 1.0) sum += surv / (1.0 - rho);
  }
  return sum;
}

int horizon_for_tail(const WalkParams<double>& w, double tol, long max_horizon) {
  w.validate();
  FloatStepper stepper(w);
  for (long n = 1; n <= max_horizon; ++n) {
    double plus = 0, minus = 0;
    stepper.step(plus, minus);
    if (n >= w.k && stepper.survivors() < tol) return static_cast<int>(n);
  }
  throw ResourceLimitError("horizon_for_tail: cap reached", static_cast<double>(max_horizon));
}

int duration_quantile(const WalkParams<double>& w, double level, long max_horizon) {
  w.validate();
  if (!(level > 0 && level < 1)) throw std::invalid_argument("quantile level must lie in (0,1)");
  FloatStepper stepper(w);
  for (long n = 1; n <= max_horizon; ++n) {
    double plus = 0, minus = 0;
    stepper.step(plus, minus);
    if (stepper.survivors() <= 1.0 - level) return static_cast<int>(n);
  }
  throw ResourceLimitError("duration_quantile: cap reached", static_cast<double>(max_horizon));
}

template struct JointDurationWinner<double>;
template struct JointDurationWinner<Rational>;
template DurationDist<double> duration_pmf(const WalkParams<double>&, int);
template DurationDist<Rational> duration_pmf(const WalkParams<Rational>&, int);
template double duration_tail(const WalkParams<double>&, int);
template Rational duration_tail(const WalkParams<Rational>&, int);
template JointDurationWinner<double> joint_duration_winner(const WalkParams<double>&, int);
template JointDurationWinner<Rational> joint_duration_winner(const WalkParams<Rational>&, int);

}  // namespace ruin
