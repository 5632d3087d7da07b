// Scalar backends shared by every exact/float computation.
#pragma once

#include <gmpxx.h>

#include <concepts>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ruin {

using Rational = mpq_class;

enum class ScalarMode { exact, floating };

template <typename T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Rational>;

/// Raised when a computation needs more steps than its cap allows.
class ResourceLimitError : public std::runtime_error {
 public:
  ResourceLimitError(const std::string& what, double partial)
      : std::runtime_error(what), partial_(partial) {}
  double partial() const { return partial_; }

 private:
  double partial_;
};

/// Correctly rounded when numerator and denominator are exact doubles
/// (mpq_get_d truncates instead).
double nearest_double(const Rational& x);

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return nearest_double(x); }

template <Scalar T>
T from_rational(const Rational& r) {
  if constexpr (std::same_as<T, double>) {
    return nearest_double(r);
  } else {
    return r;
  }
}

template <Scalar T>
T ipow(const T& base, int exponent) {
  T result(1);
  T b = base;
  for (unsigned e = static_cast<unsigned>(exponent); e != 0; e >>= 1) {
    if (e & 1u) result *= b;
    b *= b;
  }
  return result;
}

template <Scalar T>
T abs_value(const T& x) {
  return x < 0 ? T(-x) : x;
}

/// Parses "num/den", an integer, or a terminating decimal ("0.35", "1e-3")
/// into an exact, canonical rational.
Rational parse_rational(std::string_view text);

double parse_double(std::string_view text);

/// Shortest decimal that parses back to the same binary64 value.
std::string format_scalar(double x);

/// Always "num/den", including integers ("1/1").
std::string format_scalar(const Rational& x);

}  // namespace ruin
