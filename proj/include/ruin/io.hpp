// CSV / JSON artifacts. Rationals are written as "num/den" strings, floats as
// the shortest decimal that round-trips.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ruin/markov_exact.hpp"

namespace ruin::io {

using Json = nlohmann::ordered_json;

Json scalar_json(double x);
Json scalar_json(const Rational& x);

template <Scalar T>
T scalar_from_json(const Json& j);

template <Scalar T>
T scalar_from_text(std::string_view text);

/// Minimal CSV table: header row, ',' delimiter, LF line endings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(std::vector<std::string> row);
  std::string str() const;
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Parses text written by CsvTable (no quoting).
CsvTable parse_csv(std::string_view text);

template <Scalar T>
CsvTable dist_to_csv(const DurationDist<T>& d);

template <Scalar T>
Json dist_to_json(const DurationDist<T>& d);

template <Scalar T>
DurationDist<T> dist_from_json(const Json& j);

/// Rebuilds the pmf from (n, prob) rows; truncation mass is 1 - sum.
template <Scalar T>
DurationDist<T> dist_from_csv(const CsvTable& t, int k);

/// "a:b:step" (inclusive, exact stepping) or "a,b,c".
std::vector<Rational> parse_rational_grid(std::string_view text);
std::vector<double> parse_double_grid(std::string_view text);

}  // namespace ruin::io
