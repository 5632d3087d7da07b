#include "ruin/io.hpp"

#include <sstream>
#include <stdexcept>

namespace ruin::io {

Json scalar_json(double x) { return x; }
Json scalar_json(const Rational& x) { return format_scalar(x); }

template <>
double scalar_from_json<double>(const Json& j) {
  if (j.is_string()) return parse_double(j.get<std::string>());
  return j.get<double>();
}

template <>
Rational scalar_from_json<Rational>(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw std::invalid_argument("exact scalars are serialized as \"num/den\" strings");
}

template <>
double scalar_from_text<double>(std::string_view text) {
  return parse_double(text);
}

template <>
Rational scalar_from_text<Rational>(std::string_view text) {
  return parse_rational(text);
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw std::invalid_argument("CSV row width does not match header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  emit(header_);
  for (const auto& r : rows_) emit(r);
  return out;
}

CsvTable parse_csv(std::string_view text) {
  auto split = [](std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      auto comma = line.find(',', start);
      cells.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return cells;
  };
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    if (nl > start) lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  if (lines.empty()) throw std::invalid_argument("empty CSV");
  CsvTable table(split(lines.front()));
  for (std::size_t i = 1; i < lines.size(); ++i) table.add_row(split(lines[i]));
  return table;
}

template <Scalar T>
CsvTable dist_to_csv(const DurationDist<T>& d) {
  CsvTable t({"n", "prob"});
  for (int n = d.k; n <= d.horizon(); n += 2) t.add_row({std::to_string(n), format_scalar(d.prob(n))});
  return t;
}

template <Scalar T>
Json dist_to_json(const DurationDist<T>& d) {
  Json j;
  j["k"] = d.k;
  j["parity"] = d.even_parity() ? "even" : "odd";
  j["horizon"] = d.horizon();
  Json entries = Json::array();
  for (int n = d.k; n <= d.horizon(); n += 2) {
    Json e;
    e["n"] = n;
    e["prob"] = scalar_json(d.prob(n));
    entries.push_back(std::move(e));
  }
  j["entries"] = std::move(entries);
  j["truncation_mass"] = scalar_json(d.truncation_mass);
  return j;
}

template <Scalar T>
DurationDist<T> dist_from_json(const Json& j) {
  DurationDist<T> d;
  d.k = j.at("k").get<int>();
  const int horizon = j.at("horizon").get<int>();
  if (horizon < 0) throw std::invalid_argument("negative horizon");
  d.pmf.assign(static_cast<std::size_t>(horizon) + 1, T(0));
  for (const auto& e : j.at("entries")) {
    const int n = e.at("n").get<int>();
    if (n < 0 || n > horizon) throw std::invalid_argument("entry outside the horizon");
    d.pmf[static_cast<std::size_t>(n)] = scalar_from_json<T>(e.at("prob"));
  }
  d.truncation_mass = scalar_from_json<T>(j.at("truncation_mass"));
  return d;
}

template <Scalar T>
DurationDist<T> dist_from_csv(const CsvTable& t, int k) {
  DurationDist<T> d;
  d.k = k;
  int horizon = k;
  for (const auto& r : t.rows()) horizon = std::max(horizon, std::stoi(r.at(0)));
  d.pmf.assign(static_cast<std::size_t>(horizon) + 1, T(0));
  T sum(0);
  for (const auto& r : t.rows()) {
    T v = scalar_from_text<T>(r.at(1));
    d.pmf[static_cast<std::size_t>(std::stoi(r.at(0)))] = v;
    sum += v;
  }
  d.truncation_mass = T(1) - sum;
  return d;
}

std::vector<Rational> parse_rational_grid(std::string_view text) {
  std::vector<Rational> out;
  if (text.empty()) throw std::invalid_argument("empty grid");
  auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    std::size_t start = 0;
    while (start <= text.size()) {
      auto comma = text.find(',', start);
      if (comma == std::string_view::npos) comma = text.size();
      out.push_back(parse_rational(text.substr(start, comma - start)));
      start = comma + 1;
    }
    return out;
  }
  auto second = text.find(':', colon + 1);
  if (second == std::string_view::npos) throw std::invalid_argument("range grid must be a:b:step");
  const Rational lo = parse_rational(text.substr(0, colon));
  const Rational hi = parse_rational(text.substr(colon + 1, second - colon - 1));
  const Rational step = parse_rational(text.substr(second + 1));
  if (step <= 0) throw std::invalid_argument("grid step must be positive");
  if (hi < lo) throw std::invalid_argument("grid end is below its start");
  for (Rational x = lo; x <= hi; x += step) {
    out.push_back(x);
    if (out.size() > 10'000'000) throw std::invalid_argument("grid too large");
  }
  return out;
}

std::vector<double> parse_double_grid(std::string_view text) {
  std::vector<double> out;
  for (const auto& r : parse_rational_grid(text)) out.push_back(nearest_double(r));
  return out;
}

template CsvTable dist_to_csv(const DurationDist<double>&);
template CsvTable dist_to_csv(const DurationDist<Rational>&);
template Json dist_to_json(const DurationDist<double>&);
template Json dist_to_json(const DurationDist<Rational>&);
template DurationDist<double> dist_from_json<double>(const Json&);
template DurationDist<Rational> dist_from_json<Rational>(const Json&);
template DurationDist<double> dist_from_csv<double>(const CsvTable&, int);
template DurationDist<Rational> dist_from_csv<Rational>(const CsvTable&, int);

}  // namespace ruin::io
