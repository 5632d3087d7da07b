#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ruin/io.hpp"
#include "ruin/markov_exact.hpp"

using namespace ruin;
using oracle::frac;

TEST(ParseRational, AcceptedForms) {
  EXPECT_EQ(parse_rational("1/2"), frac(1, 2));
  EXPECT_EQ(parse_rational("6/8"), frac(3, 4));
  EXPECT_EQ(parse_rational("-3/6"), frac(-1, 2));
  EXPECT_EQ(parse_rational("7"), 7);
  EXPECT_EQ(parse_rational("0.05"), frac(1, 20));
  EXPECT_EQ(parse_rational(".25"), frac(1, 4));
  EXPECT_EQ(parse_rational("1e-2"), frac(1, 100));
  EXPECT_EQ(parse_rational("2.5E1"), 25);
  EXPECT_EQ(parse_rational("0.1"), frac(1, 10));  // exact, not the binary double
}

TEST(ParseRational, RejectsMalformed) {
  for (const char* bad : {"", "abc", "1/0", "1/", "/2", "1.2.3", "1e", "0x10", "1/2/3", " 1"}) {
    EXPECT_THROW(parse_rational(bad), std::invalid_argument) << bad;
  }
}

TEST(ParseDouble, AcceptsFractions) {
  EXPECT_EQ(parse_double("0.25"), 0.25);
  EXPECT_EQ(parse_double("1/4"), 0.25);
  EXPECT_EQ(parse_double("3/10"), 0.3);  // rounded to nearest, not truncated
  EXPECT_EQ(nearest_double(frac(1, 3)), 1.0 / 3.0);
  EXPECT_THROW(parse_double("x"), std::invalid_argument);
}

TEST(FormatScalar, Forms) {
  EXPECT_EQ(format_scalar(frac(2, 4)), "1/2");
  EXPECT_EQ(format_scalar(Rational(1)), "1/1");
  EXPECT_EQ(format_scalar(Rational(0)), "0/1");
  EXPECT_EQ(format_scalar(0.1), "0.1");
  EXPECT_EQ(format_scalar(0.25), "0.25");
  for (double x : {1.0 / 3.0, 2.0 / 7.0, 1e-300, 123456.789}) EXPECT_EQ(parse_double(format_scalar(x)), x);
}

TEST(Grids, RangeAndList) {
  auto g = io::parse_rational_grid("0.05:0.5:0.05");
  ASSERT_EQ(g.size(), 10u);
  EXPECT_EQ(g.front(), frac(1, 20));
  EXPECT_EQ(g.back(), frac(1, 2));
  auto d = io::parse_double_grid("0:2:0.25");
  ASSERT_EQ(d.size(), 9u);
  EXPECT_EQ(d.back(), 2.0);
  auto fine = io::parse_double_grid("0.05:0.5:0.05");
  EXPECT_EQ(fine[2], 0.15);
  EXPECT_EQ(fine[6], 0.35);
  auto l = io::parse_double_grid("0.25,0.5,1,2,4");
  EXPECT_EQ(l, (std::vector<double>{0.25, 0.5, 1, 2, 4}));
  EXPECT_THROW(io::parse_rational_grid(""), std::invalid_argument);
  EXPECT_THROW(io::parse_rational_grid("0:1"), std::invalid_argument);
  EXPECT_THROW(io::parse_rational_grid("0:1:0"), std::invalid_argument);
  EXPECT_THROW(io::parse_rational_grid("1:0:0.1"), std::invalid_argument);
  EXPECT_THROW(io::parse_rational_grid("1,,2"), std::invalid_argument);
}

TEST(Csv, WriteAndParse) {
  io::CsvTable t({"a", "b"});
  t.add_row({"1", "x"});
  t.add_row({"2", "y"});
  EXPECT_EQ(t.str(), "a,b\n1,x\n2,y\n");
  auto back = io::parse_csv(t.str());
  EXPECT_EQ(back.header(), t.header());
  EXPECT_EQ(back.rows(), t.rows());
  EXPECT_THROW(t.add_row({"3"}), std::invalid_argument);
  EXPECT_THROW(io::parse_csv(""), std::invalid_argument);
}

TEST(DistSerialization, ExactRoundTrip) {
  for (int k = 1; k <= 5; ++k) {
    for (const Rational& p : {frac(1, 10), frac(2, 5), frac(1, 2)}) {
      auto d = duration_pmf(WalkParams<Rational>{p, k}, 30);
      auto from_json = io::dist_from_json<Rational>(io::Json::parse(io::dist_to_json(d).dump()));
      EXPECT_EQ(from_json.k, d.k);
      EXPECT_EQ(from_json.pmf, d.pmf);
      EXPECT_EQ(from_json.truncation_mass, d.truncation_mass);
      auto from_csv = io::dist_from_csv<Rational>(io::parse_csv(io::dist_to_csv(d).str()), k);
      for (int n = 0; n <= 30; ++n) EXPECT_EQ(from_csv.prob(n), d.prob(n));
      EXPECT_EQ(from_csv.truncation_mass, d.truncation_mass);
    }
  }
}

TEST(DistSerialization, FloatRoundTripIsBitExact) {
  for (int k = 2; k <= 6; ++k) {
    for (double p : {0.1, 0.37, 0.5}) {
      auto d = duration_pmf(WalkParams<double>{p, k}, 90);
      auto back = io::dist_from_json<double>(io::Json::parse(io::dist_to_json(d).dump()));
      EXPECT_EQ(back.pmf, d.pmf);
      EXPECT_EQ(back.truncation_mass, d.truncation_mass);
      auto from_csv = io::dist_from_csv<double>(io::parse_csv(io::dist_to_csv(d).str()), k);
      for (int n = 0; n <= 90; ++n) EXPECT_EQ(from_csv.prob(n), d.prob(n));
    }
  }
}

TEST(DistSerialization, JsonLayout) {
  auto d = duration_pmf(WalkParams<Rational>{frac(1, 2), 2}, 4);
  EXPECT_EQ(io::dist_to_json(d).dump(),
            R"({"k":2,"parity":"even","horizon":4,"entries":[{"n":2,"prob":"1/2"},{"n":4,"prob":"1/4"}],"truncation_mass":"1/4"})");
  EXPECT_THROW(io::scalar_from_json<Rational>(io::Json(0.5)), std::invalid_argument);
  EXPECT_EQ(io::scalar_from_json<Rational>(io::Json(3)), 3);
}
