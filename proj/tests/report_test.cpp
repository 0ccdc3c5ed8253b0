#include <cmath>
#include <cstdlib>
#include <limits>

#include <gtest/gtest.h>

#include "ionfab/report.hpp"
#include "ionfab/rng.hpp"

using namespace ionfab;

TEST(Number, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(100.0), "100");
  EXPECT_EQ(format_number(1e-5), "1e-05");
  EXPECT_EQ(format_number(-2.5), "-2.5");
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double x = std::ldexp(rng.uniform() - 0.5, static_cast<int>(rng.below(200)) - 100);
    EXPECT_EQ(std::stod(format_number(x)), x) << format_number(x);
  }
  EXPECT_EQ(std::strtod(format_number(std::numeric_limits<double>::max()).c_str(), nullptr), std::numeric_limits<double>::max());
  EXPECT_EQ(std::strtod(format_number(std::numeric_limits<double>::denorm_min()).c_str(), nullptr),
            std::numeric_limits<double>::denorm_min());
}

TEST(Csv, Quoting) {
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_escape("two\nlines"), "\"two\nlines\"");
  EXPECT_EQ(csv_line({"x", "y,z", ""}), "x,\"y,z\",\n");
  CsvTable t;
  t.header = {"a", "b"};
  t.rows = {{"1", "2"}, {"3", "4"}};
  EXPECT_EQ(t.str(), "a,b\n1,2\n3,4\n");
}

TEST(Json, SortedAndTerminated) {
  nlohmann::json j = {{"zeta", 1}, {"alpha", {{"y", 2}, {"b", 3}}}};
  const auto text = json_text(j);
  EXPECT_LT(text.find("alpha"), text.find("zeta"));
  EXPECT_LT(text.find("\"b\""), text.find("\"y\""));
  EXPECT_EQ(text.back(), '\n');
  EXPECT_EQ(nlohmann::json::parse(text), j);
  EXPECT_EQ(json_text(nlohmann::json::parse(text)), text);
}
