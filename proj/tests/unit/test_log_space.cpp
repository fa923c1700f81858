#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "gds/math/log_space.hpp"

namespace {

using gds::kInf;
using gds::math::log1mexp;
using gds::math::log_add_exp;
using gds::math::log_sum_exp;

TEST(LogSumExp, MatchesDirectSumForModerateValues) {
  const std::vector<double> x{-1.0, 0.5, 2.0, -3.0};
  double direct = 0.0;
  for (double v : x) direct += std::exp(v);
  EXPECT_NEAR(log_sum_exp(x), std::log(direct), 1e-14);
}

TEST(LogSumExp, SurvivesValuesThatUnderflowExp) {
  const std::vector<double> x{-1000.0, -1000.0 + std::log(3.0)};
  EXPECT_NEAR(log_sum_exp(x), -1000.0 + std::log(4.0), 1e-12);
}

TEST(LogSumExp, EdgeCases) {
  EXPECT_EQ(log_sum_exp(std::vector<double>{}), -kInf);
  EXPECT_EQ(log_sum_exp(std::vector<double>{-kInf, -kInf}), -kInf);
  EXPECT_EQ(log_sum_exp(std::vector<double>{1.0, kInf}), kInf);
  EXPECT_DOUBLE_EQ(log_sum_exp(std::vector<double>{-kInf, 2.0}), 2.0);
}

TEST(LogAddExp, SymmetricAndExact) {
  EXPECT_NEAR(log_add_exp(std::log(2.0), std::log(5.0)), std::log(7.0), 1e-15);
  EXPECT_DOUBLE_EQ(log_add_exp(3.0, -1.0), log_add_exp(-1.0, 3.0));
  EXPECT_DOUBLE_EQ(log_add_exp(-kInf, 4.0), 4.0);
}

TEST(Log1mexp, AccurateAtBothEnds) {
  EXPECT_NEAR(log1mexp(1e-10), std::log(1e-10), 1e-9);  // 1 − e^{−x} ≈ x
  EXPECT_NEAR(log1mexp(50.0), -std::exp(-50.0), 1e-30);
  EXPECT_NEAR(log1mexp(1.0), std::log(1.0 - std::exp(-1.0)), 1e-15);
  EXPECT_EQ(log1mexp(0.0), -kInf);
  EXPECT_EQ(log1mexp(kInf), 0.0);
}

}  // namespace
