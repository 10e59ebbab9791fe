#include <gtest/gtest.h>

#include "oracles.hpp"

namespace relayqkd::oracle {
namespace {

TEST(OracleTest, InterceptResendDistribution) {
  const EveEnumeration e = enumerate_intercept_resend();
  EXPECT_EQ(e.matched_error_rate, Exact(1, 4));
  Exact total{0};
  for (const auto& [state, p] : e.delivered_given_x0) total += p;
  EXPECT_EQ(total, Exact(1));
  EXPECT_EQ(e.delivered_given_x0.at({0, 0}), Exact(1, 2));
}

TEST(OracleTest, ExhaustiveChainsIsMinimum) {
  EXPECT_EQ(max_chains_exhaustive({3, 5, 2}), 2U);
  EXPECT_EQ(max_chains_exhaustive({0, 4}), 0U);
  EXPECT_EQ(max_chains_exhaustive({7}), 7U);
  EXPECT_EQ(max_chains_exhaustive({4, 4, 4}), 4U);
}

TEST(OracleTest, AllSameBasis) {
  EXPECT_EQ(all_same_basis_fraction(2), Exact(1, 2));
  EXPECT_EQ(all_same_basis_fraction(6), Exact(1, 32));
}

TEST(OracleTest, ChiSquare) {
  EXPECT_DOUBLE_EQ(chi_square_fair(50, 100), 0.0);
  EXPECT_DOUBLE_EQ(chi_square_fair(60, 100), 4.0);
  EXPECT_NEAR(chi_square_critical(0.01, 1), 6.635, 1e-3);
  EXPECT_NEAR(chi_square_critical(0.05, 3), 7.815, 1e-3);
}

}  // namespace
}  // namespace relayqkd::oracle
