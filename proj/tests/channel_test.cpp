#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "relayqkd/channel.hpp"

namespace relayqkd {
namespace {

TEST(TransmittanceTest, RejectsOutOfRange) {
  EXPECT_THROW(Transmittance(-0.1), std::invalid_argument);
  EXPECT_THROW(Transmittance(1.5), std::invalid_argument);
  EXPECT_THROW(Transmittance(std::nan("")), std::invalid_argument);
  EXPECT_NO_THROW(Transmittance(0.0));
  EXPECT_NO_THROW(Transmittance(1.0));
}

TEST(TransmitTest, LosslessWithoutEveIsIdentity) {
  RngStream loss(1, "loss");
  RngStream rng(1, "src");
  for (int i = 0; i < 1000; ++i) {
    const PhotonState p = random_photon(rng);
    const auto out = transmit(p, ChannelParams{Transmittance(1.0)}, loss);
    ASSERT_TRUE(out.has_value());
    EXPECT_EQ(*out, p);
  }
}

TEST(TransmitTest, OpaqueChannelLosesEverything) {
  RngStream loss(2, "loss");
  RngStream eve(2, "eve");
  const EavesdropperConfig e{0};
  for (int i = 0; i < 1000; ++i) {
    EXPECT_FALSE(transmit(PhotonState{}, ChannelParams{Transmittance(0.0)}, loss).has_value());
    EXPECT_FALSE(transmit(PhotonState{}, ChannelParams{Transmittance(0.0)}, &e, loss, eve).has_value());
  }
}

TEST(TransmitTest, SurvivalRateWithinThreeSigma) {
  RngStream loss(3, "loss");
  constexpr int kN = 10000;
  for (double xi : {0.1, 0.3, 0.5, 0.9}) {
    int survived = 0;
    for (int i = 0; i < kN; ++i) survived += transmit(PhotonState{}, ChannelParams{Transmittance(xi)}, loss).has_value();
    EXPECT_NEAR(survived / double(kN), xi, 3 * std::sqrt(xi * (1 - xi) / kN)) << "xi=" << xi;
  }
}

TEST(TransmitTest, EveDoesNotPerturbLossPattern) {
  RngStream loss_a(4, "loss");
  RngStream loss_b(4, "loss");
  RngStream eve_rng(4, "eve");
  const EavesdropperConfig e{0};
  for (int i = 0; i < 2000; ++i) {
    const bool a = transmit(PhotonState{}, ChannelParams{Transmittance(0.6)}, loss_a).has_value();
    const bool b = transmit(PhotonState{}, ChannelParams{Transmittance(0.6)}, &e, loss_b, eve_rng).has_value();
    ASSERT_EQ(a, b);
  }
}

TEST(EavesdropperTest, ResentStateMatchesEnumeration) {
  const auto oracle = oracle::enumerate_intercept_resend();
  ASSERT_EQ(oracle.cases, 16U);
  RngStream loss(5, "loss");
  RngStream eve_rng(5, "eve");
  const EavesdropperConfig e{0};
  constexpr int kN = 10000;
  std::map<std::pair<int, int>, int> counts;
  for (int i = 0; i < kN; ++i) {
    const auto out = transmit(PhotonState{Basis::X, kZero}, ChannelParams{Transmittance(1.0)}, &e, loss, eve_rng);
    ASSERT_TRUE(out);
    ++counts[{out->basis == Basis::Y ? 1 : 0, out->bit.as_int()}];
  }
  for (const auto& [state, p] : oracle.delivered_given_x0) {
    EXPECT_NEAR(counts[state] / double(kN), boost::rational_cast<double>(p), 0.02);
  }
  EXPECT_EQ(counts[std::make_pair(0, 1)], 0);  // a matched Eve never flips the bit
}

TEST(EavesdropperTest, MatchedBasisErrorRateIsQuarter) {
  const auto oracle = oracle::enumerate_intercept_resend();
  EXPECT_EQ(oracle.matched_error_rate, oracle::Exact(1, 4));

  RngStream src(6, "src");
  RngStream loss(6, "loss");
  RngStream eve_rng(6, "eve");
  RngStream rx(6, "rx");
  const EavesdropperConfig e{0};
  int matched = 0;
  int errors = 0;
  while (matched < 10000) {
    const PhotonState sent = random_photon(src);
    const auto out = transmit(sent, ChannelParams{Transmittance(1.0)}, &e, loss, eve_rng);
    const Basis b = rx.basis();
    const Bit got = measure(*out, b, rx);
    if (b != sent.basis) continue;
    ++matched;
    errors += got != sent.bit;
  }
  EXPECT_NEAR(errors / double(matched), 0.25, 0.02);
}

}  // namespace
}  // namespace relayqkd
