#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"
#include "relayqkd/analytics.hpp"
#include "relayqkd/simulator.hpp"

namespace relayqkd {
namespace {

TEST(FractionTest, UsefulAndEndToEnd) {
  EXPECT_EQ(useful_fraction(2), Fraction(1, 2));
  EXPECT_EQ(useful_fraction(3), Fraction(3, 4));
  EXPECT_EQ(useful_fraction(4), Fraction(7, 8));
  EXPECT_EQ(naive_end_to_end_fraction(3), Fraction(1, 4));
  EXPECT_EQ(naive_end_to_end_fraction(5), Fraction(1, 16));
  EXPECT_THROW(useful_fraction(1), std::domain_error);
  EXPECT_THROW(naive_end_to_end_fraction(0), std::domain_error);
  EXPECT_THROW(useful_fraction(63), std::domain_error);
}

TEST(EnumerationTest, AgreesWithClosedFormsAndOracle) {
  for (int n = 2; n <= kMaxEnumeratedNodes; ++n) {
    const PatternEnumeration e = enumerate_patterns(n);
    EXPECT_EQ(e.patterns.size(), std::size_t{1} << n);
    EXPECT_EQ(e.useful, useful_fraction(n)) << "n=" << n;
    EXPECT_EQ(e.end_to_end, naive_end_to_end_fraction(n)) << "n=" << n;
    EXPECT_EQ(e.end_to_end, oracle::all_same_basis_fraction(n)) << "n=" << n;
  }
  EXPECT_THROW(enumerate_patterns(13), std::domain_error);
  EXPECT_THROW(enumerate_patterns(1), std::domain_error);
}

TEST(EnumerationTest, ThreeNodeRows) {
  const PatternEnumeration e = enumerate_patterns(3);
  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto& p : e.patterns) {
    std::string spans;
    for (const auto& s : p.spans) spans += (spans.empty() ? "" : "; ") + span_label(s, 3);
    rows.emplace_back(pattern_label(p.bases), spans.empty() ? "none" : spans);
  }
  const std::vector<std::pair<std::string, std::string>> want = {
      {"XXX", "A - R1 - B"}, {"XXY", "A - R1"}, {"XYX", "none"}, {"XYY", "R1 - B"},
      {"YXX", "R1 - B"},     {"YXY", "none"},   {"YYX", "A - R1"}, {"YYY", "A - R1 - B"},
  };
  EXPECT_EQ(rows, want);
}

TEST(EnumerationTest, OnlyAlternatingPatternsHaveNoKey) {
  for (int n = 2; n <= 8; ++n) {
    std::vector<std::string> none;
    for (const auto& p : enumerate_patterns(n).patterns) {
      if (!p.any_key()) none.push_back(pattern_label(p.bases));
    }
    ASSERT_EQ(none.size(), 2U) << "n=" << n;
    if (n == 4) EXPECT_EQ(none, (std::vector<std::string>{"XYXY", "YXYX"}));
  }
}

TEST(EnumerationTest, SpanLabelsUseRelayNumbers) {
  EXPECT_EQ(span_label(KeySpan{1, 3}, 5), "R1 - R2 - R3");
  EXPECT_EQ(span_label(KeySpan{3, 4}, 5), "R3 - B");
}

TEST(OriginFractionTest, PowerOfTransmittance) {
  EXPECT_DOUBLE_EQ(origin_fraction(0.5, 1), 0.5);
  EXPECT_DOUBLE_EQ(origin_fraction(0.5, 3), 0.125);
  EXPECT_DOUBLE_EQ(origin_fraction(1.0, 7), 1.0);
  EXPECT_DOUBLE_EQ(origin_fraction(0.0, 2), 0.0);
  EXPECT_THROW(origin_fraction(1.2, 2), std::invalid_argument);
  EXPECT_THROW(origin_fraction(0.5, 0), std::invalid_argument);
}

TEST(OriginFractionTest, MatchesPaddedSimulation) {
  for (std::size_t hops : {1U, 2U, 3U, 4U}) {
    for (double xi : {0.3, 0.5, 0.8}) {
      const auto art = post_process(simulate(ChainSetup::uniform(hops + 1, xi, RelayMode::padding()), 50000, hops * 7));
      const RunSummary s = summarize(art, {});
      EXPECT_NEAR(*s.origin_fraction, origin_fraction(xi, hops), 0.01) << "hops=" << hops << " xi=" << xi;
    }
  }
}

TEST(SummarizeTest, EmptyRunHasNoRates) {
  const RunSummary s = summarize(post_process(simulate(ChainSetup::uniform(3, 0.5), 0, 1)), {});
  EXPECT_EQ(s.slots, 0U);
  EXPECT_EQ(s.chains, 0U);
  EXPECT_EQ(s.naive_key_bits, 0U);
  EXPECT_FALSE(s.chain_fraction);
  EXPECT_FALSE(s.naive_fraction);
  EXPECT_FALSE(s.origin_fraction);
  EXPECT_FALSE(s.qber);
  ASSERT_EQ(s.links.size(), 2U);
  EXPECT_FALSE(s.links[0].detection_rate);
  EXPECT_FALSE(s.links[0].viable);
}

TEST(SummarizeTest, LosslessThreeNodes) {
  const RunSummary s = summarize(post_process(simulate(ChainSetup::uniform(3, 1.0), 100000, 3)), {});
  EXPECT_NEAR(*s.naive_fraction, 0.25, 0.01);
  EXPECT_NEAR(*s.chain_fraction, 0.5, 0.01);
  EXPECT_DOUBLE_EQ(*s.origin_fraction, 1.0);
  EXPECT_EQ(s.key_disagreements, 0U);
  EXPECT_DOUBLE_EQ(*s.qber, 0.0);
  for (const auto& l : s.links) {
    EXPECT_DOUBLE_EQ(*l.detection_rate, 1.0);
    EXPECT_TRUE(*l.viable);
    EXPECT_NEAR(*l.token_rate, 0.5, 0.01);
  }
}

TEST(SummarizeTest, PaddedHalfTransmittance) {
  const RunSummary s = summarize(post_process(simulate(ChainSetup::uniform(4, 0.5, RelayMode::padding()), 100000, 4)),
                                 SummaryOptions{ReceiverModel{0.45}, 0.5, 4});
  for (const auto& l : s.links) {
    EXPECT_NEAR(*l.detection_rate, 0.5, 0.01);
    EXPECT_TRUE(*l.viable);
  }
  EXPECT_NEAR(*s.origin_fraction, 0.125, 0.01);
  EXPECT_GT(s.padded_emissions, 0U);
  EXPECT_EQ(s.qber_sampled, (s.chains + 1) / 2);
}

TEST(SummarizeTest, NaiveRelaysStarveDownstream) {
  const RunSummary s = summarize(post_process(simulate(ChainSetup::uniform(4, 0.5), 100000, 5)),
                                 SummaryOptions{ReceiverModel{0.45}, 1.0, 5});
  EXPECT_NEAR(*s.links[0].detection_rate, 0.5, 0.01);
  EXPECT_NEAR(*s.links[2].detection_rate, 0.125, 0.01);
  EXPECT_FALSE(*s.links[2].viable);
}

}  // namespace
}  // namespace relayqkd
