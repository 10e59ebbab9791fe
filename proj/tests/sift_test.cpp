#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "chain_builder.hpp"
#include "relayqkd/errors.hpp"
#include "relayqkd/sift.hpp"
#include "relayqkd/simulator.hpp"

namespace relayqkd {
namespace {

using testing::book_from_slots;

std::vector<std::size_t> links_with_tokens(const TokenLists& tokens, Timeslot t) {
  std::vector<std::size_t> out;
  for (const auto& l : tokens) {
    for (const auto& tok : l) {
      if (tok.timeslot == t) out.push_back(tok.link);
    }
  }
  return out;
}

TokenLists tokens_of(const RecordBook& book) { return build_tokens(book, announce(book)); }

TEST(AnnounceTest, CarriesBasesNotBits) {
  const RecordBook book = simulate(ChainSetup::uniform(4, 0.6, RelayMode::padding()), 200, 1);
  for (const Announcement& a : announce(book)) {
    const SlotRecord& r = book.at(a.node, a.timeslot);
    if (a.kind == AnnouncementKind::Detected) {
      ASSERT_TRUE(r.received);
      EXPECT_EQ(a.basis, r.received->basis);
    } else {
      ASSERT_TRUE(r.emitted);
      EXPECT_EQ(a.basis, r.emitted->state.basis);
      EXPECT_EQ(a.padded, r.emitted->origin == Origin::Padded);
    }
  }
}

TEST(BuildTokensTest, LosslessLinksMatchHalfTheTime) {
  const RecordBook book = simulate(ChainSetup::uniform(3, 1.0), 100000, 2);
  const TokenLists tokens = tokens_of(book);
  ASSERT_EQ(tokens.size(), 2U);
  for (const auto& l : tokens) EXPECT_NEAR(l.size(), 50000.0, 500.0);
}

TEST(BuildTokensTest, XXYYGivesOuterLinks) {
  const RecordBook book = book_from_slots({{"XXYY", {1, 1, 0, 0}}});
  EXPECT_EQ(links_with_tokens(tokens_of(book), 0), (std::vector<std::size_t>{0, 2}));
}

TEST(BuildTokensTest, XYYXGivesMiddleLink) {
  const RecordBook book = book_from_slots({{"XYYX", {1, 0, 0, 1}}});
  EXPECT_EQ(links_with_tokens(tokens_of(book), 0), (std::vector<std::size_t>{1}));
}

TEST(BuildTokensTest, RejectsMismatchedSlotRange) {
  const RecordBook book = simulate(ChainSetup::uniform(3, 1.0), 10, 3);
  auto ann = announce(book);
  ann.push_back(Announcement{0, 10, AnnouncementKind::Emitted, Basis::X, false, std::nullopt});
  EXPECT_THROW(build_tokens(book, ann), InputError);

  const RecordBook shorter = simulate(ChainSetup::uniform(3, 1.0), 12, 3);
  EXPECT_THROW(build_tokens(shorter, announce(book)), InputError);
}

TEST(BuildTokensTest, PaddedEmissionOnlyFeedsDownstreamLink) {
  const RecordBook book = simulate(ChainSetup::uniform(4, 0.4, RelayMode::padding()), 20000, 4);
  const TokenLists tokens = tokens_of(book);
  std::size_t padded_tokens = 0;
  for (std::size_t link = 1; link < 3; ++link) {
    for (const LinkToken& tok : tokens[link]) padded_tokens += book.at(link, tok.timeslot).emitted->origin == Origin::Padded;
  }
  for (std::size_t link = 0; link < 2; ++link) {
    for (const LinkToken& tok : tokens[link]) {
      // The downstream node of this token detected, so it cannot have padded in that slot.
      const auto& e = book.at(link + 1, tok.timeslot).emitted;
      ASSERT_TRUE(e);
      EXPECT_NE(e->origin, Origin::Padded);
    }
  }
  EXPECT_GT(padded_tokens, 0U);
}

TEST(ScheduleTest, ChainCountIsMinimumOfLinkCounts) {
  TokenLists tokens(3);
  for (Timeslot t = 0; t < 3; ++t) tokens[0].push_back({0, t});
  for (Timeslot t = 0; t < 5; ++t) tokens[1].push_back({1, t + 10});
  for (Timeslot t = 0; t < 2; ++t) tokens[2].push_back({2, t + 20});
  const auto chains = schedule_chains(tokens);
  ASSERT_EQ(chains.size(), 2U);
  EXPECT_EQ(chains[1].tokens, (std::vector<LinkToken>{{0, 1}, {1, 11}, {2, 21}}));
  EXPECT_TRUE(schedule_chains({}).empty());
}

TEST(ScheduleTest, MismatchedSlotsBridgeIntoOneChain) {
  const RecordBook book = book_from_slots({{"XXYY", {1, 1, 0, 0}}, {"XYYX", {1, 0, 0, 1}}});
  const auto chains = schedule_chains(tokens_of(book));
  ASSERT_EQ(chains.size(), 1U);
  EXPECT_EQ(chains[0].tokens, (std::vector<LinkToken>{{0, 0}, {1, 1}, {2, 0}}));
}

TEST(ScheduleTest, LosslessChainFractionIsHalf) {
  for (std::size_t n : {3U, 4U, 5U, 6U}) {
    const RecordBook book = simulate(ChainSetup::uniform(n, 1.0), 100000, 10 + n);
    EXPECT_NEAR(schedule_chains(tokens_of(book)).size() / 1e5, 0.5, 0.01) << "n=" << n;
  }
}

TEST(ChainAnnouncementsTest, XorOfAdjacentTokenBits) {
  // Token bits a=1 (link 0, slot 0), c=0 (link 1, slot 1), d=1 (link 2, slot 0).
  const RecordBook book = book_from_slots({{"XXYY", {1, 1, 1, 1}}, {"XYYX", {0, 0, 0, 0}}});
  const auto chains = schedule_chains(tokens_of(book));
  ASSERT_EQ(chains.size(), 1U);
  const auto deltas = chain_announcements(chains[0], book);
  EXPECT_EQ(deltas, (std::vector<Bit>{kOne, kOne}));
  const std::vector<std::vector<Bit>> all{deltas};
  const SiftedKey key = assemble_keys(chains, all, book);
  EXPECT_EQ(key.alice, std::vector<Bit>{kOne});
  EXPECT_EQ(key.bob, std::vector<Bit>{kOne});
}

TEST(ChainAnnouncementsTest, BridgedSlotsRecoverAliceBit) {
  // Outer links from an XXYY slot, middle link from an XYYX slot.
  const RecordBook book = book_from_slots({{"XXYY", {1, 1, 0, 0}}, {"XYYX", {1, 0, 0, 1}}});
  const auto chains = schedule_chains(tokens_of(book));
  ASSERT_EQ(chains.size(), 1U);
  const auto deltas = chain_announcements(chains[0], book);
  EXPECT_EQ(deltas, (std::vector<Bit>{kOne, kZero}));
  const SiftedKey key = bridge_keys(chains, book);
  EXPECT_EQ(key.bob, std::vector<Bit>{kOne});
  EXPECT_EQ(key.alice, key.bob);
  EXPECT_EQ(key.source_slots, std::vector<Timeslot>{0});
}

TEST(ChainAnnouncementsTest, AllZeroBits) {
  const RecordBook book = book_from_slots({{"XXYY", {0, 0, 0, 0}}, {"XYYX", {0, 0, 0, 0}}});
  const auto chains = schedule_chains(tokens_of(book));
  EXPECT_EQ(chain_announcements(chains.at(0), book), (std::vector<Bit>{kZero, kZero}));
  EXPECT_EQ(bridge_keys(chains, book).bob, std::vector<Bit>{kZero});
}

TEST(ChainAnnouncementsTest, MissingRelayBitIsIntegrityError) {
  const RecordBook book = book_from_slots({{"XXYY", {1, 1, 0, 0}}, {"XYYX", {1, 0, 0, 1}}});
  KeyChain bad{{{0, 0}, {1, 1}, {2, 0}}};
  RecordBook broken = book;
  SlotRecord r1 = broken.at(1, 0);
  r1.received.reset();
  broken.put(r1);
  EXPECT_THROW(chain_announcements(bad, broken), IntegrityError);

  KeyChain out_of_range{{{0, 0}, {1, 7}, {2, 0}}};
  EXPECT_THROW(chain_announcements(out_of_range, book), IntegrityError);
  EXPECT_THROW(chain_announcements(KeyChain{{{0, 0}}}, book), IntegrityError);
}

TEST(AssembleTest, ZeroChainsGiveEmptyKeys) {
  const RecordBook book = simulate(ChainSetup::uniform(4, 0.0), 100, 5);
  const auto chains = schedule_chains(tokens_of(book));
  EXPECT_TRUE(chains.empty());
  const SiftedKey key = bridge_keys(chains, book);
  EXPECT_TRUE(key.alice.empty());
  EXPECT_TRUE(key.bob.empty());
}

TEST(AssembleTest, EavesdropperCausesQuarterDisagreement) {
  ChainSetup setup = ChainSetup::uniform(4, 1.0);
  setup.eve = EavesdropperConfig{1};
  const RecordBook book = simulate(setup, 100000, 6);
  const SiftedKey key = bridge_keys(schedule_chains(tokens_of(book)), book);
  std::size_t diff = 0;
  for (std::size_t i = 0; i < key.size(); ++i) diff += key.alice[i] != key.bob[i];
  EXPECT_NEAR(diff / double(key.size()), 0.25, 0.02);
}

TEST(SiftNaiveTest, EndToEndFractionHalvesPerNode) {
  const std::vector<std::pair<std::size_t, double>> cases = {{2, 0.5}, {3, 0.25}, {4, 0.125}};
  for (const auto& [n, want] : cases) {
    const RecordBook book = simulate(ChainSetup::uniform(n, 1.0), 100000, 20 + n);
    const SiftedKey key = sift_naive(book, announce(book));
    EXPECT_NEAR(key.size() / 1e5, want, 0.01) << "n=" << n;
    EXPECT_EQ(key.alice, key.bob);
  }
}

TEST(SiftNaiveTest, RequiresCommonBasisAndPassThrough) {
  const RecordBook book = book_from_slots({{"XXXX", {1, 1, 1, 1}}, {"XXYY", {0, 0, 1, 1}}, {"YYYY", {0, 0, 0, 0}}});
  const SiftedKey key = sift_naive(book, announce(book));
  EXPECT_EQ(key.source_slots, (std::vector<Timeslot>{0, 2}));
  EXPECT_EQ(key.alice, (std::vector<Bit>{kOne, kZero}));
}

TEST(QberTest, IdenticalAndComplementaryKeys) {
  const std::vector<Bit> a = {kOne, kZero, kOne, kOne};
  std::vector<Bit> flipped;
  for (Bit b : a) flipped.push_back(b ^ kOne);
  RngStream rng(1, "qber");
  EXPECT_EQ(estimate_qber(a, a, 1.0, rng).rate, 0.0);
  EXPECT_EQ(estimate_qber(a, flipped, 1.0, rng).rate, 1.0);
}

TEST(QberTest, SampleIsConsumed) {
  std::vector<Bit> a(1000, kZero);
  RngStream rng(2, "qber");
  const QberEstimate est = estimate_qber(a, a, 0.1, rng);
  EXPECT_EQ(est.sampled, 100U);
  EXPECT_EQ(std::count(est.consumed.begin(), est.consumed.end(), true), 100);
}

TEST(QberTest, Errors) {
  RngStream rng(3, "qber");
  const std::vector<Bit> empty;
  const std::vector<Bit> one = {kOne};
  EXPECT_THROW(estimate_qber(empty, empty, 1.0, rng), std::domain_error);
  EXPECT_THROW(estimate_qber(one, empty, 1.0, rng), std::invalid_argument);
  EXPECT_THROW(estimate_qber(one, one, 0.0, rng), std::invalid_argument);
  EXPECT_THROW(estimate_qber(one, one, 1.5, rng), std::invalid_argument);
}

TEST(QberTest, EavesdropperFullSample) {
  ChainSetup setup = ChainSetup::uniform(3, 1.0);
  setup.eve = EavesdropperConfig{0};
  const RecordBook book = simulate(setup, 40000, 7);
  const SiftedKey key = bridge_keys(schedule_chains(tokens_of(book)), book);
  RngStream rng(7, "qber");
  EXPECT_NEAR(estimate_qber(key.alice, key.bob, 1.0, rng).rate, 0.25, 0.02);
}

// Randomised configurations: agreement, token soundness, scheduler bound and
// bridged >= naive must hold for every one of them.
TEST(SiftPropertyTest, InvariantsOverRandomChains) {
  RngStream gen(42, "property/sift");
  const std::vector<RelayMode> modes = {RelayMode::naive(), RelayMode::padding(), RelayMode::delay(1),
                                        RelayMode::delay(3), RelayMode::delay(17)};
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 2 + gen.next() % 7;
    ChainSetup setup;
    setup.topology = Topology(n);
    for (std::size_t h = 0; h + 1 < n; ++h) setup.transmittance.emplace_back(gen.uniform());
    setup.mode = modes[gen.next() % modes.size()];
    const std::size_t slots = 1 + gen.next() % 800;
    const RecordBook book = simulate(setup, slots, gen.next());
    const auto ann = announce(book);
    const TokenLists tokens = build_tokens(book, ann);
    const auto chains = schedule_chains(tokens);
    const SiftedKey bridged = bridge_keys(chains, book);
    const SiftedKey naive = sift_naive(book, ann);

    SCOPED_TRACE(::testing::Message() << "n=" << n << " mode=" << setup.mode.name() << " slots=" << slots);
    EXPECT_EQ(bridged.alice, bridged.bob);
    EXPECT_EQ(naive.alice, naive.bob);
    EXPECT_GE(bridged.size(), naive.size());

    std::size_t min_tokens = tokens.front().size();
    for (std::size_t link = 0; link < tokens.size(); ++link) {
      min_tokens = std::min(min_tokens, tokens[link].size());
      EXPECT_TRUE(std::is_sorted(tokens[link].begin(), tokens[link].end()));
      for (const LinkToken& tok : tokens[link]) {
        const auto& tx = book.at(link, tok.timeslot).emitted;
        const auto& rx = book.at(link + 1, tok.timeslot).received;
        ASSERT_TRUE(tx && rx);
        EXPECT_EQ(tx->state, *rx);
      }
    }
    EXPECT_EQ(chains.size(), min_tokens);
    std::vector<LinkToken> used;
    for (const auto& c : chains) used.insert(used.end(), c.tokens.begin(), c.tokens.end());
    std::sort(used.begin(), used.end());
    EXPECT_EQ(std::adjacent_find(used.begin(), used.end()), used.end());
  }
}

}  // namespace
}  // namespace relayqkd
