#include "relayqkd/sift.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "relayqkd/errors.hpp"

namespace relayqkd {

namespace {

// Basis lookup tables indexed [node][slot - first].
struct BasisIndex {
  std::vector<std::vector<std::optional<Basis>>> emitted;
  std::vector<std::vector<std::optional<Basis>>> detected;
  std::vector<std::vector<bool>> pass_through;  // emission is this slot's own measurement
  std::vector<std::vector<bool>> padded;
};

BasisIndex index_announcements(const RecordBook& book, std::span<const Announcement> announcements) {
  const std::size_t n = book.n_nodes();
  const std::size_t slots = book.slot_count();
  if (slots == 0 && !announcements.empty()) throw InputError("announcements given for an empty record set");

  BasisIndex idx;
  idx.emitted.assign(n, std::vector<std::optional<Basis>>(slots));
  idx.detected.assign(n, std::vector<std::optional<Basis>>(slots));
  idx.pass_through.assign(n, std::vector<bool>(slots, false));
  idx.padded.assign(n, std::vector<bool>(slots, false));

  Timeslot lo = book.end_slot();
  Timeslot hi = book.first_slot() - 1;
  for (const Announcement& a : announcements) {
    if (!book.contains(a.timeslot)) {
      throw InputError("announcement for slot " + std::to_string(a.timeslot) + " outside record range [" +
                       std::to_string(book.first_slot()) + ", " + std::to_string(book.end_slot()) + ")");
    }
    if (a.node >= n) throw InputError("announcement from node " + std::to_string(a.node) + " outside the chain");
    lo = std::min(lo, a.timeslot);
    hi = std::max(hi, a.timeslot);
    const auto s = static_cast<std::size_t>(a.timeslot - book.first_slot());
    if (a.kind == AnnouncementKind::Emitted) {
      idx.emitted[a.node][s] = a.basis;
      idx.padded[a.node][s] = a.padded;
      idx.pass_through[a.node][s] = !a.padded && a.resend_of.value_or(a.timeslot) == a.timeslot;
    } else {
      idx.detected[a.node][s] = a.basis;
    }
  }
  if (slots > 0 && (lo != book.first_slot() || hi != book.end_slot() - 1)) {
    throw InputError("announcements cover slots [" + std::to_string(lo) + ", " + std::to_string(hi) +
                     "] but records cover [" + std::to_string(book.first_slot()) + ", " +
                     std::to_string(book.end_slot() - 1) + "]");
  }
  return idx;
}

}  // namespace

std::vector<Announcement> announce(const RecordBook& book) {
  std::vector<Announcement> out;
  out.reserve(book.slot_count() * book.n_nodes() * 2);
  for (Timeslot t = book.first_slot(); t < book.end_slot(); ++t) {
    for (NodeIndex node = 0; node < book.n_nodes(); ++node) {
      const SlotRecord& r = book.at(node, t);
      if (r.received) {
        out.push_back(Announcement{node, t, AnnouncementKind::Detected, r.received->basis, false, std::nullopt});
      }
      if (r.emitted) {
        out.push_back(Announcement{node, t, AnnouncementKind::Emitted, r.emitted->state.basis,
                                   r.emitted->origin == Origin::Padded, r.emitted->resend_of});
      }
    }
  }
  return out;
}

TokenLists build_tokens(const RecordBook& book, std::span<const Announcement> announcements) {
  const BasisIndex idx = index_announcements(book, announcements);
  TokenLists lists(book.n_nodes() - 1);
  for (std::size_t link = 0; link < lists.size(); ++link) {
    const auto& tx = idx.emitted[link];
    const auto& rx = idx.detected[link + 1];
    for (std::size_t s = 0; s < book.slot_count(); ++s) {
      if (tx[s] && rx[s] && *tx[s] == *rx[s]) {
        lists[link].push_back(LinkToken{link, book.first_slot() + static_cast<Timeslot>(s)});
      }
    }
  }
  return lists;
}

std::vector<KeyChain> schedule_chains(const TokenLists& tokens) {
  if (tokens.empty()) return {};
  std::size_t count = tokens.front().size();
  for (const auto& l : tokens) count = std::min(count, l.size());

  std::vector<KeyChain> chains(count);
  for (std::size_t j = 0; j < count; ++j) {
    chains[j].tokens.reserve(tokens.size());
    for (const auto& l : tokens) chains[j].tokens.push_back(l[j]);
  }
  return chains;
}

std::vector<Bit> chain_announcements(const KeyChain& chain, const RecordBook& book) {
  const std::size_t links = book.n_nodes() - 1;
  if (chain.tokens.size() != links) {
    throw IntegrityError("chain has " + std::to_string(chain.tokens.size()) + " tokens for " +
                         std::to_string(links) + " links");
  }
  std::vector<Bit> deltas;
  deltas.reserve(links - 1);
  for (NodeIndex relay = 1; relay < links; ++relay) {
    const LinkToken& in = chain.tokens[relay - 1];
    const LinkToken& out = chain.tokens[relay];
    if (!book.contains(in.timeslot) || !book.contains(out.timeslot)) {
      throw IntegrityError("relay " + std::to_string(relay) + " has no record for a chain token slot");
    }
    const SlotRecord& rx = book.at(relay, in.timeslot);
    const SlotRecord& tx = book.at(relay, out.timeslot);
    if (!rx.received) {
      throw IntegrityError("relay " + std::to_string(relay) + " holds no measured bit for slot " +
                           std::to_string(in.timeslot));
    }
    if (!tx.emitted) {
      throw IntegrityError("relay " + std::to_string(relay) + " holds no emitted bit for slot " +
                           std::to_string(out.timeslot));
    }
    deltas.push_back(rx.received->bit ^ tx.emitted->state.bit);
  }
  return deltas;
}

SiftedKey assemble_keys(std::span<const KeyChain> chains, std::span<const std::vector<Bit>> deltas,
                        const RecordBook& book) {
  if (chains.size() != deltas.size()) {
    throw std::invalid_argument("got " + std::to_string(deltas.size()) + " announcement sets for " +
                                std::to_string(chains.size()) + " chains");
  }
  SiftedKey key;
  key.alice.reserve(chains.size());
  key.bob.reserve(chains.size());
  key.source_slots.reserve(chains.size());
  const NodeIndex bob = book.n_nodes() - 1;
  for (std::size_t j = 0; j < chains.size(); ++j) {
    const auto& tokens = chains[j].tokens;
    const SlotRecord& a = book.at(0, tokens.front().timeslot);
    const SlotRecord& b = book.at(bob, tokens.back().timeslot);
    if (!a.emitted || !b.received) throw IntegrityError("chain endpoint token without a private bit");
    Bit bob_bit = b.received->bit;
    for (Bit d : deltas[j]) bob_bit ^= d;
    key.alice.push_back(a.emitted->state.bit);
    key.bob.push_back(bob_bit);
    key.source_slots.push_back(tokens.front().timeslot);
  }
  return key;
}

SiftedKey bridge_keys(std::span<const KeyChain> chains, const RecordBook& book) {
  std::vector<std::vector<Bit>> deltas;
  deltas.reserve(chains.size());
  for (const auto& c : chains) deltas.push_back(chain_announcements(c, book));
  return assemble_keys(chains, deltas, book);
}

SiftedKey sift_naive(const RecordBook& book, std::span<const Announcement> announcements) {
  const BasisIndex idx = index_announcements(book, announcements);
  const std::size_t n = book.n_nodes();
  SiftedKey key;
  for (std::size_t s = 0; s < book.slot_count(); ++s) {
    const auto basis = idx.emitted[0][s];
    if (!basis) continue;
    bool usable = true;
    for (NodeIndex node = 1; node < n && usable; ++node) {
      usable = idx.detected[node][s] == basis;
      if (usable && node + 1 < n) usable = idx.emitted[node][s] == basis && idx.pass_through[node][s];
    }
    if (!usable) continue;
    const Timeslot t = book.first_slot() + static_cast<Timeslot>(s);
    key.alice.push_back(book.at(0, t).emitted->state.bit);
    key.bob.push_back(book.at(n - 1, t).received->bit);
    key.source_slots.push_back(t);
  }
  return key;
}

QberEstimate estimate_qber(std::span<const Bit> alice, std::span<const Bit> bob, double sample_fraction,
                           RngStream& rng) {
  if (alice.size() != bob.size()) {
    throw std::invalid_argument("key lengths differ: " + std::to_string(alice.size()) + " vs " +
                                std::to_string(bob.size()));
  }
  if (alice.empty()) throw std::domain_error("error rate of an empty key is undefined");
  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0)) {
    throw std::invalid_argument("sample fraction must lie in (0, 1], got " + std::to_string(sample_fraction));
  }

  const std::size_t len = alice.size();
  const auto k = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(sample_fraction * static_cast<double>(len))), 1, len);

  std::vector<std::size_t> positions(len);
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  std::sample(positions.begin(), positions.end(), std::back_inserter(chosen), k, rng.engine());

  QberEstimate est;
  est.consumed.assign(len, false);
  for (std::size_t p : chosen) {
    est.consumed[p] = true;
    if (alice[p] != bob[p]) ++est.errors;
  }
  est.sampled = k;
  est.rate = static_cast<double>(est.errors) / static_cast<double>(k);
  return est;
}

}  // namespace relayqkd
