#pragma once

// Classical post-processing over the authenticated public channel.
//
// After transmission every node publishes, per timeslot, the bases it used
// (never the bit values). A link token is a (link, slot) pair where both ends
// of the link used the same basis on a delivered photon, so they privately
// share one bit. Chains take one token per link, possibly from different
// slots; each relay publishes the XOR of its two token bits and Bob undoes
// the flips to recover Alice's bit.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "relayqkd/core.hpp"
#include "relayqkd/nodes.hpp"

namespace relayqkd {

enum class AnnouncementKind : std::uint8_t { Detected, Emitted };

/// Public basis announcement. Carries no bit value.
struct Announcement {
  NodeIndex node = 0;
  Timeslot timeslot = 0;
  AnnouncementKind kind = AnnouncementKind::Emitted;
  Basis basis = Basis::X;
  bool padded = false;
  /// For delay relays: slot whose measurement is being re-emitted.
  std::optional<Timeslot> resend_of;

  friend bool operator==(const Announcement&, const Announcement&) = default;
};

/// Public projection of the private records, ordered by (slot, node, kind).
std::vector<Announcement> announce(const RecordBook& book);

struct LinkToken {
  std::size_t link = 0;
  Timeslot timeslot = 0;

  friend auto operator<=>(const LinkToken&, const LinkToken&) = default;
};

/// Tokens per link, each list ordered by timeslot.
using TokenLists = std::vector<std::vector<LinkToken>>;

/// Throws InputError when the announcements do not span the book's slot range.
TokenLists build_tokens(const RecordBook& book, std::span<const Announcement> announcements);

/// `tokens[i]` lies on link i.
struct KeyChain {
  std::vector<LinkToken> tokens;
};

/// FIFO zip of the per-link queues: chain j takes the j-th token of every
/// link. Produces min over links of the token counts.
std::vector<KeyChain> schedule_chains(const TokenLists& tokens);

/// XOR announcements of the relays of one chain, relay 1 first. Relay k XORs
/// the bit it measured on its link-(k-1) token with the bit it emitted on its
/// link-k token. Throws IntegrityError if a relay lacks either bit.
std::vector<Bit> chain_announcements(const KeyChain& chain, const RecordBook& book);

struct SiftedKey {
  std::vector<Bit> alice;
  std::vector<Bit> bob;
  /// Slot of Alice's bit for each key position.
  std::vector<Timeslot> source_slots;

  std::size_t size() const noexcept { return alice.size(); }
};

/// Alice keeps her link-0 token bit; Bob takes his last-link token bit XOR all
/// relay announcements of the chain.
SiftedKey assemble_keys(std::span<const KeyChain> chains, std::span<const std::vector<Bit>> deltas,
                        const RecordBook& book);

/// Convenience: announcements for every chain, then assembly.
SiftedKey bridge_keys(std::span<const KeyChain> chains, const RecordBook& book);

/// Baseline sifting: only slots where every node used the same basis on the
/// same photon, which every node detected, contribute a key bit.
SiftedKey sift_naive(const RecordBook& book, std::span<const Announcement> announcements);

struct QberEstimate {
  double rate = 0.0;
  std::size_t sampled = 0;
  std::size_t errors = 0;
  /// Positions revealed during the estimate; they must not enter the final key.
  std::vector<bool> consumed;
};

/// Disagreement rate on a uniformly drawn sample of ceil(fraction * size)
/// positions. Throws std::domain_error on empty keys.
QberEstimate estimate_qber(std::span<const Bit> alice, std::span<const Bit> bob, double sample_fraction,
                           RngStream& rng);

}  // namespace relayqkd
