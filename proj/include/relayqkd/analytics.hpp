#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "relayqkd/core.hpp"
#include "relayqkd/nodes.hpp"
#include "relayqkd/sift.hpp"

namespace relayqkd {

using Fraction = boost::rational<std::int64_t>;

/// Fraction of slots that give a key between at least one pair of adjacent
/// nodes: 1 - 1/2^(n-1). Throws std::domain_error for n < 2.
Fraction useful_fraction(int n_nodes);

/// Fraction of slots where every node chose the same basis: 1/2^(n-1).
Fraction naive_end_to_end_fraction(int n_nodes);

inline constexpr int kMaxEnumeratedNodes = 12;

/// A run of nodes [first, last] that all chose the same basis.
struct KeySpan {
  NodeIndex first = 0;
  NodeIndex last = 0;
  friend bool operator==(const KeySpan&, const KeySpan&) = default;
};

struct PatternOutcome {
  std::vector<Basis> bases;
  /// Maximal runs of equal bases of length >= 2, left to right.
  std::vector<KeySpan> spans;
  bool end_to_end = false;

  bool any_key() const noexcept { return !spans.empty(); }
};

struct PatternEnumeration {
  int n_nodes = 0;
  std::vector<PatternOutcome> patterns;
  Fraction useful{0};
  Fraction end_to_end{0};
};

/// All 2^n equiprobable basis patterns, pattern i taking basis Y at node k
/// when bit (n-1-k) of i is set. Throws std::domain_error unless 2 <= n <= 12.
PatternEnumeration enumerate_patterns(int n_nodes);

/// "A - R1 - B" style label for a key span in an n-node chain.
std::string span_label(const KeySpan& span, std::size_t n_nodes);
std::string pattern_label(const std::vector<Basis>& bases);

/// Expected fraction of slots in which Bob detects a photon that started at
/// Alice: transmittance^hops.
double origin_fraction(double transmittance, std::size_t hops);

/// Everything post-processing produces for one run.
struct RunArtifacts {
  RecordBook book;
  std::vector<Announcement> announcements;
  TokenLists tokens;
  std::vector<KeyChain> chains;
  std::vector<std::vector<Bit>> deltas;
  SiftedKey bridged;
  SiftedKey naive;
};

/// Announcements, tokens, chain scheduling, relay XORs, key assembly and the
/// naive baseline, in that order.
RunArtifacts post_process(RecordBook book);

struct LinkSummary {
  std::size_t detections = 0;
  /// Slots in which the upstream node was transmitting: every slot for Alice
  /// and for naive or padding relays, burst slots for delay relays.
  std::size_t active_slots = 0;
  std::optional<double> detection_rate;
  std::size_t tokens = 0;
  std::optional<double> token_rate;
  std::optional<bool> viable;
};

struct RunSummary {
  std::size_t n_nodes = 0;
  std::size_t slots = 0;
  std::vector<LinkSummary> links;
  std::size_t naive_key_bits = 0;
  std::optional<double> naive_fraction;
  std::size_t chains = 0;
  std::optional<double> chain_fraction;
  std::size_t bob_detections = 0;
  std::optional<double> bob_detection_rate;
  std::size_t source_detections = 0;
  std::optional<double> origin_fraction;
  std::size_t padded_emissions = 0;
  std::size_t key_disagreements = 0;
  std::optional<double> qber;
  std::size_t qber_sampled = 0;
};

struct SummaryOptions {
  ReceiverModel receiver{0.0};
  double qber_sample_fraction = 1.0;
  std::uint64_t qber_seed = 0;
};

/// Deterministic given (artifacts, options). Rates over zero denominators are
/// reported absent rather than zero.
RunSummary summarize(const RunArtifacts& artifacts, const SummaryOptions& options);

}  // namespace relayqkd
