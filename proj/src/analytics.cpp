#include "relayqkd/analytics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "relayqkd/errors.hpp"

namespace relayqkd {

namespace {

void require_chain_length(int n) {
  if (n < 2) throw std::domain_error("a chain needs at least 2 nodes, got " + std::to_string(n));
  if (n > 62) throw std::domain_error("chain of " + std::to_string(n) + " nodes overflows exact arithmetic");
}

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string node_name(NodeIndex i, std::size_t n_nodes) {
  if (i == 0) return "A";
  if (i + 1 == n_nodes) return "B";
  return "R" + std::to_string(i);
}

}  // namespace

Fraction useful_fraction(int n_nodes) {
  require_chain_length(n_nodes);
  return Fraction(1) - Fraction(1, std::int64_t{1} << (n_nodes - 1));
}

Fraction naive_end_to_end_fraction(int n_nodes) {
  require_chain_length(n_nodes);
  return Fraction(1, std::int64_t{1} << (n_nodes - 1));
}

PatternEnumeration enumerate_patterns(int n_nodes) {
  if (n_nodes < 2 || n_nodes > kMaxEnumeratedNodes) {
    throw std::domain_error("pattern enumeration supports 2..12 nodes, got " + std::to_string(n_nodes));
  }
  const auto n = static_cast<std::size_t>(n_nodes);
  const std::size_t total = std::size_t{1} << n;

  PatternEnumeration out;
  out.n_nodes = n_nodes;
  out.patterns.reserve(total);
  std::int64_t useful = 0;
  std::int64_t end_to_end = 0;
  for (std::size_t code = 0; code < total; ++code) {
    PatternOutcome p;
    p.bases.resize(n);
    for (std::size_t k = 0; k < n; ++k) p.bases[k] = ((code >> (n - 1 - k)) & 1U) != 0 ? Basis::Y : Basis::X;

    std::size_t start = 0;
    for (std::size_t k = 1; k <= n; ++k) {
      if (k == n || p.bases[k] != p.bases[start]) {
        if (k - 1 > start) p.spans.push_back(KeySpan{start, k - 1});
        start = k;
      }
    }
    p.end_to_end = p.spans.size() == 1 && p.spans.front().first == 0 && p.spans.front().last == n - 1;
    if (p.any_key()) ++useful;
    if (p.end_to_end) ++end_to_end;
    out.patterns.push_back(std::move(p));
  }
  out.useful = Fraction(useful, static_cast<std::int64_t>(total));
  out.end_to_end = Fraction(end_to_end, static_cast<std::int64_t>(total));
  return out;
}

std::string span_label(const KeySpan& span, std::size_t n_nodes) {
  std::string s;
  for (NodeIndex i = span.first; i <= span.last; ++i) {
    if (i != span.first) s += " - ";
    s += node_name(i, n_nodes);
  }
  return s;
}

std::string pattern_label(const std::vector<Basis>& bases) {
  std::string s;
  for (Basis b : bases) s += to_char(b);
  return s;
}

double origin_fraction(double transmittance, std::size_t hops) {
  if (!(transmittance >= 0.0 && transmittance <= 1.0)) {
    throw std::invalid_argument("transmittance must lie in [0, 1], got " + std::to_string(transmittance));
  }
  if (hops < 1) throw std::invalid_argument("origin fraction needs at least one hop");
  return std::pow(transmittance, static_cast<double>(hops));
}

RunArtifacts post_process(RecordBook book) {
  RunArtifacts a{std::move(book), {}, {}, {}, {}, {}, {}};
  a.announcements = announce(a.book);
  a.tokens = build_tokens(a.book, a.announcements);
  a.chains = schedule_chains(a.tokens);
  a.deltas.reserve(a.chains.size());
  for (const auto& c : a.chains) a.deltas.push_back(chain_announcements(c, a.book));
  a.bridged = assemble_keys(a.chains, a.deltas, a.book);
  a.naive = sift_naive(a.book, a.announcements);
  return a;
}

RunSummary summarize(const RunArtifacts& artifacts, const SummaryOptions& options) {
  const RecordBook& book = artifacts.book;
  RunSummary s;
  s.n_nodes = book.n_nodes();
  s.slots = book.slot_count();

  const std::size_t links = book.n_nodes() - 1;
  s.links.resize(links);
  for (std::size_t l = 0; l < links; ++l) {
    LinkSummary& ls = s.links[l];
    bool bursting = false;
    std::size_t emissions = 0;
    for (const SlotRecord& r : book.node_records(l)) {
      if (!r.emitted) continue;
      ++emissions;
      if (r.emitted->resend_of) bursting = true;
      if (r.emitted->origin == Origin::Padded) ++s.padded_emissions;
    }
    for (const SlotRecord& r : book.node_records(l + 1)) {
      if (r.detected()) ++ls.detections;
    }
    ls.active_slots = bursting ? emissions : book.slot_count();
    ls.detection_rate = ratio(ls.detections, ls.active_slots);
    if (ls.detection_rate) ls.viable = link_viable(*ls.detection_rate, options.receiver);
    ls.tokens = l < artifacts.tokens.size() ? artifacts.tokens[l].size() : 0;
    ls.token_rate = ratio(ls.tokens, s.slots);
  }

  s.naive_key_bits = artifacts.naive.size();
  s.naive_fraction = ratio(s.naive_key_bits, s.slots);
  s.chains = artifacts.chains.size();
  s.chain_fraction = ratio(s.chains, s.slots);

  const NodeIndex bob = book.n_nodes() - 1;
  for (Timeslot t = book.first_slot(); t < book.end_slot(); ++t) {
    if (!book.at(bob, t).detected()) continue;
    ++s.bob_detections;
    if (reaches_source(book, bob, t)) ++s.source_detections;
  }
  s.bob_detection_rate = ratio(s.bob_detections, s.slots);
  s.origin_fraction = ratio(s.source_detections, s.slots);

  const SiftedKey& key = artifacts.bridged;
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (key.alice[i] != key.bob[i]) ++s.key_disagreements;
  }
  if (key.size() > 0) {
    RngStream rng(options.qber_seed, "qber");
    const QberEstimate est = estimate_qber(key.alice, key.bob, options.qber_sample_fraction, rng);
    s.qber = est.rate;
    s.qber_sampled = est.sampled;
  }
  return s;
}

}  // namespace relayqkd
