#include "relayqkd/nodes.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "relayqkd/errors.hpp"

namespace relayqkd {

Topology::Topology(std::size_t n_nodes) : n_nodes_(n_nodes) {
  if (n_nodes < 2) throw std::invalid_argument("a chain needs at least 2 nodes, got " + std::to_string(n_nodes));
}

RelayMode RelayMode::delay(std::size_t batch_size) {
  if (batch_size < 1) throw std::invalid_argument("delay batch size must be >= 1");
  return RelayMode(Kind::Delay, batch_size);
}

RelayMode RelayMode::parse(std::string_view name, std::size_t batch_size) {
  if (name == "naive") return naive();
  if (name == "padding") return padding();
  if (name == "delay") return delay(batch_size);
  throw std::invalid_argument("unknown relay mode '" + std::string(name) + "' (expected naive, padding or delay)");
}

std::string RelayMode::name() const {
  switch (kind_) {
    case Kind::Naive:
      return "naive";
    case Kind::Padding:
      return "padding";
    case Kind::Delay:
      return "delay";
  }
  return "?";
}

std::string_view to_string(Origin o) noexcept {
  switch (o) {
    case Origin::Source:
      return "source";
    case Origin::Received:
      return "received";
    case Origin::Padded:
      return "padded";
  }
  return "?";
}

Origin origin_from_string(std::string_view s) {
  if (s == "source") return Origin::Source;
  if (s == "received") return Origin::Received;
  if (s == "padded") return Origin::Padded;
  throw std::invalid_argument("unknown origin '" + std::string(s) + "'");
}

ReceiverModel::ReceiverModel(double min_rate_threshold) : threshold_(min_rate_threshold) {
  if (!(min_rate_threshold >= 0.0 && min_rate_threshold <= 1.0)) {
    throw std::invalid_argument("receiver threshold must lie in [0, 1], got " + std::to_string(min_rate_threshold));
  }
}

std::pair<PhotonState, SlotRecord> alice_emit(Timeslot timeslot, RngStream& rng) {
  const PhotonState photon = random_photon(rng);
  SlotRecord rec;
  rec.timeslot = timeslot;
  rec.node = 0;
  rec.emitted = Emission{photon, Origin::Source, std::nullopt};
  return {photon, rec};
}

std::pair<std::optional<PhotonState>, SlotRecord> Relay::process(const std::optional<PhotonState>& incoming,
                                                                 Timeslot timeslot, RngStream& rng) {
  SlotRecord rec;
  rec.timeslot = timeslot;
  rec.node = node_;

  if (incoming) {
    const Basis b = rng.basis();
    rec.received = encode(measure(*incoming, b, rng), b);
  }

  switch (mode_.kind()) {
    case RelayMode::Kind::Naive:
      if (rec.received) rec.emitted = Emission{*rec.received, Origin::Received, std::nullopt};
      break;
    case RelayMode::Kind::Padding:
      if (rec.received) {
        rec.emitted = Emission{*rec.received, Origin::Received, std::nullopt};
      } else {
        rec.emitted = Emission{random_photon(rng), Origin::Padded, std::nullopt};
      }
      break;
    case RelayMode::Kind::Delay: {
      if (rec.received) buffer_.push_back(Held{*rec.received, timeslot});
      if (burst_.empty() && buffer_.size() >= mode_.batch_size()) {
        const auto n = static_cast<std::ptrdiff_t>(mode_.batch_size());
        burst_.assign(buffer_.begin(), buffer_.begin() + n);
        buffer_.erase(buffer_.begin(), buffer_.begin() + n);
      }
      if (!burst_.empty()) {
        const Held h = burst_.front();
        burst_.pop_front();
        rec.emitted = Emission{h.state, Origin::Received, h.measured_in};
      }
      break;
    }
  }

  std::optional<PhotonState> out;
  if (rec.emitted) out = rec.emitted->state;
  return {out, rec};
}

SlotRecord bob_measure(const std::optional<PhotonState>& incoming, NodeIndex node, Timeslot timeslot,
                       RngStream& rng) {
  SlotRecord rec;
  rec.timeslot = timeslot;
  rec.node = node;
  if (incoming) {
    const Basis b = rng.basis();
    rec.received = encode(measure(*incoming, b, rng), b);
  }
  return rec;
}

bool link_viable(double detection_rate, const ReceiverModel& model) {
  if (!(detection_rate >= 0.0 && detection_rate <= 1.0)) {
    throw std::invalid_argument("detection rate must lie in [0, 1], got " + std::to_string(detection_rate));
  }
  return detection_rate >= model.min_rate_threshold();
}

RecordBook::RecordBook(std::size_t n_nodes, Timeslot first_slot, std::size_t slot_count, std::uint64_t run_id)
    : n_nodes_(n_nodes), first_slot_(first_slot), slot_count_(slot_count), run_id_(run_id) {
  (void)Topology{n_nodes};
  records_.resize(n_nodes * slot_count);
  for (NodeIndex n = 0; n < n_nodes; ++n) {
    for (std::size_t s = 0; s < slot_count; ++s) {
      auto& r = records_[n * slot_count + s];
      r.node = n;
      r.timeslot = first_slot + static_cast<Timeslot>(s);
    }
  }
}

RecordBook RecordBook::from_records(std::size_t n_nodes, std::vector<SlotRecord> records, std::uint64_t run_id) {
  if (n_nodes < 2) throw InputError("records describe " + std::to_string(n_nodes) + " node(s); a chain needs at least 2");
  if (records.empty()) return RecordBook(n_nodes, 0, 0, run_id);
  const auto [lo, hi] = std::minmax_element(records.begin(), records.end(),
                                            [](const auto& a, const auto& b) { return a.timeslot < b.timeslot; });
  const Timeslot first = lo->timeslot;
  const auto count = static_cast<std::size_t>(hi->timeslot - first + 1);
  if (records.size() != n_nodes * count) {
    throw InputError("record set does not cover every (node, slot) pair exactly once: expected " +
                     std::to_string(n_nodes * count) + " records for slots [" + std::to_string(first) + ", " +
                     std::to_string(hi->timeslot) + "], got " + std::to_string(records.size()));
  }
  RecordBook book(n_nodes, first, count, run_id);
  std::vector<bool> seen(n_nodes * count, false);
  for (auto& r : records) {
    if (r.node >= n_nodes) throw InputError("record names node " + std::to_string(r.node) + " outside the chain");
    const std::size_t i = book.index(r.node, r.timeslot);
    if (seen[i]) {
      throw InputError("duplicate record for node " + std::to_string(r.node) + " slot " + std::to_string(r.timeslot));
    }
    seen[i] = true;
    book.records_[i] = std::move(r);
  }
  return book;
}

void RecordBook::put(SlotRecord record) {
  const std::size_t i = index(record.node, record.timeslot);
  records_[i] = std::move(record);
}

std::size_t RecordBook::index(NodeIndex node, Timeslot t) const {
  if (node >= n_nodes_ || !contains(t)) {
    throw std::out_of_range("no record slot for node " + std::to_string(node) + " timeslot " + std::to_string(t));
  }
  return node * slot_count_ + static_cast<std::size_t>(t - first_slot_);
}

const SlotRecord& RecordBook::at(NodeIndex node, Timeslot t) const { return records_[index(node, t)]; }

std::span<const SlotRecord> RecordBook::node_records(NodeIndex node) const {
  if (node >= n_nodes_) throw std::out_of_range("node " + std::to_string(node) + " outside the chain");
  return std::span<const SlotRecord>(records_).subspan(node * slot_count_, slot_count_);
}

bool reaches_source(const RecordBook& book, NodeIndex receiver, Timeslot t) {
  NodeIndex node = receiver;
  Timeslot slot = t;
  while (node > 0) {
    if (!book.at(node, slot).detected()) return false;
    const SlotRecord& up = book.at(node - 1, slot);
    if (!up.emitted) throw IntegrityError("detection without an upstream emission");
    switch (up.emitted->origin) {
      case Origin::Source:
        return true;
      case Origin::Padded:
        return false;
      case Origin::Received:
        slot = up.emitted->resend_of.value_or(slot);
        node -= 1;
        break;
    }
  }
  return true;
}

}  // namespace relayqkd
