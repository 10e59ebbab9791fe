#pragma once

// Per-timeslot behaviour of the chain participants. Node 0 is Alice, node
// n-1 is Bob, everything in between is an intercept/resend relay. Link i
// joins node i to node i+1.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "relayqkd/core.hpp"

namespace relayqkd {

using Timeslot = std::int64_t;
using NodeIndex = std::size_t;

class Topology {
 public:
  explicit Topology(std::size_t n_nodes);

  std::size_t n_nodes() const noexcept { return n_nodes_; }
  std::size_t hops() const noexcept { return n_nodes_ - 1; }
  std::size_t links() const noexcept { return n_nodes_ - 1; }
  NodeIndex alice() const noexcept { return 0; }
  NodeIndex bob() const noexcept { return n_nodes_ - 1; }
  bool is_relay(NodeIndex i) const noexcept { return i > 0 && i + 1 < n_nodes_; }

 private:
  std::size_t n_nodes_;
};

class RelayMode {
 public:
  enum class Kind { Naive, Padding, Delay };

  static RelayMode naive() { return RelayMode(Kind::Naive, 1); }
  static RelayMode padding() { return RelayMode(Kind::Padding, 1); }
  static RelayMode delay(std::size_t batch_size);

  /// Accepts "naive", "padding", "delay" (batch taken from `batch_size`).
  static RelayMode parse(std::string_view name, std::size_t batch_size = 1);

  Kind kind() const noexcept { return kind_; }
  std::size_t batch_size() const noexcept { return batch_size_; }
  std::string name() const;

  friend bool operator==(const RelayMode&, const RelayMode&) = default;

 private:
  RelayMode(Kind k, std::size_t batch) : kind_(k), batch_size_(batch) {}
  Kind kind_;
  std::size_t batch_size_;
};

enum class Origin : std::uint8_t { Source, Received, Padded };

std::string_view to_string(Origin o) noexcept;
Origin origin_from_string(std::string_view s);

struct Emission {
  PhotonState state;
  Origin origin = Origin::Source;
  /// Slot in which the re-emitted bit was measured (Delay relays only).
  std::optional<Timeslot> resend_of;

  friend bool operator==(const Emission&, const Emission&) = default;
};

/// One node's private view of one timeslot.
///
/// `received` holds the measurement basis and outcome when a photon was
/// detected; `emitted` holds what the node sent downstream in this slot.
/// Naive and padding relays emit in the slot they receive, so for them the
/// two bases coincide; delay relays decouple them.
struct SlotRecord {
  Timeslot timeslot = 0;
  NodeIndex node = 0;
  std::optional<PhotonState> received;
  std::optional<Emission> emitted;

  bool detected() const noexcept { return received.has_value(); }

  friend bool operator==(const SlotRecord&, const SlotRecord&) = default;
};

/// Minimum per-window detection rate for a hop to be usable.
class ReceiverModel {
 public:
  explicit ReceiverModel(double min_rate_threshold);
  double min_rate_threshold() const noexcept { return threshold_; }

 private:
  double threshold_;
};

std::pair<PhotonState, SlotRecord> alice_emit(Timeslot timeslot, RngStream& rng);

/// Intercept/resend relay. Stateful only in Delay mode, where measured bits
/// are queued and re-emitted in contiguous bursts of `batch_size`.
class Relay {
 public:
  Relay(NodeIndex node, RelayMode mode) : node_(node), mode_(mode) {}

  std::pair<std::optional<PhotonState>, SlotRecord> process(const std::optional<PhotonState>& incoming,
                                                            Timeslot timeslot, RngStream& rng);

  const RelayMode& mode() const noexcept { return mode_; }
  NodeIndex node() const noexcept { return node_; }
  /// Measurements still waiting for a burst (Delay mode).
  std::size_t pending() const noexcept { return buffer_.size() + burst_.size(); }

 private:
  struct Held {
    PhotonState state;
    Timeslot measured_in;
  };

  NodeIndex node_;
  RelayMode mode_;
  std::deque<Held> buffer_;
  std::deque<Held> burst_;
};

SlotRecord bob_measure(const std::optional<PhotonState>& incoming, NodeIndex node, Timeslot timeslot,
                       RngStream& rng);

/// Inclusive threshold test; `detection_rate` must lie in [0, 1].
bool link_viable(double detection_rate, const ReceiverModel& model);

/// All records of one run, indexed by (node, timeslot) over a contiguous slot
/// range starting at `first_slot`.
class RecordBook {
 public:
  RecordBook(std::size_t n_nodes, Timeslot first_slot, std::size_t slot_count, std::uint64_t run_id = 0);

  /// Builds a book from an unordered record list. Every node must have
  /// exactly one record for every slot in [first, first + count).
  static RecordBook from_records(std::size_t n_nodes, std::vector<SlotRecord> records,
                                 std::uint64_t run_id = 0);

  void put(SlotRecord record);

  std::size_t n_nodes() const noexcept { return n_nodes_; }
  Timeslot first_slot() const noexcept { return first_slot_; }
  Timeslot end_slot() const noexcept { return first_slot_ + static_cast<Timeslot>(slot_count_); }
  std::size_t slot_count() const noexcept { return slot_count_; }
  std::uint64_t run_id() const noexcept { return run_id_; }
  bool contains(Timeslot t) const noexcept { return t >= first_slot_ && t < end_slot(); }

  const SlotRecord& at(NodeIndex node, Timeslot t) const;
  std::span<const SlotRecord> node_records(NodeIndex node) const;

 private:
  std::size_t index(NodeIndex node, Timeslot t) const;

  std::size_t n_nodes_;
  Timeslot first_slot_;
  std::size_t slot_count_;
  std::uint64_t run_id_;
  std::vector<SlotRecord> records_;  // node-major
};

/// True when the photon `receiver` detected in slot `t` descends, through
/// relay resends, from one of Alice's emissions (no padded link in its past).
bool reaches_source(const RecordBook& book, NodeIndex receiver, Timeslot t);

}  // namespace relayqkd
