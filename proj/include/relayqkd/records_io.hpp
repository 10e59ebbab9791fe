#pragma once

// Text formats for records and the public transcript.
//
// Records (one per line, whitespace separated, '#' starts a comment):
//   run slot node detected rx_basis rx_bit tx_basis tx_bit origin resend_of withheld
// Absent fields are '-'. With withheld = 1 both bit columns read '*'.
//
// Announcements:
//   slot node kind basis padded resend_of        (kind is D or E)
//
// Relay XOR messages:
//   chain relay in_slot out_slot delta

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "relayqkd/nodes.hpp"
#include "relayqkd/sift.hpp"

namespace relayqkd {

inline constexpr const char* kRecordColumns =
    "run slot node detected rx_basis rx_bit tx_basis tx_bit origin resend_of withheld";
inline constexpr const char* kAnnouncementColumns = "slot node kind basis padded resend_of";
inline constexpr const char* kDeltaColumns = "chain relay in_slot out_slot delta";

enum class BitVisibility { Private, Withheld };

void write_records(std::ostream& os, const RecordBook& book, BitVisibility visibility);

struct RecordFile {
  RecordBook book;
  bool bits_withheld = false;
};

/// Parses a record file. The node count is taken from the largest node index.
/// Throws InputError with the offending line number on malformed input.
RecordFile read_records(std::istream& is);

void write_announcements(std::ostream& os, std::span<const Announcement> announcements);
std::vector<Announcement> read_announcements(std::istream& is);

void write_chain_messages(std::ostream& os, std::span<const KeyChain> chains,
                          std::span<const std::vector<Bit>> deltas);

/// timeslot,node,rx_basis,tx_basis,origin,detected,resend_of
void write_trace_csv(std::ostream& os, const RecordBook& book);

}  // namespace relayqkd
