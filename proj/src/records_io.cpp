#include "relayqkd/records_io.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>

#include "relayqkd/errors.hpp"

namespace relayqkd {

namespace {

std::string opt_slot(const std::optional<Timeslot>& t) { return t ? std::to_string(*t) : "-"; }

class LineError {
 public:
  explicit LineError(std::size_t line) : line_(line) {}
  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("line " + std::to_string(line_) + ": " + what);
  }

 private:
  std::size_t line_;
};

template <typename Int>
Int parse_int(std::string_view s, const LineError& err, const char* field) {
  Int v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) err.fail(std::string("bad ") + field + " '" + std::string(s) + "'");
  return v;
}

std::optional<Timeslot> parse_opt_slot(std::string_view s, const LineError& err, const char* field) {
  if (s == "-") return std::nullopt;
  return parse_int<Timeslot>(s, err, field);
}

bool parse_flag(std::string_view s, const LineError& err, const char* field) {
  if (s == "0") return false;
  if (s == "1") return true;
  err.fail(std::string("bad ") + field + " '" + std::string(s) + "' (expected 0 or 1)");
}

std::optional<Basis> parse_opt_basis(std::string_view s, const LineError& err, const char* field) {
  if (s == "-") return std::nullopt;
  if (s == "X") return Basis::X;
  if (s == "Y") return Basis::Y;
  err.fail(std::string("bad ") + field + " '" + std::string(s) + "'");
}

Bit parse_bit(std::string_view s, bool withheld, const LineError& err, const char* field) {
  if (withheld) {
    if (s != "*") err.fail(std::string(field) + " must be '*' when withheld");
    return kZero;
  }
  if (s == "0") return kZero;
  if (s == "1") return kOne;
  err.fail(std::string("bad ") + field + " '" + std::string(s) + "'");
}

// Splits on whitespace; returns false for blank and comment lines.
bool fields_of(const std::string& line, std::vector<std::string>& out) {
  out.clear();
  std::istringstream ss(line);
  std::string f;
  while (ss >> f) {
    if (out.empty() && f.front() == '#') return false;
    out.push_back(f);
  }
  return !out.empty();
}

}  // namespace

void write_records(std::ostream& os, const RecordBook& book, BitVisibility visibility) {
  const bool hide = visibility == BitVisibility::Withheld;
  os << "# relayqkd records v1\n# " << kRecordColumns << '\n';
  for (Timeslot t = book.first_slot(); t < book.end_slot(); ++t) {
    for (NodeIndex n = 0; n < book.n_nodes(); ++n) {
      const SlotRecord& r = book.at(n, t);
      os << book.run_id() << ' ' << t << ' ' << n << ' ' << (r.detected() ? 1 : 0) << ' ';
      if (r.received) {
        os << to_char(r.received->basis) << ' ' << (hide ? "*" : std::to_string(r.received->bit.as_int()));
      } else {
        os << "- -";
      }
      os << ' ';
      if (r.emitted) {
        os << to_char(r.emitted->state.basis) << ' '
           << (hide ? "*" : std::to_string(r.emitted->state.bit.as_int())) << ' ' << to_string(r.emitted->origin)
           << ' ' << opt_slot(r.emitted->resend_of);
      } else {
        os << "- - - -";
      }
      os << ' ' << (hide ? 1 : 0) << '\n';
    }
  }
}

RecordFile read_records(std::istream& is) {
  std::vector<SlotRecord> records;
  std::optional<std::uint64_t> run;
  std::optional<bool> withheld_all;
  std::size_t max_node = 0;
  std::string line;
  std::vector<std::string> f;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!fields_of(line, f)) continue;
    const LineError err(lineno);
    if (f.size() != 11) err.fail("expected 11 fields (" + std::string(kRecordColumns) + "), got " + std::to_string(f.size()));

    const auto run_id = parse_int<std::uint64_t>(f[0], err, "run");
    if (run && *run != run_id) err.fail("mixed run ids in one record file");
    run = run_id;

    const bool withheld = parse_flag(f[10], err, "withheld");
    if (withheld_all && *withheld_all != withheld) err.fail("mixed withheld flags in one record file");
    withheld_all = withheld;

    SlotRecord r;
    r.timeslot = parse_int<Timeslot>(f[1], err, "slot");
    r.node = parse_int<NodeIndex>(f[2], err, "node");
    const bool detected = parse_flag(f[3], err, "detected");
    const auto rx_basis = parse_opt_basis(f[4], err, "rx_basis");
    if (detected != rx_basis.has_value()) err.fail("detected flag disagrees with rx_basis");
    if (rx_basis) {
      r.received = PhotonState{*rx_basis, parse_bit(f[5], withheld, err, "rx_bit")};
    } else if (f[5] != "-") {
      err.fail("rx_bit given without rx_basis");
    }

    const auto tx_basis = parse_opt_basis(f[6], err, "tx_basis");
    if (tx_basis) {
      Emission e;
      e.state = PhotonState{*tx_basis, parse_bit(f[7], withheld, err, "tx_bit")};
      try {
        e.origin = origin_from_string(f[8]);
      } catch (const std::invalid_argument& ex) {
        err.fail(ex.what());
      }
      e.resend_of = parse_opt_slot(f[9], err, "resend_of");
      r.emitted = e;
    } else if (f[7] != "-" || f[8] != "-" || f[9] != "-") {
      err.fail("emission fields given without tx_basis");
    }
    max_node = std::max(max_node, r.node);
    records.push_back(std::move(r));
  }
  if (records.empty()) throw InputError("record file contains no records");
  return RecordFile{RecordBook::from_records(max_node + 1, std::move(records), *run), *withheld_all};
}

void write_announcements(std::ostream& os, std::span<const Announcement> announcements) {
  os << "# relayqkd announcements v1\n# " << kAnnouncementColumns << '\n';
  for (const Announcement& a : announcements) {
    os << a.timeslot << ' ' << a.node << ' ' << (a.kind == AnnouncementKind::Detected ? 'D' : 'E') << ' '
       << to_char(a.basis) << ' ' << (a.padded ? 1 : 0) << ' ' << opt_slot(a.resend_of) << '\n';
  }
}

std::vector<Announcement> read_announcements(std::istream& is) {
  std::vector<Announcement> out;
  std::string line;
  std::vector<std::string> f;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!fields_of(line, f)) continue;
    const LineError err(lineno);
    if (f.size() != 6) err.fail("expected 6 fields (" + std::string(kAnnouncementColumns) + ")");
    Announcement a;
    a.timeslot = parse_int<Timeslot>(f[0], err, "slot");
    a.node = parse_int<NodeIndex>(f[1], err, "node");
    if (f[2] == "D") {
      a.kind = AnnouncementKind::Detected;
    } else if (f[2] == "E") {
      a.kind = AnnouncementKind::Emitted;
    } else {
      err.fail("bad kind '" + f[2] + "'");
    }
    const auto b = parse_opt_basis(f[3], err, "basis");
    if (!b) err.fail("announcement without a basis");
    a.basis = *b;
    a.padded = parse_flag(f[4], err, "padded");
    a.resend_of = parse_opt_slot(f[5], err, "resend_of");
    out.push_back(a);
  }
  return out;
}

void write_chain_messages(std::ostream& os, std::span<const KeyChain> chains,
                          std::span<const std::vector<Bit>> deltas) {
  os << "# relayqkd relay messages v1\n# " << kDeltaColumns << '\n';
  for (std::size_t j = 0; j < chains.size() && j < deltas.size(); ++j) {
    for (std::size_t k = 0; k < deltas[j].size(); ++k) {
      os << j << ' ' << (k + 1) << ' ' << chains[j].tokens[k].timeslot << ' ' << chains[j].tokens[k + 1].timeslot
         << ' ' << deltas[j][k].as_int() << '\n';
    }
  }
}

void write_trace_csv(std::ostream& os, const RecordBook& book) {
  os << "timeslot,node,rx_basis,tx_basis,origin,detected,resend_of\n";
  for (Timeslot t = book.first_slot(); t < book.end_slot(); ++t) {
    for (NodeIndex n = 0; n < book.n_nodes(); ++n) {
      const SlotRecord& r = book.at(n, t);
      os << t << ',' << n << ',';
      if (r.received) os << to_char(r.received->basis);
      os << ',';
      if (r.emitted) os << to_char(r.emitted->state.basis);
      os << ',';
      if (r.emitted) os << to_string(r.emitted->origin);
      os << ',' << (r.detected() ? 1 : 0) << ',';
      if (r.emitted && r.emitted->resend_of) os << *r.emitted->resend_of;
      os << '\n';
    }
  }
}

}  // namespace relayqkd
