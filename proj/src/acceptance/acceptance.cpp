#include "acceptance.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>

#include <unistd.h>

#include "oracles.hpp"
#include "relayqkd/analytics.hpp"
#include "relayqkd/harness.hpp"
#include "relayqkd/records_io.hpp"
#include "relayqkd/sift.hpp"
#include "relayqkd/simulator.hpp"

namespace relayqkd::acceptance {

namespace {

constexpr std::size_t kSlots = 100000;

bool within(double value, double target, double tol) { return std::fabs(value - target) <= tol; }

RunConfig base_config(std::size_t n, double xi, const std::string& mode, std::uint64_t seed) {
  RunConfig c;
  c.n_nodes = n;
  c.slots = kSlots;
  c.transmittance = {xi};
  c.mode = mode;
  c.seed = seed;
  c.qber_sample = 1.0;
  return c;
}

CriterionResult eq1_exactness() {
  CriterionResult r{1, "useful fraction equals pattern enumeration exactly", true, "", 0};
  const auto start = std::chrono::steady_clock::now();
  for (int n = 2; n <= kMaxEnumeratedNodes; ++n) {
    const PatternEnumeration e = enumerate_patterns(n);
    if (e.useful != useful_fraction(n) || e.end_to_end != naive_end_to_end_fraction(n)) {
      r.passed = false;
      r.detail += fmt::format("n={} mismatch; ", n);
    }
  }
  // The 3-node table: pattern -> key holders.
  const std::map<std::string, std::string> table = {
      {"XXX", "A - R1 - B"}, {"YYY", "A - R1 - B"}, {"XXY", "A - R1"},  {"YYX", "A - R1"},
      {"XYY", "R1 - B"},     {"YXX", "R1 - B"},     {"XYX", "No key"}, {"YXY", "No key"}};
  std::map<std::string, std::string> got;
  for (const auto& p : enumerate_patterns(3).patterns) {
    std::string key = p.spans.empty() ? "No key" : span_label(p.spans.front(), 3);
    if (p.spans.size() > 1) key = "multiple";
    got[pattern_label(p.bases)] = key;
  }
  if (got != table) {
    r.passed = false;
    r.detail += "3-node pattern table differs; ";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs >= 1.0) {
    r.passed = false;
    r.detail += fmt::format("took {:.3f}s (limit 1s); ", secs);
  }
  if (r.passed) r.detail = "n=2..12 exact; 8 three-node rows match incl. XYX/YXY no-key";
  return r;
}

CriterionResult naive_fraction() {
  CriterionResult r{2, "naive end-to-end fraction (n=3 -> 1/4, n=2 -> 1/2)", true, "", 0};
  const double f3 = *run(base_config(3, 1.0, "naive", 31)).summary.naive_fraction;
  const double f2 = *run(base_config(2, 1.0, "naive", 32)).summary.naive_fraction;
  r.passed = within(f3, 0.25, 0.01) && within(f2, 0.5, 0.01);
  r.detail = fmt::format("n=3: {:.4f} (0.25 +/- 0.01), n=2: {:.4f} (0.50 +/- 0.01)", f3, f2);
  return r;
}

CriterionResult bridged_half() {
  CriterionResult r{3, "bridged chain fraction is 1/2 for n = 3..6", true, "", 0};
  for (std::size_t n = 3; n <= 6; ++n) {
    const double f = *run(base_config(n, 1.0, "naive", 40 + n)).summary.chain_fraction;
    r.passed = r.passed && within(f, 0.5, 0.01);
    r.detail += fmt::format("n={}: {:.4f} ", n, f);
  }
  r.detail += "(0.50 +/- 0.01)";
  return r;
}

CriterionResult key_agreement() {
  CriterionResult r{4, "Alice and Bob keys agree on every chain without Eve", true, "", 0};
  std::size_t runs = 0;
  std::size_t chains = 0;
  std::size_t mismatches = 0;
  const std::vector<RelayMode> modes = {RelayMode::naive(), RelayMode::padding(), RelayMode::delay(4)};
  for (std::size_t n = 2; n <= 6; ++n) {
    for (double xi : {1.0, 0.7, 0.4}) {
      for (const RelayMode& mode : modes) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
          const RunArtifacts a = post_process(simulate(ChainSetup::uniform(n, xi, mode), 2000, seed));
          ++runs;
          chains += a.bridged.size();
          for (std::size_t i = 0; i < a.bridged.size(); ++i) mismatches += a.bridged.alice[i] != a.bridged.bob[i];
          for (std::size_t i = 0; i < a.naive.size(); ++i) mismatches += a.naive.alice[i] != a.naive.bob[i];
        }
      }
    }
  }
  r.passed = mismatches == 0 && chains > 0;
  r.detail = fmt::format("{} runs, {} chains, {} mismatches", runs, chains, mismatches);
  return r;
}

CriterionResult distance_extension() {
  CriterionResult r{5, "padding lifts Bob's detection rate over the viability threshold", true, "", 0};
  RunConfig naive = base_config(3, 0.5, "naive", 51);
  naive.threshold = 0.3;
  RunConfig padded = naive;
  padded.mode = "padding";
  const LinkSummary ln = run(naive).summary.links.back();
  const LinkSummary lp = run(padded).summary.links.back();
  r.passed = within(*ln.detection_rate, 0.25, 0.02) && ln.viable == false && within(*lp.detection_rate, 0.5, 0.02) &&
             lp.viable == true;
  r.detail = fmt::format("naive {:.4f} viable={}, padding {:.4f} viable={} (threshold 0.3, +/- 0.02)",
                         *ln.detection_rate, *ln.viable, *lp.detection_rate, *lp.viable);
  return r;
}

CriterionResult origin_scaling() {
  CriterionResult r{6, "origin fraction follows transmittance^hops", true, "", 0};
  for (double xi : {0.9, 0.7, 0.5}) {
    for (std::size_t m = 1; m <= 3; ++m) {
      const double got = *run(base_config(m + 1, xi, "padding", 60 + m)).summary.origin_fraction;
      const double want = std::pow(xi, static_cast<double>(m));
      const bool ok = within(got, want, 0.01);
      r.passed = r.passed && ok;
      if (!ok) r.detail += fmt::format("xi={} m={}: {:.4f} vs {:.4f}; ", xi, m, got, want);
    }
  }
  if (r.passed) r.detail = "9 (xi, m) cells within +/- 0.01 of xi^m";
  return r;
}

CriterionResult eavesdropper() {
  CriterionResult r{7, "intercept/resend Eve induces QBER 1/4, none without Eve", true, "", 0};
  const auto oracle = oracle::enumerate_intercept_resend();
  const double expected = boost::rational_cast<double>(oracle.matched_error_rate);
  r.passed = oracle.cases == 16 && oracle.matched_error_rate == oracle::Exact(1, 4);
  r.detail = fmt::format("oracle {}/{} over {} cases; ", oracle.matched_error_rate.numerator(),
                         oracle.matched_error_rate.denominator(), oracle.cases);
  for (std::size_t link = 0; link < 3; ++link) {
    RunConfig c = base_config(4, 1.0, "naive", 70 + link);
    c.eve_link = link;
    const double q = *run(c).summary.qber;
    r.passed = r.passed && within(q, expected, 0.02);
    r.detail += fmt::format("link {}: {:.4f} ", link, q);
  }
  const double clean = *run(base_config(4, 1.0, "naive", 79)).summary.qber;
  r.passed = r.passed && clean == 0.0;
  r.detail += fmt::format("no Eve: {:.4f}", clean);
  return r;
}

CriterionResult scheduler_optimality() {
  CriterionResult r{8, "FIFO-zip chain count equals exhaustive maximum", true, "", 0};
  RngStream gen(2011, "acceptance/scheduler");
  const std::vector<double> xis = {1.0, 0.8, 0.6, 0.4};
  const std::vector<RelayMode> modes = {RelayMode::naive(), RelayMode::padding(), RelayMode::delay(2)};
  std::size_t failures = 0;
  std::size_t nonzero = 0;
  for (int c = 0; c < 500; ++c) {
    const std::size_t slots = 1 + gen.next() % 12;
    const double xi = xis[gen.next() % xis.size()];
    const RelayMode mode = modes[gen.next() % modes.size()];
    const RecordBook book = simulate(ChainSetup::uniform(4, xi, mode), slots, gen.next());
    const auto ann = announce(book);
    const TokenLists tokens = build_tokens(book, ann);
    std::vector<std::size_t> counts;
    for (const auto& l : tokens) counts.push_back(l.size());
    const std::size_t fifo = schedule_chains(tokens).size();
    const std::size_t best = oracle::max_chains_exhaustive(counts);
    const std::size_t bound = *std::min_element(counts.begin(), counts.end());
    if (fifo != best || fifo != bound) ++failures;
    if (best > 0) ++nonzero;
  }
  r.passed = failures == 0;
  r.detail = fmt::format("500 instances (<=12 slots, n=4), {} with chains, {} disagreements", nonzero, failures);
  return r;
}

CriterionResult transcript_privacy() {
  CriterionResult r{9, "relay XOR announcements are unbiased and carry no key bits", true, "", 0};
  const RunArtifacts a = post_process(simulate(ChainSetup::uniform(5, 1.0), 30000, 91));
  constexpr std::size_t kChains = 10000;
  if (a.chains.size() < kChains) {
    r.passed = false;
    r.detail = fmt::format("only {} chains", a.chains.size());
    return r;
  }
  const double critical = oracle::chi_square_critical(0.01, 1.0);
  for (std::size_t relay = 0; relay < 3; ++relay) {
    std::size_t ones = 0;
    for (std::size_t j = 0; j < kChains; ++j) ones += a.deltas[j][relay].as_int();
    const double stat = oracle::chi_square_fair(ones, kChains);
    r.passed = r.passed && stat < critical;
    r.detail += fmt::format("R{} chi2={:.3f} ", relay + 1, stat);
  }
  r.detail += fmt::format("(critical {:.3f}); ", critical);

  // Structure of everything published.
  std::ostringstream ann;
  write_announcements(ann, a.announcements);
  std::ostringstream msgs;
  write_chain_messages(msgs, a.chains, a.deltas);
  std::ostringstream pub;
  write_records(pub, a.book, BitVisibility::Withheld);

  bool structural = std::string(kAnnouncementColumns).find("bit") == std::string::npos;
  std::istringstream in(ann.str());
  std::string line;
  while (structural && std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<std::string> f{std::istream_iterator<std::string>(ls), {}};
    structural = f.size() == 6 && (f[2] == "D" || f[2] == "E") && (f[3] == "X" || f[3] == "Y");
  }
  // Relay messages: the last column must equal the XOR of the relay's two private token bits.
  std::istringstream min(msgs.str());
  while (structural && std::getline(min, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::size_t chain = 0, relay = 0;
    Timeslot in_slot = 0, out_slot = 0;
    int delta = 0;
    ls >> chain >> relay >> in_slot >> out_slot >> delta;
    const Bit expected = a.book.at(relay, in_slot).received->bit ^ a.book.at(relay, out_slot).emitted->state.bit;
    structural = expected.as_int() == delta;
  }
  std::istringstream rin(pub.str());
  while (structural && std::getline(rin, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<std::string> f{std::istream_iterator<std::string>(ls), {}};
    structural = f.size() == 11 && (f[5] == "*" || f[5] == "-") && (f[7] == "*" || f[7] == "-");
  }
  r.passed = r.passed && structural;
  r.detail += structural ? "published records/announcements carry no bit values" : "bit value found in transcript";
  return r;
}

CriterionResult reproducibility() {
  CriterionResult r{10, "identical config and seed give byte-identical summaries", true, "", 0};
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / fmt::format("relayqkd-repro-{}", ::getpid());
  RunConfig c = base_config(4, 0.7, "padding", 1234);
  c.slots = 20000;
  c.threshold = 0.3;
  c.qber_sample = 0.5;
  c.eve_link = 1;
  auto read = [](const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is), {});
  };
  c.output_dir = (root / "a").string();
  run(c);
  c.output_dir = (root / "b").string();
  run(c);
  const std::string a = read(root / "a" / "summary.txt");
  const std::string b = read(root / "b" / "summary.txt");
  r.passed = !a.empty() && a == b;
  r.detail = fmt::format("{} bytes, {}", a.size(), a == b ? "identical" : "differ");
  std::error_code ec;
  fs::remove_all(root, ec);
  return r;
}

}  // namespace

std::vector<Criterion> criteria() {
  return {
      {1, "eq1", eq1_exactness},
      {2, "naive-fraction", naive_fraction},
      {3, "bridged-half", bridged_half},
      {4, "key-agreement", key_agreement},
      {5, "distance-extension", distance_extension},
      {6, "origin-scaling", origin_scaling},
      {7, "eavesdropper", eavesdropper},
      {8, "scheduler-optimality", scheduler_optimality},
      {9, "transcript-privacy", transcript_privacy},
      {10, "reproducibility", reproducibility},
  };
}

bool run_all(std::ostream& os) {
  bool all = true;
  for (const Criterion& c : criteria()) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult res;
    try {
      res = c.check();
    } catch (const std::exception& e) {
      res = CriterionResult{c.id, c.name, false, std::string("exception: ") + e.what(), 0};
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && res.passed;
    os << fmt::format("{} [{:2}] {} ({:.2f}s): {}\n", res.passed ? "PASS" : "FAIL", res.id, res.name, res.seconds,
                      res.detail);
  }
  return all;
}

}  // namespace relayqkd::acceptance
