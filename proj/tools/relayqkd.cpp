// relayqkd: simulate BB84 through a chain of intercept/resend relays.
//
// Usage:
//   relayqkd run       [--config FILE] [--nodes N] [--slots S] [--transmittance X[,X...]]
//                      [--mode naive|padding|delay] [--batch_size B] [--threshold T]
//                      [--eve_link L] [--seed SEED] [--qber_sample F] [--out DIR] [--trace] [--records]
//   relayqkd sweep     (run options) [--sweep_nodes 3,4,5] [--sweep_transmittance 1,0.5]
//                      [--sweep_mode naive,padding]
//   relayqkd enumerate --nodes N
//   relayqkd sift      --records FILE [--threshold T] [--qber_sample F] [--seed SEED] [--out DIR]
//   relayqkd check

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "acceptance.hpp"
#include "relayqkd/analytics.hpp"
#include "relayqkd/errors.hpp"
#include "relayqkd/harness.hpp"
#include "relayqkd/records_io.hpp"

namespace {

constexpr const char* kUsage =
    "usage: relayqkd <run|sweep|enumerate|sift|check> [options]\n"
    "       relayqkd <verb> --help for the options of a verb\n";

int cmd_run(const std::vector<std::string>& args) {
  const relayqkd::RunConfig config = relayqkd::parse_config(args);
  if (config.is_sweep()) {
    std::cerr << "run: sweep axes given; use 'relayqkd sweep'\n";
    return 2;
  }
  const relayqkd::RunResult result = relayqkd::run(config);
  std::cout << relayqkd::render_summary(config, result.summary);
  return 0;
}

int cmd_sweep(const std::vector<std::string>& args) {
  const relayqkd::RunConfig config = relayqkd::parse_config(args);
  const relayqkd::SweepResult result = relayqkd::sweep(config);
  std::cout << "# label seed naive_fraction chain_fraction bob_detection_rate origin_fraction qber\n";
  for (std::size_t i = 0; i < result.children.size(); ++i) {
    const auto& s = result.summaries[i];
    auto f = [](const std::optional<double>& v) { return v ? fmt::format("{:.6f}", *v) : std::string("na"); };
    std::cout << fmt::format("{} {} {} {} {} {} {}\n", result.children[i].label, result.children[i].seed,
                             f(s.naive_fraction), f(s.chain_fraction), f(s.bob_detection_rate),
                             f(s.origin_fraction), f(s.qber));
  }
  return 0;
}

int cmd_enumerate(const std::vector<std::string>& args) {
  CLI::App app{"enumerate every basis pattern of an n-node chain"};
  int n = 3;
  app.add_option("--nodes", n, "node count (2..12)")->required();
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const relayqkd::PatternEnumeration e = relayqkd::enumerate_patterns(n);
  for (const auto& p : e.patterns) {
    std::string keys;
    for (const auto& span : p.spans) keys += (keys.empty() ? "" : ", ") + relayqkd::span_label(span, p.bases.size());
    std::cout << relayqkd::pattern_label(p.bases) << '\t' << (keys.empty() ? "No key" : keys) << '\n';
  }
  const auto useful = relayqkd::useful_fraction(n);
  const auto naive = relayqkd::naive_end_to_end_fraction(n);
  std::cout << fmt::format("useful = {}/{} (closed form {}/{})\n", e.useful.numerator(), e.useful.denominator(),
                           useful.numerator(), useful.denominator());
  std::cout << fmt::format("end_to_end = {}/{} (closed form {}/{})\n", e.end_to_end.numerator(),
                           e.end_to_end.denominator(), naive.numerator(), naive.denominator());
  return e.useful == useful && e.end_to_end == naive ? 0 : 1;
}

int cmd_sift(const std::vector<std::string>& args) {
  CLI::App app{"post-process a record file"};
  std::string path;
  double threshold = 0.0;
  double qber_sample = 1.0;
  std::uint64_t seed = 1;
  std::string out;
  app.add_option("--records", path, "record file")->required()->check(CLI::ExistingFile);
  app.add_option("--threshold", threshold, "viability threshold")->check(CLI::Range(0.0, 1.0));
  app.add_option("--qber_sample", qber_sample, "QBER sample fraction")->check(CLI::Range(0.0, 1.0));
  app.add_option("--seed", seed, "seed for the QBER sample");
  app.add_option("--out", out, "also write summary.txt, announcements.txt and relay_messages.txt here");
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  std::ifstream is(path);
  relayqkd::RecordFile file = relayqkd::read_records(is);
  if (file.bits_withheld) {
    std::cerr << "sift: " << path << " has withheld bits; key assembly needs the private records\n";
    return 2;
  }
  const relayqkd::RunArtifacts artifacts = relayqkd::post_process(std::move(file.book));
  const relayqkd::RunSummary summary = relayqkd::summarize(
      artifacts, relayqkd::SummaryOptions{relayqkd::ReceiverModel(threshold), qber_sample, seed});
  const std::string text = relayqkd::render_summary(summary);
  std::cout << text;

  if (!out.empty()) {
    const std::filesystem::path dir(out);
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "summary.txt") << text;
    std::ofstream ann(dir / "announcements.txt");
    relayqkd::write_announcements(ann, artifacts.announcements);
    std::ofstream msg(dir / "relay_messages.txt");
    relayqkd::write_chain_messages(msg, artifacts.chains, artifacts.deltas);
    if (!ann || !msg) throw std::runtime_error("cannot write outputs under " + out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << kUsage;
    return 2;
  }
  const std::string verb = argv[1];
  const std::vector<std::string> args(argv + 2, argv + argc);
  try {
    if (verb == "run") return cmd_run(args);
    if (verb == "sweep") return cmd_sweep(args);
    if (verb == "enumerate") return cmd_enumerate(args);
    if (verb == "sift") return cmd_sift(args);
    if (verb == "check") return relayqkd::acceptance::run_all(std::cout) ? 0 : 1;
    if (verb == "-h" || verb == "--help") {
      std::cout << kUsage;
      return 0;
    }
    std::cerr << "unknown verb '" << verb << "'\n" << kUsage;
    return 2;
  } catch (const relayqkd::HelpRequested& h) {
    std::cout << h.what();
    return 0;
  } catch (const relayqkd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const relayqkd::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
