#include "relayqkd/harness.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "relayqkd/records_io.hpp"

namespace relayqkd {

namespace fs = std::filesystem;

namespace {

std::string fixed(double v) { return fmt::format("{:.6f}", v); }

std::string fixed(const std::optional<double>& v) { return v ? fixed(*v) : std::string("na"); }

std::string xi_label(const std::vector<double>& xi) {
  std::string s;
  for (std::size_t i = 0; i < xi.size(); ++i) s += (i ? "+" : "") + fmt::format("{:g}", xi[i]);
  return s;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << contents;
  if (!os.flush()) throw std::runtime_error("write to " + path.string() + " failed");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
}

void append_results(std::string& out, const RunSummary& s, const std::vector<double>* xi) {
  for (std::size_t l = 0; l < s.links.size(); ++l) {
    const LinkSummary& ls = s.links[l];
    const std::string p = fmt::format("link.{}.", l);
    if (xi) out += p + "transmittance = " + fixed((*xi)[l]) + "\n";
    out += p + fmt::format("detections = {}\n", ls.detections);
    out += p + fmt::format("active_slots = {}\n", ls.active_slots);
    out += p + "detection_rate = " + fixed(ls.detection_rate) + "\n";
    out += p + "viable = " + (ls.viable ? (*ls.viable ? "true" : "false") : "na") + "\n";
    out += p + fmt::format("tokens = {}\n", ls.tokens);
    out += p + "token_rate = " + fixed(ls.token_rate) + "\n";
  }
  out += fmt::format("naive_key_bits = {}\n", s.naive_key_bits);
  out += "naive_fraction = " + fixed(s.naive_fraction) + "\n";
  out += fmt::format("chains = {}\n", s.chains);
  out += "chain_fraction = " + fixed(s.chain_fraction) + "\n";
  out += fmt::format("bob_detections = {}\n", s.bob_detections);
  out += "bob_detection_rate = " + fixed(s.bob_detection_rate) + "\n";
  out += fmt::format("source_detections = {}\n", s.source_detections);
  out += "origin_fraction = " + fixed(s.origin_fraction) + "\n";
  if (xi) {
    double expected = 1.0;
    for (double v : *xi) expected *= v;
    out += "origin_fraction_expected = " + fixed(expected) + "\n";
  }
  out += fmt::format("padded_emissions = {}\n", s.padded_emissions);
  out += fmt::format("key_disagreements = {}\n", s.key_disagreements);
  out += "qber = " + fixed(s.qber) + "\n";
  out += fmt::format("qber_sampled = {}\n", s.qber_sampled);
}

std::vector<double> per_hop(const RunConfig& c) {
  if (c.transmittance.size() == 1) return std::vector<double>(c.n_nodes - 1, c.transmittance.front());
  return c.transmittance;
}

}  // namespace

void RunConfig::validate() const {
  if (n_nodes < 2) throw ConfigError("nodes", "must be >= 2, got " + std::to_string(n_nodes));
  if (slots < 1) throw ConfigError("slots", "must be >= 1");
  if (transmittance.empty()) throw ConfigError("transmittance", "needs at least one value");
  if (transmittance.size() != 1 && transmittance.size() != n_nodes - 1) {
    throw ConfigError("transmittance", fmt::format("expected 1 value or {} (one per hop), got {}", n_nodes - 1,
                                                   transmittance.size()));
  }
  for (double xi : transmittance) {
    if (!(xi >= 0.0 && xi <= 1.0)) throw ConfigError("transmittance", fmt::format("{} outside [0, 1]", xi));
  }
  if (mode != "naive" && mode != "padding" && mode != "delay") {
    throw ConfigError("mode", "'" + mode + "' is not one of naive, padding, delay");
  }
  if (batch_size < 1) throw ConfigError("batch_size", "must be >= 1");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("threshold", "must lie in [0, 1]");
  if (eve_link && *eve_link >= n_nodes - 1) {
    throw ConfigError("eve_link", fmt::format("link {} outside [0, {}]", *eve_link, n_nodes - 2));
  }
  if (!(qber_sample > 0.0 && qber_sample <= 1.0)) throw ConfigError("qber_sample", "must lie in (0, 1]");
  for (std::size_t n : sweep_nodes) {
    if (n < 2) throw ConfigError("sweep_nodes", "every node count must be >= 2");
  }
  for (double xi : sweep_transmittance) {
    if (!(xi >= 0.0 && xi <= 1.0)) throw ConfigError("sweep_transmittance", fmt::format("{} outside [0, 1]", xi));
  }
  for (const auto& m : sweep_mode) {
    if (m != "naive" && m != "padding" && m != "delay") throw ConfigError("sweep_mode", "unknown mode '" + m + "'");
  }
}

ChainSetup RunConfig::chain_setup() const {
  validate();
  ChainSetup s;
  s.topology = Topology(n_nodes);
  s.transmittance.clear();
  for (double xi : per_hop(*this)) s.transmittance.emplace_back(xi);
  s.mode = RelayMode::parse(mode, batch_size);
  if (eve_link) s.eve = EavesdropperConfig{*eve_link};
  return s;
}

SummaryOptions RunConfig::summary_options() const {
  return SummaryOptions{ReceiverModel(threshold), qber_sample, seed};
}

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig c;
  CLI::App app{"relay chain QKD run configuration"};
  app.set_config("--config", "", "TOML/INI key-value file; keys are the long option names");
  app.allow_config_extras(CLI::config_extras_mode::capture);
  app.allow_extras();

  app.add_option("--nodes", c.n_nodes, "node count including Alice and Bob");
  app.add_option("--slots", c.slots, "timeslots to simulate");
  app.add_option("--transmittance", c.transmittance, "per-hop survival probability, one value or one per hop")
      ->delimiter(',');
  app.add_option("--mode", c.mode, "relay mode: naive, padding, delay");
  app.add_option("--batch_size", c.batch_size, "delay-mode burst size");
  app.add_option("--threshold", c.threshold, "minimum per-window detection rate for a viable link");
  app.add_option("--eve_link", c.eve_link, "link index carrying an intercept/resend eavesdropper");
  app.add_option("--seed", c.seed, "master seed");
  app.add_option("--qber_sample", c.qber_sample, "fraction of the bridged key revealed for the QBER estimate");
  app.add_option("--out", c.output_dir, "output directory");
  app.add_flag("--trace", c.trace, "write a per-slot trace.csv");
  app.add_flag("--records", c.records, "write private records, announcements and relay messages");
  app.add_option("--sweep_nodes", c.sweep_nodes, "sweep axis over node counts")->delimiter(',');
  app.add_option("--sweep_transmittance", c.sweep_transmittance, "sweep axis over uniform transmittance")
      ->delimiter(',');
  app.add_option("--sweep_mode", c.sweep_mode, "sweep axis over relay modes")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw ConfigError("config", e.what());
  }
  for (const std::string& extra : app.remaining()) {
    std::string key = extra;
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    throw ConfigError(key, "unknown key");
  }
  c.validate();
  return c;
}

std::uint64_t derive_seed(std::uint64_t master_seed, const std::string& child_label) {
  return splitmix64(master_seed ^ splitmix64(stable_hash(child_label)));
}

RunResult run(const RunConfig& config) {
  const ChainSetup setup = config.chain_setup();
  RunArtifacts artifacts = post_process(simulate(setup, config.slots, config.seed));
  RunSummary summary = summarize(artifacts, config.summary_options());

  if (!config.output_dir.empty()) {
    const fs::path dir(config.output_dir);
    ensure_dir(dir);
    write_file(dir / "summary.txt", render_summary(config, summary));
    if (config.trace) {
      std::ostringstream os;
      write_trace_csv(os, artifacts.book);
      write_file(dir / "trace.csv", os.str());
    }
    if (config.records) {
      std::ostringstream rec;
      write_records(rec, artifacts.book, BitVisibility::Private);
      write_file(dir / "records.txt", rec.str());
      std::ostringstream ann;
      write_announcements(ann, artifacts.announcements);
      write_file(dir / "announcements.txt", ann.str());
      std::ostringstream msg;
      write_chain_messages(msg, artifacts.chains, artifacts.deltas);
      write_file(dir / "relay_messages.txt", msg.str());
    }
  }
  return RunResult{std::move(summary), std::move(artifacts)};
}

std::string render_summary(const RunConfig& config, const RunSummary& summary) {
  std::string out = "# relayqkd run summary v1\n";
  out += fmt::format("n_nodes = {}\n", config.n_nodes);
  out += fmt::format("hops = {}\n", config.n_nodes - 1);
  out += fmt::format("slots = {}\n", config.slots);
  out += fmt::format("seed = {}\n", config.seed);
  out += "mode = " + config.mode + "\n";
  out += fmt::format("batch_size = {}\n", config.batch_size);
  out += "threshold = " + fixed(config.threshold) + "\n";
  out += "eve_link = " + (config.eve_link ? std::to_string(*config.eve_link) : std::string("none")) + "\n";
  out += "qber_sample = " + fixed(config.qber_sample) + "\n";
  const std::vector<double> xi = per_hop(config);
  append_results(out, summary, &xi);
  return out;
}

std::string render_summary(const RunSummary& summary) {
  std::string out = "# relayqkd run summary v1\n";
  out += fmt::format("n_nodes = {}\n", summary.n_nodes);
  out += fmt::format("hops = {}\n", summary.n_nodes - 1);
  out += fmt::format("slots = {}\n", summary.slots);
  append_results(out, summary, nullptr);
  return out;
}

std::vector<SweepChild> expand_sweep(const RunConfig& base) {
  base.validate();
  const std::vector<std::size_t> nodes = base.sweep_nodes.empty() ? std::vector{base.n_nodes} : base.sweep_nodes;
  const std::vector<std::string> modes = base.sweep_mode.empty() ? std::vector{base.mode} : base.sweep_mode;
  std::vector<std::vector<double>> xis;
  if (base.sweep_transmittance.empty()) {
    xis.push_back(base.transmittance);
  } else {
    for (double xi : base.sweep_transmittance) xis.push_back({xi});
  }

  std::vector<SweepChild> children;
  for (std::size_t n : nodes) {
    for (const auto& xi : xis) {
      for (const auto& m : modes) {
        SweepChild child;
        child.label = fmt::format("n{}_xi{}_{}", n, xi_label(xi), m);
        child.seed = derive_seed(base.seed, child.label);
        child.config = base;
        child.config.n_nodes = n;
        child.config.transmittance = xi;
        child.config.mode = m;
        child.config.seed = child.seed;
        child.config.sweep_nodes.clear();
        child.config.sweep_transmittance.clear();
        child.config.sweep_mode.clear();
        if (!base.output_dir.empty()) child.config.output_dir = (fs::path(base.output_dir) / child.label).string();
        try {
          child.config.validate();
        } catch (const ConfigError& e) {
          throw ConfigError(e.key(), "sweep child " + child.label + ": " + e.what());
        }
        children.push_back(std::move(child));
      }
    }
  }
  return children;
}

SweepResult sweep(const RunConfig& base) {
  SweepResult result;
  result.children = expand_sweep(base);
  for (const auto& child : result.children) result.summaries.push_back(run(child.config).summary);

  if (!base.output_dir.empty()) {
    std::string index = "# relayqkd sweep index v1\n# label seed summary\n";
    for (const auto& child : result.children) {
      index += fmt::format("{} {} {}\n", child.label, child.seed, (fs::path(child.label) / "summary.txt").string());
    }
    ensure_dir(base.output_dir);
    write_file(fs::path(base.output_dir) / "sweep_index.txt", index);
  }
  return result;
}

}  // namespace relayqkd
