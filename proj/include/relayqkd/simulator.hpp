#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "relayqkd/channel.hpp"
#include "relayqkd/nodes.hpp"

namespace relayqkd {

struct ChainSetup {
  Topology topology{3};
  /// One entry per hop.
  std::vector<Transmittance> transmittance;
  RelayMode mode = RelayMode::naive();
  std::optional<EavesdropperConfig> eve;

  /// Same transmittance on every hop.
  static ChainSetup uniform(std::size_t n_nodes, double transmittance, RelayMode mode = RelayMode::naive());

  /// Throws std::invalid_argument when hop count or Eve's link do not fit the topology.
  void validate() const;
};

/// Runs `slots` timeslots (numbered from 0) through the chain. The result is a
/// pure function of (setup, slots, seed).
RecordBook simulate(const ChainSetup& setup, std::size_t slots, std::uint64_t seed, std::uint64_t run_id = 0);

}  // namespace relayqkd
