#include "relayqkd/simulator.hpp"

#include <stdexcept>
#include <string>

namespace relayqkd {

ChainSetup ChainSetup::uniform(std::size_t n_nodes, double transmittance, RelayMode mode) {
  ChainSetup s;
  s.topology = Topology(n_nodes);
  s.transmittance.assign(s.topology.hops(), Transmittance(transmittance));
  s.mode = mode;
  return s;
}

void ChainSetup::validate() const {
  if (transmittance.size() != topology.hops()) {
    throw std::invalid_argument("transmittance list has " + std::to_string(transmittance.size()) +
                                " entries, chain has " + std::to_string(topology.hops()) + " hops");
  }
  if (eve && eve->link_index >= topology.links()) {
    throw std::invalid_argument("eavesdropper link " + std::to_string(eve->link_index) + " outside [0, " +
                                std::to_string(topology.links() - 1) + "]");
  }
}

RecordBook simulate(const ChainSetup& setup, std::size_t slots, std::uint64_t seed, std::uint64_t run_id) {
  setup.validate();
  const Topology& topo = setup.topology;

  std::vector<RngStream> node_rng;
  node_rng.reserve(topo.n_nodes());
  for (NodeIndex i = 0; i < topo.n_nodes(); ++i) node_rng.emplace_back(seed, "node/" + std::to_string(i));

  std::vector<RngStream> loss_rng;
  std::vector<RngStream> eve_rng;
  std::vector<ChannelParams> params;
  for (std::size_t l = 0; l < topo.links(); ++l) {
    loss_rng.emplace_back(seed, "link/" + std::to_string(l) + "/loss");
    eve_rng.emplace_back(seed, "link/" + std::to_string(l) + "/eve");
    params.push_back(ChannelParams{setup.transmittance[l]});
  }

  std::vector<Relay> relays;
  for (NodeIndex i = 1; i + 1 < topo.n_nodes(); ++i) relays.emplace_back(i, setup.mode);

  RecordBook book(topo.n_nodes(), 0, slots, run_id);
  for (std::size_t s = 0; s < slots; ++s) {
    const auto t = static_cast<Timeslot>(s);
    auto [photon, alice_rec] = alice_emit(t, node_rng[0]);
    book.put(std::move(alice_rec));

    std::optional<PhotonState> in_flight = photon;
    for (std::size_t l = 0; l < topo.links(); ++l) {
      if (in_flight) {
        const EavesdropperConfig* eve = (setup.eve && setup.eve->link_index == l) ? &*setup.eve : nullptr;
        in_flight = transmit(*in_flight, params[l], eve, loss_rng[l], eve_rng[l]);
      }
      const NodeIndex receiver = l + 1;
      if (receiver == topo.bob()) {
        book.put(bob_measure(in_flight, receiver, t, node_rng[receiver]));
      } else {
        auto [out, rec] = relays[receiver - 1].process(in_flight, t, node_rng[receiver]);
        book.put(std::move(rec));
        in_flight = out;
      }
    }
  }
  return book;
}

}  // namespace relayqkd
