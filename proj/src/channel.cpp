#include "relayqkd/channel.hpp"

#include <stdexcept>
#include <string>

namespace relayqkd {

Transmittance::Transmittance(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument("transmittance must lie in [0, 1], got " + std::to_string(value));
  }
}

PhotonState intercept_resend(const PhotonState& photon, RngStream& rng) {
  const Basis eve_basis = rng.basis();
  return encode(measure(photon, eve_basis, rng), eve_basis);
}

std::optional<PhotonState> transmit(const PhotonState& photon, const ChannelParams& params,
                                    const EavesdropperConfig* eve, RngStream& loss_rng,
                                    RngStream& eve_rng) {
  if (!loss_rng.bernoulli(params.transmittance.value())) return std::nullopt;
  if (eve != nullptr) return intercept_resend(photon, eve_rng);
  return photon;
}

std::optional<PhotonState> transmit(const PhotonState& photon, const ChannelParams& params,
                                    RngStream& loss_rng) {
  if (!loss_rng.bernoulli(params.transmittance.value())) return std::nullopt;
  return photon;
}

}  // namespace relayqkd
