#pragma once

#include <cstddef>
#include <optional>

#include "relayqkd/core.hpp"

namespace relayqkd {

/// Per-hop photon survival probability.
class Transmittance {
 public:
  explicit Transmittance(double value);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

struct ChannelParams {
  Transmittance transmittance{1.0};
};

/// Intercept/resend in a uniformly random basis on one link.
struct EavesdropperConfig {
  std::size_t link_index = 0;
};

/// Eve's action on a photon that reached her: measure in `rng`'s basis, resend
/// the measured state.
PhotonState intercept_resend(const PhotonState& photon, RngStream& rng);

/// One hop. The loss draw comes from `loss_rng`; Eve, when present, draws from
/// `eve_rng` so that attaching her leaves the loss pattern unchanged.
std::optional<PhotonState> transmit(const PhotonState& photon, const ChannelParams& params,
                                    const EavesdropperConfig* eve, RngStream& loss_rng,
                                    RngStream& eve_rng);

/// Convenience overload without an eavesdropper.
std::optional<PhotonState> transmit(const PhotonState& photon, const ChannelParams& params,
                                    RngStream& loss_rng);

}  // namespace relayqkd
