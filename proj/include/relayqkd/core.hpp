#pragma once

// BB84 primitives: bases, bits, single-photon states and seeded randomness.
//
// States are symbolic (basis, bit). Only matched vs. mismatched bases matter
// to the relay protocols, so no amplitudes are carried around.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace relayqkd {

enum class Basis : std::uint8_t { X, Y };

constexpr Basis complement(Basis b) noexcept { return b == Basis::X ? Basis::Y : Basis::X; }

char to_char(Basis b) noexcept;
Basis basis_from_char(char c);

/// A classical bit. XOR is the only arithmetic the protocols need.
class Bit {
 public:
  constexpr Bit() noexcept = default;
  constexpr explicit Bit(bool v) noexcept : v_(v) {}

  static Bit from_int(int v);

  constexpr bool value() const noexcept { return v_; }
  constexpr int as_int() const noexcept { return v_ ? 1 : 0; }

  friend constexpr Bit operator^(Bit a, Bit b) noexcept { return Bit(a.v_ != b.v_); }
  constexpr Bit& operator^=(Bit o) noexcept {
    v_ = v_ != o.v_;
    return *this;
  }
  friend constexpr bool operator==(Bit, Bit) noexcept = default;

 private:
  bool v_ = false;
};

inline constexpr Bit kZero{false};
inline constexpr Bit kOne{true};

/// One of |+>_X, |->_X, |+>_Y, |->_Y.
struct PhotonState {
  Basis basis = Basis::X;
  Bit bit;

  friend constexpr bool operator==(const PhotonState&, const PhotonState&) noexcept = default;
};

/// Deterministic random stream identified by (seed, label).
///
/// Every node, link and eavesdropper draws from its own labelled stream, so
/// the draws of one participant never depend on how many draws another made.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view label);

  std::uint64_t seed() const noexcept { return seed_; }
  const std::string& label() const noexcept { return label_; }

  Bit bit();
  Basis basis();
  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  bool bernoulli(double p);
  std::uint64_t next() { return engine_(); }

  /// Exposes the engine for use with <algorithm> (std::sample, std::shuffle).
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::string label_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;
/// FNV-1a; stable across platforms and runs, unlike std::hash.
std::uint64_t stable_hash(std::string_view s) noexcept;

PhotonState encode(Bit bit, Basis basis) noexcept;

/// Matched basis returns the encoded bit; mismatched basis returns a fresh
/// unbiased bit drawn from `rng`.
Bit measure(const PhotonState& state, Basis basis, RngStream& rng);

PhotonState random_photon(RngStream& rng);

}  // namespace relayqkd
