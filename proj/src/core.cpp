#include "relayqkd/core.hpp"

#include <string>

namespace relayqkd {

char to_char(Basis b) noexcept { return b == Basis::X ? 'X' : 'Y'; }

Basis basis_from_char(char c) {
  switch (c) {
    case 'X':
    case 'x':
      return Basis::X;
    case 'Y':
    case 'y':
      return Basis::Y;
    default:
      throw std::invalid_argument(std::string("not a basis: '") + c + "'");
  }
}

Bit Bit::from_int(int v) {
  if (v != 0 && v != 1) throw std::invalid_argument("bit value must be 0 or 1, got " + std::to_string(v));
  return Bit(v == 1);
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t stable_hash(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

RngStream::RngStream(std::uint64_t seed, std::string_view label)
    : seed_(seed), label_(label), engine_(splitmix64(seed ^ splitmix64(stable_hash(label)))) {}

Bit RngStream::bit() { return Bit((engine_() >> 63) != 0); }

Basis RngStream::basis() { return (engine_() >> 63) != 0 ? Basis::Y : Basis::X; }

double RngStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

bool RngStream::bernoulli(double p) {
  if (p >= 1.0) return true;
  if (p <= 0.0) return false;
  return uniform() < p;
}

PhotonState encode(Bit bit, Basis basis) noexcept { return PhotonState{basis, bit}; }

Bit measure(const PhotonState& state, Basis basis, RngStream& rng) {
  if (basis == state.basis) return state.bit;
  return rng.bit();
}

PhotonState random_photon(RngStream& rng) {
  const Basis b = rng.basis();
  const Bit v = rng.bit();
  return encode(v, b);
}

}  // namespace relayqkd
