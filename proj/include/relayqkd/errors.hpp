#pragma once

#include <stdexcept>

namespace relayqkd {

/// Malformed or inconsistent input data (config, fixture files, record sets).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal consistency check failed; indicates a bug, not bad input.
class IntegrityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace relayqkd
