#pragma once

#include <stdexcept>
#include <string>

namespace lbs {

/// Region construction or containment violated (core not inside support, etc.).
struct RegionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An operation's documented precondition does not hold.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct UnsupportedModel : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A phase point outside every chart domain of the family.
struct DomainError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

/// Return map undefined at the seed: the orbit left the domain, stalled or ran out of time.
struct NoReturn : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientShells : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A classification needs data that was left unresolved upstream.
struct Unresolvable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Configuration or schema problem in user input.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lbs
