// The user-browser shared secret. It lives on the simulated disk and only
// the chrome process may read it.

#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "phishgame/capability.hpp"
#include "phishgame/rng.hpp"

namespace phishgame {

inline constexpr std::uint32_t kDefaultUniverseSize = 128;

/// An index into a public deck of U images. Knowing the deck is not
/// knowing which image is the secret.
struct SharedSecret {
  std::uint32_t secret_id = 0;
  std::string label;

  friend bool operator==(const SharedSecret&, const SharedSecret&) = default;
};

struct SecretStore {
  SharedSecret secret;
  std::uint32_t universe_size = kDefaultUniverseSize;
  bool compromised = false;

  friend bool operator==(const SecretStore&, const SecretStore&) = default;
};

struct CapabilityDenied {
  friend bool operator==(const CapabilityDenied&, const CapabilityDenied&) = default;
};

using SecretReadResult = std::variant<SharedSecret, CapabilityDenied>;

/// Uniform draw over [0, universe_size). Throws ConfigError if U < 2.
SecretStore provision_secret(Rng& rng, std::uint32_t universe_size);

SecretReadResult read_secret(const SecretStore& store, const Capability& cap);

SecretStore mark_compromised(SecretStore store);

}  // namespace phishgame
