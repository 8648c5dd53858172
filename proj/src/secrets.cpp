#include "phishgame/secrets.hpp"

#include "phishgame/errors.hpp"

namespace phishgame {

SecretStore provision_secret(Rng& rng, std::uint32_t universe_size) {
  if (universe_size < 2) {
    throw ConfigError("universe_size must be at least 2, got " +
                      std::to_string(universe_size));
  }
  SecretStore store;
  store.universe_size = universe_size;
  store.secret.secret_id = static_cast<std::uint32_t>(rng.uniform(universe_size));
  store.secret.label = "image-" + std::to_string(store.secret.secret_id);
  return store;
}

SecretReadResult read_secret(const SecretStore& store, const Capability& cap) {
  if (!cap.is_chrome()) return CapabilityDenied{};
  return store.secret;
}

SecretStore mark_compromised(SecretStore store) {
  store.compromised = true;
  return store;
}

}  // namespace phishgame
