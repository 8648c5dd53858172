#include "phishgame/world.hpp"

namespace phishgame {

World build_world(const WorldSpec& spec, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "trent-key"));
  TrentAuthority trent(spec.trent_name, rng);
  World world;
  world.spec = spec;
  world.registry.add(trent, spec.trent_display_name);
  world.bob_certificate = trent.issue(spec.bob, {0, spec.validity_end}, true);
  world.mallory_certificate = trent.issue(spec.mallory, {0, spec.validity_end}, true);
  return world;
}

}  // namespace phishgame
