// The fixed cast of a scenario: Bob, Mallory, and the Trent both bought
// certificates from.

#pragma once

#include <cstdint>
#include <string>

#include "phishgame/pki.hpp"

namespace phishgame {

struct WorldSpec {
  IdentityCredentials bob{"bank.example", "Bank of Examplia plc", "EX"};
  IdentityCredentials mallory{"bank-examplia-login.example", "Mallory Holdings Ltd", "ZZ"};
  std::string trent_name = "trent";
  std::string trent_display_name = "Central Bank of Examplia";
  Tick validity_end = 1'000'000;
};

struct World {
  WorldSpec spec;
  TrentRegistry registry;
  Certificate bob_certificate;
  Certificate mallory_certificate;

  const std::string& bob_origin() const { return spec.bob.subject_name; }
  const std::string& mallory_origin() const { return spec.mallory.subject_name; }
};

/// Trent's key is drawn from `seed`, so a world is reproducible.
World build_world(const WorldSpec& spec, std::uint64_t seed);

}  // namespace phishgame
