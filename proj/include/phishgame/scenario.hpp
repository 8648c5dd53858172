// Scenario configs: a YAML document naming the profile, policies, attention,
// strategies and sample sizes of a run.
//
//   version: 1
//   profile: chrome              # chrome | firefox | edge
//   warning_ticks: 3             # transient profiles only
//   universe_size: 128
//   n: 10000
//   seed: 42
//   p_genuine: 0.5               # single episodes; the matrix fixes its own
//   compromised: false
//   policies: [secret_checker, padlock_checker]
//   strategies: [plain_phish_page, fake_dialog_div]
//   attention: full              # or {preset: casual, fullscreen_warning: 0.5}
//   payoffs:
//     credentials_to_mallory: {user: -1, attacker: 1}
//   glance_delay_ticks: 0
//   prior_fullscreen_entries: 0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "phishgame/attacks.hpp"
#include "phishgame/errors.hpp"
#include "phishgame/game.hpp"

namespace phishgame {

inline constexpr int kScenarioVersion = 1;

/// A config that does not match the schema. line is 1-based, 0 if unknown.
class ScenarioError : public ConfigError {
 public:
  ScenarioError(std::string field, int line, const std::string& message);
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

struct ScenarioConfig {
  int version = kScenarioVersion;
  std::string profile_name = "chrome";
  BrowserProfile profile = chrome_like_profile();
  std::uint32_t universe_size = kDefaultUniverseSize;
  std::uint64_t n = 10'000;
  std::uint64_t seed = 1;
  double p_genuine = 0.5;
  bool compromised = false;
  std::vector<PolicyKind> policies{kAllPolicies.begin(), kAllPolicies.end()};
  std::vector<AttackerStrategy> strategies = default_strategies();
  std::string attention_name = "full";
  AttentionProfile attention = full_attention();
  PayoffTable payoffs;
  std::uint32_t glance_delay_ticks = 0;
  std::uint32_t prior_fullscreen_entries = 0;

  /// SHA-256 of the bytes the config was parsed from.
  std::string hash;

  /// Episode config for the first policy and strategy.
  EpisodeConfig episode_config() const;
};

ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);

/// JSON Schema describing the accepted document.
nlohmann::json scenario_schema();

}  // namespace phishgame
