// Episodes of the phishing game and the statistics built from them.
//
// One episode: nature draws Bob or Mallory, the browser composes a screen
// (Bob's verified dialog or Mallory's plan), Alice perceives and decides,
// and payoffs follow from where her credentials went.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phishgame/attacks.hpp"
#include "phishgame/users.hpp"
#include "phishgame/vmachine.hpp"
#include "phishgame/world.hpp"

namespace phishgame {

enum class WorldType { kGenuine, kPhish };
std::string_view to_string(WorldType world);

enum class Outcome {
  kCredentialsToMallory,
  kCredentialsToBob,
  kBackawayFromBob,
  kBackawayFromMallory,
};
inline constexpr std::size_t kOutcomeCount = 4;
std::string_view to_string(Outcome outcome);

struct PayoffRow {
  double user = 0.0;
  double attacker = 0.0;
  friend bool operator==(const PayoffRow&, const PayoffRow&) = default;
};

/// Illustrative numbers: a false reject of Bob costs the user a little.
struct PayoffTable {
  std::array<PayoffRow, kOutcomeCount> rows = {{
      {-1.0, 1.0},  // credentials to Mallory
      {1.0, 0.0},   // credentials to Bob
      {-0.1, 0.0},  // backed away from Bob
      {0.0, 0.0},   // backed away from Mallory
  }};

  const PayoffRow& operator[](Outcome o) const { return rows[static_cast<std::size_t>(o)]; }
  PayoffRow& operator[](Outcome o) { return rows[static_cast<std::size_t>(o)]; }
  friend bool operator==(const PayoffTable&, const PayoffTable&) = default;
};

struct EpisodeConfig {
  double p_genuine = 0.0;
  AttackerStrategy strategy;
  PolicyKind policy = PolicyKind::kSecretChecker;
  AttentionProfile attention = full_attention();
  BrowserProfile profile = chrome_like_profile();
  std::uint32_t universe_size = kDefaultUniverseSize;
  PayoffTable payoffs;
  std::uint64_t seed = 0;
  bool compromised = false;
  /// Ticks between the screen being composed and Alice's glance.
  std::uint32_t glance_delay_ticks = 0;
  /// The attacker's origin already went fullscreen this many times before
  /// (matters only for first-time-persistent warning profiles).
  std::uint32_t prior_fullscreen_entries = 0;
  WorldSpec world;
};

/// Throws ConfigError / IllegalStrategy for an unusable config.
void validate(const EpisodeConfig& config);

struct EpisodeTranscript {
  std::uint64_t seed = 0;
  WorldType world = WorldType::kGenuine;
  std::optional<AttackerStrategy> strategy;
  PolicyKind policy = PolicyKind::kSecretChecker;
  std::uint32_t secret_id = 0;  // revealed after the episode
  std::optional<std::uint32_t> guessed_secret_id;
  std::vector<SessionEvent> events;
  ScreenState screen;  // as composed when Alice looked
  SignalSet signals;
  Decision decision = Decision::kBackAway;
  bool credentials_captured = false;
  Outcome outcome = Outcome::kBackawayFromBob;
  PayoffRow payoffs;
};

EpisodeTranscript run_episode(const EpisodeConfig& config);

/// An episode up to the moment Alice looks: the world is drawn, the screen
/// composed, nothing decided yet. run_episode() is prepare, perceive,
/// decide, resolve; the service lets a human do the middle two.
struct PreparedEpisode {
  World world;
  Session session;
  EpisodeTranscript transcript;  // decision, signals, outcome still unset
};

PreparedEpisode prepare_episode(const EpisodeConfig& config, const SecretStore& store);
EpisodeTranscript resolve_episode(PreparedEpisode prepared, Decision decision,
                                  const PayoffTable& payoffs);

/// What Alice remembers: her secret, Bob, and Bob's Trent.
UserMemory user_memory(const World& world, const SecretStore& store);

/// For every origin that raised a trusted dialog: its first sandbox was
/// created strictly after the tick at which credentials were entered.
bool login_precedes_sandbox(const EpisodeTranscript& transcript);

struct Interval {
  double low = 0.0;
  double high = 1.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Wilson score interval at 95%.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials);

struct EpisodeSummary {
  WorldType world = WorldType::kGenuine;
  Decision decision = Decision::kBackAway;
  bool captured = false;
  Outcome outcome = Outcome::kBackawayFromBob;
};

EpisodeSummary summarize(const EpisodeTranscript& transcript);

struct AggregateStats {
  std::uint64_t n = 0;
  std::uint64_t n_genuine = 0;
  std::uint64_t n_phish = 0;
  std::uint64_t accepted_genuine = 0;
  std::uint64_t accepted_phish = 0;
  std::uint64_t captured = 0;
  std::array<std::uint64_t, kOutcomeCount> outcome_counts{};

  double attack_success_rate = 0.0;  // captured / n_phish
  double accept_given_genuine = 0.0;
  double accept_given_phish = 0.0;
  Interval attack_success_ci;        // Wilson 95%
  double mean_user_payoff = 0.0;
  double mean_attacker_payoff = 0.0;

  friend bool operator==(const AggregateStats&, const AggregateStats&) = default;
};

/// Computed from counts only, so the order of episodes does not matter.
AggregateStats aggregate(std::span<const EpisodeSummary> episodes, const PayoffTable& payoffs);

struct BatchOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  /// Called once per episode, possibly from several threads at once.
  std::function<void(const EpisodeTranscript&)> observer;
};

/// Episode i runs with seed split_seed(config.seed, i).
AggregateStats run_batch(const EpisodeConfig& config, std::uint64_t n,
                         const BatchOptions& options = {});

struct MatrixCell {
  std::optional<AttackerStrategy> strategy;  // nullopt: genuine baseline
  PolicyKind policy = PolicyKind::kSecretChecker;
  AggregateStats stats;
};

struct Matrix {
  std::vector<AttackerStrategy> strategies;
  std::vector<PolicyKind> policies;
  std::vector<MatrixCell> cells;  // attack cells row-major by strategy, then baselines

  const MatrixCell& attack_cell(std::size_t strategy, std::size_t policy) const;
  const MatrixCell& baseline(std::size_t policy) const;
};

/// Attack cells run with p_genuine = 0, one baseline per policy with
/// p_genuine = 1. Every cell uses the base seed, so cells share secrets and
/// draws. SecretThief cells run against a compromised store.
Matrix evaluate_matrix(const EpisodeConfig& base, std::span<const AttackerStrategy> strategies,
                       std::span<const PolicyKind> policies, std::uint64_t n,
                       const BatchOptions& options = {});

/// accept_given_genuine minus the best strategy's accept_given_phish.
double separation_index(const EpisodeConfig& base, PolicyKind policy,
                        const AttentionProfile& attention,
                        std::span<const AttackerStrategy> strategies, std::uint64_t n,
                        const BatchOptions& options = {});

struct AttackRecord {
  AttackerStrategy strategy;
  bool success = false;
};

/// Add-one smoothed success rate per strategy: (wins + 1) / (tries + 2).
std::vector<double> smoothed_success_rates(std::span<const AttackRecord> history,
                                           std::span<const AttackerStrategy> strategies);

/// With probability `exploration` a uniform pick; otherwise the highest
/// smoothed rate, ties to the lowest index.
AttackerStrategy best_response(std::span<const AttackRecord> history,
                               std::span<const AttackerStrategy> strategies,
                               double exploration, Rng& rng);

}  // namespace phishgame
