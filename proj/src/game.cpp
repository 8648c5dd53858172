#include "phishgame/game.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include "phishgame/errors.hpp"

namespace phishgame {

std::string_view to_string(WorldType world) {
  return world == WorldType::kGenuine ? "genuine" : "phish";
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::kCredentialsToMallory:
      return "credentials_to_mallory";
    case Outcome::kCredentialsToBob:
      return "credentials_to_bob";
    case Outcome::kBackawayFromBob:
      return "backaway_from_bob";
    case Outcome::kBackawayFromMallory:
      return "backaway_from_mallory";
  }
  return "unknown";
}

void validate(const EpisodeConfig& config) {
  if (!(config.p_genuine >= 0.0 && config.p_genuine <= 1.0)) {
    throw ConfigError("p_genuine must lie in [0, 1]");
  }
  if (config.universe_size < 2) throw ConfigError("universe_size must be at least 2");
  if (!config.attention.valid()) throw ConfigError("attention probabilities must lie in [0, 1]");
  for (const auto& row : config.payoffs.rows) {
    if (!std::isfinite(row.user) || !std::isfinite(row.attacker)) {
      throw ConfigError("payoffs must be finite");
    }
  }
  if (config.strategy.kind == AttackKind::kSecretThief && !config.compromised &&
      config.p_genuine < 1.0) {
    throw IllegalStrategy("secret_thief requires a compromised secret store");
  }
}

PreparedEpisode prepare_episode(const EpisodeConfig& config, const SecretStore& store) {
  validate(config);
  const std::uint64_t seed = config.seed;
  World world = build_world(config.world, derive_seed(seed, "world"));
  Session session = begin_session(config.profile, store, world.registry);
  PreparedEpisode p{std::move(world), std::move(session), {}};

  Rng draw_rng(derive_seed(seed, "world-draw"));
  const bool genuine = draw_rng.uniform01() < config.p_genuine;

  EpisodeTranscript& t = p.transcript;
  t.seed = seed;
  t.world = genuine ? WorldType::kGenuine : WorldType::kPhish;
  t.policy = config.policy;
  t.secret_id = store.secret.secret_id;

  if (genuine) {
    p.session = navigate(std::move(p.session), p.world.bob_origin(), p.world.bob_certificate);
  } else {
    AttackContext ctx;
    ctx.target_identity = p.world.spec.bob;
    ctx.target_origin = p.world.bob_origin();
    ctx.target_trent_display_name = p.world.spec.trent_display_name;
    ctx.attacker_origin = p.world.mallory_origin();
    ctx.attacker_certificate = p.world.mallory_certificate;
    ctx.universe_size = config.universe_size;

    Rng attack_rng(derive_seed(seed, "attack"));
    const AttackPlan plan = plan_attack(config.strategy, ctx, attack_rng, store);
    t.strategy = config.strategy;
    t.guessed_secret_id = plan.guessed_secret_id;
    if (config.prior_fullscreen_entries > 0) {
      p.session = p.session.with_fullscreen_history(ctx.attacker_origin);
    }
    p.session = apply_attack(std::move(p.session), plan);
  }
  for (std::uint32_t i = 0; i < config.glance_delay_ticks; ++i) {
    p.session = advance_tick(std::move(p.session));
  }
  t.screen = p.session.screen();
  return p;
}

UserMemory user_memory(const World& world, const SecretStore& store) {
  UserMemory m;
  m.expected_secret_id = store.secret.secret_id;
  m.known_identities = {world.spec.bob};
  m.known_trents = {world.spec.trent_display_name};
  return m;
}

EpisodeTranscript resolve_episode(PreparedEpisode prepared, Decision decision,
                                  const PayoffTable& payoffs) {
  EpisodeTranscript t = std::move(prepared.transcript);
  Session session = std::move(prepared.session);
  const World& world = prepared.world;
  t.decision = decision;

  if (has_login_affordance(session.screen())) {
    const LoginDecision login =
        decision == Decision::kEnterCredentials
            ? LoginDecision{EnterCredentials{{"alice", "correct horse battery staple"}}}
            : LoginDecision{BackAway{}};
    session = submit_login(std::move(session), login);
  }
  t.events = session.events();

  // Credentials reach Mallory through a counterfeit, or through a genuine
  // dialog raised for her own certificate.
  for (const SessionEvent& e : t.events) {
    if (e.kind == EventKind::kCredentialsCaptured ||
        (e.kind == EventKind::kCredentialsEntered && e.origin != world.bob_origin())) {
      t.credentials_captured = true;
    }
  }
  const bool entered = decision == Decision::kEnterCredentials && has_login_affordance(t.screen);
  if (t.world == WorldType::kGenuine) {
    t.outcome = entered ? Outcome::kCredentialsToBob : Outcome::kBackawayFromBob;
  } else {
    t.outcome = t.credentials_captured ? Outcome::kCredentialsToMallory
                                       : Outcome::kBackawayFromMallory;
  }
  t.payoffs = payoffs[t.outcome];
  return t;
}

EpisodeTranscript run_episode(const EpisodeConfig& config) {
  validate(config);
  Rng secret_rng(derive_seed(config.seed, "secret"));
  SecretStore store = provision_secret(secret_rng, config.universe_size);
  if (config.compromised) store = mark_compromised(std::move(store));

  PreparedEpisode prepared = prepare_episode(config, store);
  Rng perceive_rng(derive_seed(config.seed, "perceive"));
  SignalSet signals = perceive(prepared.transcript.screen, config.attention, perceive_rng);

  UserPolicy policy;
  policy.kind = config.policy;
  policy.memory = user_memory(prepared.world, store);
  const Decision decision = decide(policy, signals);

  EpisodeTranscript t = resolve_episode(std::move(prepared), decision, config.payoffs);
  t.signals = std::move(signals);
  return t;
}

bool login_precedes_sandbox(const EpisodeTranscript& transcript) {
  std::map<std::string, Tick> dialog_at;
  std::map<std::string, Tick> entered_at;
  for (const SessionEvent& e : transcript.events) {
    switch (e.kind) {
      case EventKind::kDialogShown:
        dialog_at.emplace(e.origin, e.tick);
        entered_at.erase(e.origin);
        break;
      case EventKind::kCredentialsEntered:
        entered_at.emplace(e.origin, e.tick);
        break;
      case EventKind::kPageCreated:
        if (dialog_at.count(e.origin) > 0) {
          const auto it = entered_at.find(e.origin);
          if (it == entered_at.end() || !(e.tick > it->second)) return false;
          dialog_at.erase(e.origin);
        }
        break;
      default:
        break;
    }
  }
  return true;
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

EpisodeSummary summarize(const EpisodeTranscript& t) {
  return {t.world, t.decision, t.credentials_captured, t.outcome};
}

AggregateStats aggregate(std::span<const EpisodeSummary> episodes, const PayoffTable& payoffs) {
  AggregateStats s;
  for (const EpisodeSummary& e : episodes) {
    ++s.n;
    const bool accepted = e.decision == Decision::kEnterCredentials;
    if (e.world == WorldType::kGenuine) {
      ++s.n_genuine;
      s.accepted_genuine += accepted;
    } else {
      ++s.n_phish;
      s.accepted_phish += accepted;
      s.captured += e.captured;
    }
    ++s.outcome_counts[static_cast<std::size_t>(e.outcome)];
  }
  const auto rate = [](std::uint64_t k, std::uint64_t n) {
    return n == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(n);
  };
  s.attack_success_rate = rate(s.captured, s.n_phish);
  s.accept_given_genuine = rate(s.accepted_genuine, s.n_genuine);
  s.accept_given_phish = rate(s.accepted_phish, s.n_phish);
  s.attack_success_ci = wilson_interval(s.captured, s.n_phish);
  if (s.n > 0) {
    double user = 0.0;
    double attacker = 0.0;
    for (std::size_t o = 0; o < kOutcomeCount; ++o) {
      user += static_cast<double>(s.outcome_counts[o]) * payoffs.rows[o].user;
      attacker += static_cast<double>(s.outcome_counts[o]) * payoffs.rows[o].attacker;
    }
    s.mean_user_payoff = user / static_cast<double>(s.n);
    s.mean_attacker_payoff = attacker / static_cast<double>(s.n);
  }
  return s;
}

AggregateStats run_batch(const EpisodeConfig& config, std::uint64_t n,
                         const BatchOptions& options) {
  if (n == 0) throw ConfigError("batch size must be at least 1");
  validate(config);

  std::vector<EpisodeSummary> summaries(n);
  unsigned threads = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::min<std::uint64_t>(n, 64)));

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  const auto worker = [&] {
    try {
      for (std::uint64_t i = next++; i < n && !failed; i = next++) {
        EpisodeConfig episode = config;
        episode.seed = split_seed(config.seed, i);
        const EpisodeTranscript t = run_episode(episode);
        if (options.observer) options.observer(t);
        summaries[i] = summarize(t);
      }
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return aggregate(summaries, config.payoffs);
}

const MatrixCell& Matrix::attack_cell(std::size_t strategy, std::size_t policy) const {
  return cells.at(strategy * policies.size() + policy);
}

const MatrixCell& Matrix::baseline(std::size_t policy) const {
  return cells.at(strategies.size() * policies.size() + policy);
}

Matrix evaluate_matrix(const EpisodeConfig& base, std::span<const AttackerStrategy> strategies,
                       std::span<const PolicyKind> policies, std::uint64_t n,
                       const BatchOptions& options) {
  if (strategies.empty() || policies.empty()) {
    throw ConfigError("matrix needs at least one strategy and one policy");
  }
  Matrix m;
  m.strategies.assign(strategies.begin(), strategies.end());
  m.policies.assign(policies.begin(), policies.end());
  for (const AttackerStrategy& strategy : strategies) {
    for (PolicyKind policy : policies) {
      EpisodeConfig cell = base;
      cell.p_genuine = 0.0;
      cell.strategy = strategy;
      cell.policy = policy;
      if (strategy.kind == AttackKind::kSecretThief) cell.compromised = true;
      m.cells.push_back({strategy, policy, run_batch(cell, n, options)});
    }
  }
  for (PolicyKind policy : policies) {
    EpisodeConfig cell = base;
    cell.p_genuine = 1.0;
    cell.policy = policy;
    m.cells.push_back({std::nullopt, policy, run_batch(cell, n, options)});
  }
  return m;
}

double separation_index(const EpisodeConfig& base, PolicyKind policy,
                        const AttentionProfile& attention,
                        std::span<const AttackerStrategy> strategies, std::uint64_t n,
                        const BatchOptions& options) {
  EpisodeConfig config = base;
  config.policy = policy;
  config.attention = attention;
  const std::array<PolicyKind, 1> one{policy};
  const Matrix m = evaluate_matrix(config, strategies, one, n, options);
  double worst = 0.0;
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    worst = std::max(worst, m.attack_cell(i, 0).stats.accept_given_phish);
  }
  return m.baseline(0).stats.accept_given_genuine - worst;
}

std::vector<double> smoothed_success_rates(std::span<const AttackRecord> history,
                                           std::span<const AttackerStrategy> strategies) {
  std::vector<double> rates;
  rates.reserve(strategies.size());
  for (const AttackerStrategy& s : strategies) {
    std::uint64_t wins = 0;
    std::uint64_t tries = 0;
    for (const AttackRecord& r : history) {
      if (r.strategy == s) {
        ++tries;
        wins += r.success;
      }
    }
    rates.push_back(static_cast<double>(wins + 1) / static_cast<double>(tries + 2));
  }
  return rates;
}

AttackerStrategy best_response(std::span<const AttackRecord> history,
                               std::span<const AttackerStrategy> strategies,
                               double exploration, Rng& rng) {
  if (strategies.empty()) throw ConfigError("best_response needs at least one strategy");
  const double u = rng.uniform01();
  const std::uint64_t pick = rng.uniform(strategies.size());
  if (u < exploration) return strategies[pick];

  const auto rates = smoothed_success_rates(history, strategies);
  std::size_t best = 0;
  for (std::size_t i = 1; i < rates.size(); ++i) {
    if (rates[i] > rates[best]) best = i;
  }
  return strategies[best];
}

}  // namespace phishgame
