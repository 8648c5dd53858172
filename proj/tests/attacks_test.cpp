#include <cmath>

#include <gtest/gtest.h>

#include "phishgame/attacks.hpp"
#include "phishgame/errors.hpp"
#include "phishgame/game.hpp"
#include "phishgame/world.hpp"

namespace phishgame {
namespace {

struct Env {
  World world = build_world(WorldSpec{}, 21);
  AttackContext ctx;
  SecretStore store;
  Env() {
    ctx.target_identity = world.spec.bob;
    ctx.target_origin = world.bob_origin();
    ctx.target_trent_display_name = world.spec.trent_display_name;
    ctx.attacker_origin = world.mallory_origin();
    ctx.attacker_certificate = world.mallory_certificate;
    Rng rng(2);
    store = provision_secret(rng, ctx.universe_size);
  }
  Session run(const AttackerStrategy& s, BrowserProfile profile = chrome_like_profile()) {
    Rng rng(6);
    const SecretStore used = s.kind == AttackKind::kSecretThief ? mark_compromised(store) : store;
    const AttackPlan plan = plan_attack(s, ctx, rng, used);
    return apply_attack(begin_session(std::move(profile), used, world.registry), plan);
  }
};

TEST(StrategyTest, NamesRoundTripAndCatalogHasSeven) {
  const auto all = default_strategies();
  ASSERT_EQ(all.size(), 7u);
  for (const auto& s : all) EXPECT_EQ(strategy_by_name(strategy_name(s)), s);
  const AttackerStrategy crayon{AttackKind::kFullscreenCounterfeit, Fidelity::kCrayon};
  EXPECT_EQ(strategy_by_name("fullscreen_counterfeit_crayon"), crayon);
  EXPECT_EQ(strategy_name(all[3]), "fullscreen_counterfeit");
  EXPECT_FALSE(strategy_by_name("nope"));
}

TEST(PlanTest, SecretThiefNeedsACompromisedStore) {
  Env env;
  Rng rng(1);
  const AttackerStrategy thief{AttackKind::kSecretThief};
  EXPECT_THROW(plan_attack(thief, env.ctx, rng, env.store), IllegalStrategy);
  EXPECT_THROW(steal_secret(env.store), IllegalStrategy);
  const auto plan = plan_attack(thief, env.ctx, rng, mark_compromised(env.store));
  EXPECT_EQ(plan.guessed_secret_id, env.store.secret.secret_id);
}

TEST(PlanTest, CertBearingMalloryNeedsACertificate) {
  Env env;
  env.ctx.attacker_certificate.reset();
  Rng rng(1);
  EXPECT_THROW(plan_attack({AttackKind::kCertBearingMallory}, env.ctx, rng, env.store),
               IllegalStrategy);
}

TEST(PlanTest, OnlyDialogDrawingStrategiesGuess) {
  Env env;
  for (const auto& s : default_strategies()) {
    if (s.kind == AttackKind::kSecretThief) continue;
    Rng rng(1);
    const auto plan = plan_attack(s, env.ctx, rng, env.store);
    const bool draws_dialog = s.kind == AttackKind::kFakeDialogDiv ||
                              s.kind == AttackKind::kUndecoratedPopup ||
                              s.kind == AttackKind::kFullscreenCounterfeit;
    EXPECT_EQ(plan.guessed_secret_id.has_value(), draws_dialog) << strategy_name(s);
    EXPECT_EQ(plan.origin, env.ctx.attacker_origin);
  }
}

TEST(ApplyTest, CertBearingMalloryGetsAGenuineDialogWithHerOwnName) {
  Env env;
  const Session s = env.run({AttackKind::kCertBearingMallory});
  ASSERT_TRUE(s.screen().modal);
  EXPECT_EQ(s.screen().modal->identity(), env.world.spec.mallory);
}

TEST(ApplyTest, UndecoratedPopupStillShowsItsOrigin) {
  Env env;
  const Session s = env.run({AttackKind::kUndecoratedPopup});
  EXPECT_EQ(s.screen().chrome_bar.overlay_address_bar, env.ctx.attacker_origin);
  EXPECT_FALSE(s.screen().modal);
}

TEST(ApplyTest, FullscreenCounterfeitPaintsBobsChrome) {
  Env env;
  const Session s = env.run({AttackKind::kFullscreenCounterfeit});
  EXPECT_TRUE(s.screen().fullscreen);
  ASSERT_TRUE(s.screen().warning);
  EXPECT_FALSE(s.screen().modal);
  bool found = false;
  for (const auto& surface : s.screen().canvas) {
    if (const auto* d = std::get_if<CounterfeitDesktop>(&surface.content)) {
      found = true;
      EXPECT_EQ(d->chrome.address, env.ctx.target_origin);
      EXPECT_TRUE(d->chrome.padlock);
    }
  }
  EXPECT_TRUE(found);
}

TEST(ApplyTest, ChromeOnlyStepsAreRefusedAndLogged) {
  Env env;
  AttackPlan plan;
  plan.origin = env.ctx.attacker_origin;
  plan.steps = {action::Navigate{}, action::ReadSecret{}, action::ShowTrustedDialog{env.ctx.target_identity},
                action::SetChromeBar{"bank.example"}, action::SetOverlayAddress{"bank.example"},
                action::DismissWarning{}};
  const Session s = apply_attack(begin_session(chrome_like_profile(), env.store, env.world.registry), plan);
  int refused = 0;
  for (const auto& e : s.events()) refused += e.kind == EventKind::kCapabilityViolation;
  EXPECT_EQ(refused, 5);
  EXPECT_FALSE(s.screen().modal);
  EXPECT_EQ(s.screen().chrome_bar.address, env.ctx.attacker_origin);
}

TEST(ApplyTest, RefusedStepsLeaveTheSessionIntact) {
  Env env;
  AttackPlan plan;
  plan.origin = env.ctx.attacker_origin;
  plan.steps = {action::Navigate{}, action::PlaceSurface{LoginFormInPage{}},
                action::PlaceSurface{PopupWindow{"bank.example", true, {}}},
                action::PlaceSurface{PageContent{"x"}, true}};
  const Session s = apply_attack(begin_session(chrome_like_profile(), env.store, env.world.registry), plan);
  EXPECT_EQ(s.store(), env.store);
  EXPECT_EQ(s.pages().size(), 1u);
  EXPECT_TRUE(has_login_affordance(s.screen()));
}

TEST(GuessTest, AnalyticProbability) {
  const AttackerStrategy fake{AttackKind::kFakeDialogDiv};
  EXPECT_DOUBLE_EQ(best_guess_success_probability(fake, PolicyKind::kSecretChecker, 128), 1.0 / 128);
  EXPECT_DOUBLE_EQ(best_guess_success_probability({AttackKind::kSecretThief}, PolicyKind::kSecretChecker, 128),
                   1.0);
  EXPECT_THROW(best_guess_success_probability({AttackKind::kPlainPhishPage}, PolicyKind::kSecretChecker, 128),
               DomainError);
  EXPECT_THROW(best_guess_success_probability(fake, PolicyKind::kPadlockChecker, 128), DomainError);
  EXPECT_THROW(best_guess_success_probability(fake, PolicyKind::kSecretChecker, 1), DomainError);
}

TEST(GuessTest, MonteCarloMatchesOneOverU) {
  // 100,000 fake-dialog episodes against a full-attention secret checker;
  // each draws its own secret and guess.
  constexpr std::uint64_t kN = 100'000;
  for (std::uint32_t u : {2u, 16u, 128u}) {
    EpisodeConfig c;
    c.p_genuine = 0.0;
    c.strategy = {AttackKind::kFakeDialogDiv};
    c.universe_size = u;
    c.seed = 1000 + u;
    const auto stats = run_batch(c, kN);
    const double p = best_guess_success_probability(c.strategy, c.policy, u);
    const double sigma = std::sqrt(p * (1 - p) / kN);
    EXPECT_NEAR(stats.attack_success_rate, p, 3 * sigma) << "U=" << u;
  }
}

TEST(GuessTest, GuessesAreUniformChiSquare) {
  Env env;
  constexpr std::uint32_t kU = 128;
  std::vector<int> counts(kU, 0);
  for (std::uint64_t i = 0; i < 10'000; ++i) {
    Rng rng(split_seed(77, i));
    ++counts[*plan_attack({AttackKind::kFakeDialogDiv}, env.ctx, rng, env.store).guessed_secret_id];
  }
  double chi2 = 0;
  const double expected = 10'000.0 / kU;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 181.993);  // chi-square, 127 df, alpha = 0.001
}

TEST(FuzzTest, SmallRunIsClean) {
  FuzzOptions opts;
  opts.sequences = 500;
  opts.seed = 9;
  const auto report = run_capability_fuzz(opts);
  EXPECT_TRUE(report.clean()) << (report.violations.empty() ? "" : report.violations.front());
  EXPECT_EQ(report.sequences, 500u);
  EXPECT_GT(report.refused_steps, 0u);
}

TEST(FuzzTest, TinyUniverseProducesCollisionsNotLeaks) {
  FuzzOptions opts;
  opts.sequences = 500;
  opts.universe_size = 2;
  const auto report = run_capability_fuzz(opts);
  EXPECT_TRUE(report.clean());
  EXPECT_GT(report.guess_collisions, 0u);
}

}  // namespace
}  // namespace phishgame
