#include <algorithm>

#include <gtest/gtest.h>

#include "phishgame/attacks.hpp"
#include "phishgame/game.hpp"
#include "phishgame/users.hpp"
#include "phishgame/world.hpp"

namespace phishgame {
namespace {

// Screens from every strategy plus the genuine dialog, seeded.
std::vector<ScreenState> sample_screens(std::uint64_t seed) {
  std::vector<ScreenState> out;
  for (const auto& strategy : default_strategies()) {
    for (const char* profile : {"chrome", "edge"}) {
      EpisodeConfig c;
      c.p_genuine = 0.0;
      c.strategy = strategy;
      c.profile = *profile_by_name(profile);
      c.seed = seed;
      c.compromised = strategy.kind == AttackKind::kSecretThief;
      out.push_back(run_episode(c).screen);
    }
  }
  AttackerStrategy crayon{AttackKind::kFullscreenCounterfeit, Fidelity::kCrayon};
  EpisodeConfig c;
  c.strategy = crayon;
  c.seed = seed;
  out.push_back(run_episode(c).screen);
  c.p_genuine = 1.0;
  out.push_back(run_episode(c).screen);
  return out;
}

bool is_subsequence(const std::vector<Signal>& small, const std::vector<Signal>& big) {
  std::size_t j = 0;
  for (const Signal& s : big) {
    if (j < small.size() && small[j] == s) ++j;
  }
  return j == small.size();
}

TEST(PerceiveTest, FullAttentionSeesEveryCandidate) {
  for (const auto& screen : sample_screens(1)) {
    Rng rng(3);
    EXPECT_EQ(perceive(screen, full_attention(), rng).signals, candidate_signals(screen));
  }
}

TEST(PerceiveTest, MoreAttentionNeverRemovesASignal) {
  // Property: for p <= q pointwise, with a shared seed, the signals noticed
  // under p are a subsequence of those noticed under q.
  Rng pick(77);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    for (const auto& screen : sample_screens(seed)) {
      AttentionProfile low;
      AttentionProfile high;
      for (std::size_t k = 0; k < kSignalKindCount; ++k) {
        const double a = pick.uniform01();
        const double b = pick.uniform01();
        low.p_notice[k] = std::min(a, b);
        high.p_notice[k] = std::max(a, b);
      }
      low.fidelity_penalty = 0.2;
      high.fidelity_penalty = 0.7;
      for (std::uint64_t draw = 0; draw < 5; ++draw) {
        Rng r1(draw);
        Rng r2(draw);
        const auto lo = perceive(screen, low, r1);
        const auto hi = perceive(screen, high, r2);
        ASSERT_TRUE(is_subsequence(lo.signals, hi.signals));
        ASSERT_EQ(lo.login_affordance, hi.login_affordance);
      }
    }
  }
}

TEST(PerceiveTest, ZeroAttentionSeesNothingButStillFindsTheLogin) {
  AttentionProfile none;
  for (const auto& screen : sample_screens(2)) {
    Rng rng(1);
    const auto s = perceive(screen, none, rng);
    EXPECT_TRUE(s.signals.empty());
    EXPECT_EQ(s.login_affordance, has_login_affordance(screen));
  }
}

TEST(AttentionTest, Presets) {
  const auto casual = casual_attention();
  EXPECT_DOUBLE_EQ(casual.notice(SignalKind::kFullscreenWarning), 0.3);
  EXPECT_DOUBLE_EQ(casual.notice(SignalKind::kDialogHasWindowIcon), 0.2);
  EXPECT_DOUBLE_EQ(casual.notice(SignalKind::kIdentityShown), 0.5);
  EXPECT_DOUBLE_EQ(casual.notice(SignalKind::kSecretShown), 1.0);
  EXPECT_TRUE(casual.valid());
  EXPECT_TRUE(attention_by_name("full"));
  EXPECT_FALSE(attention_by_name("sleepy"));
  AttentionProfile bad;
  bad.p_notice[0] = 1.5;
  EXPECT_FALSE(bad.valid());
}

TEST(SignalKindTest, NamesRoundTrip) {
  for (std::size_t k = 0; k < kSignalKindCount; ++k) {
    const auto kind = static_cast<SignalKind>(k);
    EXPECT_EQ(signal_kind_by_name(to_string(kind)), kind);
  }
  for (auto p : kAllPolicies) EXPECT_EQ(policy_kind_by_name(to_string(p)), p);
}

// --- decide ---------------------------------------------------------------

const IdentityCredentials kBob{"bank.example", "Bank of Examplia plc", "EX"};
const IdentityCredentials kMallory{"bank-examplia-login.example", "Mallory Holdings Ltd", "ZZ"};

UserPolicy policy(PolicyKind kind) {
  UserPolicy p;
  p.kind = kind;
  p.memory.expected_secret_id = 9;
  p.memory.known_identities = {kBob};
  p.memory.known_trents = {"Central Bank of Examplia"};
  return p;
}

Signal sig(SignalKind kind) { return Signal{kind}; }
Signal identity(const IdentityCredentials& id) {
  Signal s{SignalKind::kIdentityShown};
  s.identity = id;
  return s;
}
Signal trent(std::string text) {
  Signal s{SignalKind::kTrentNameShown};
  s.text = std::move(text);
  return s;
}
Signal secret(std::uint32_t id) {
  Signal s{SignalKind::kSecretShown};
  s.secret_id = id;
  return s;
}

SignalSet with_login(std::vector<Signal> signals) { return {std::move(signals), true}; }

TEST(DecideTest, NoLoginAffordanceMeansBackAway) {
  for (auto p : kAllPolicies) EXPECT_EQ(decide(policy(p), SignalSet{}), Decision::kBackAway);
}

TEST(DecideTest, GenuineDialogIsAcceptedByEveryPolicy) {
  const auto genuine = with_login({sig(SignalKind::kPadlockVisible), sig(SignalKind::kGreenBarVisible),
                                   identity(kBob), trent("Central Bank of Examplia"), identity(kBob),
                                   trent("Central Bank of Examplia"), secret(9)});
  for (auto p : kAllPolicies) EXPECT_EQ(decide(policy(p), genuine), Decision::kEnterCredentials);
}

TEST(DecideTest, SecretCheckerRules) {
  const auto base = std::vector<Signal>{identity(kBob), trent("Central Bank of Examplia")};
  auto with = [&](std::vector<Signal> extra) {
    auto all = base;
    all.insert(all.end(), extra.begin(), extra.end());
    return with_login(all);
  };
  const auto sc = policy(PolicyKind::kSecretChecker);
  EXPECT_EQ(decide(sc, with({secret(9)})), Decision::kEnterCredentials);
  EXPECT_EQ(decide(sc, with({secret(8)})), Decision::kBackAway);
  EXPECT_EQ(decide(sc, with({})), Decision::kBackAway);
  EXPECT_EQ(decide(sc, with({secret(9), sig(SignalKind::kLoginFieldsInWebpage)})), Decision::kBackAway);
  EXPECT_EQ(decide(sc, with({secret(9), sig(SignalKind::kOverlayAddressBar)})), Decision::kBackAway);
  EXPECT_EQ(decide(sc, with_login({identity(kMallory), trent("Central Bank of Examplia"), secret(9)})),
            Decision::kBackAway);
  EXPECT_EQ(decide(sc, with_login({identity(kBob), trent("Other Trent"), secret(9)})),
            Decision::kBackAway);
}

TEST(DecideTest, WarningSensitiveBacksAwayFromFullscreen) {
  const auto ws = policy(PolicyKind::kWarningSensitive);
  EXPECT_EQ(decide(ws, with_login({sig(SignalKind::kPadlockVisible)})), Decision::kEnterCredentials);
  EXPECT_EQ(decide(ws, with_login({sig(SignalKind::kPadlockVisible), sig(SignalKind::kFullscreenWarning)})),
            Decision::kBackAway);
  EXPECT_EQ(decide(ws, with_login({sig(SignalKind::kPadlockVisible), sig(SignalKind::kFullscreenActive)})),
            Decision::kBackAway);
}

TEST(DecideTest, CertInspectorNeedsAKnownIdentity) {
  const auto ci = policy(PolicyKind::kCertInspector);
  EXPECT_EQ(decide(ci, with_login({identity(kBob)})), Decision::kEnterCredentials);
  EXPECT_EQ(decide(ci, with_login({identity(kBob), identity(kMallory)})), Decision::kBackAway);
  EXPECT_EQ(decide(ci, with_login({sig(SignalKind::kPadlockVisible)})), Decision::kBackAway);
}

TEST(RevealTest, GenuineDialogRevealsNothingCounterfeitsRevealSomething) {
  World world = build_world(WorldSpec{}, 5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EpisodeConfig c;
    c.seed = seed;
    c.p_genuine = 1.0;
    const auto genuine = run_episode(c);
    UserMemory m;
    m.expected_secret_id = genuine.secret_id;
    m.known_identities = {world.spec.bob};
    m.known_trents = {world.spec.trent_display_name};
    EXPECT_TRUE(revealing_signals(genuine.screen, m).empty());

    for (const auto& s : default_strategies()) {
      if (s.kind == AttackKind::kSecretThief || s.kind == AttackKind::kCertBearingMallory) continue;
      c.p_genuine = 0.0;
      c.strategy = s;
      const auto t = run_episode(c);
      if (t.guessed_secret_id == t.secret_id) continue;
      EXPECT_FALSE(revealing_signals(t.screen, m).empty()) << strategy_name(s);
    }
  }
}

}  // namespace
}  // namespace phishgame
