#include <cmath>

#include <gtest/gtest.h>

#include "phishgame/errors.hpp"
#include "phishgame/secrets.hpp"
#include "phishgame/vmachine.hpp"
#include "phishgame/world.hpp"

namespace phishgame {
namespace {

constexpr const char* kMallory = "bank-examplia-login.example";

struct Env {
  World world = build_world(WorldSpec{}, 3);
  SecretStore store;
  Env() {
    Rng rng(4);
    store = provision_secret(rng, kDefaultUniverseSize);
  }
  Session start(BrowserProfile profile = chrome_like_profile()) const {
    return begin_session(std::move(profile), store, world.registry);
  }
  Session mallory_page(BrowserProfile profile = chrome_like_profile()) const {
    return navigate(start(std::move(profile)), kMallory, std::nullopt);
  }
};

// --- secrets ---------------------------------------------------------------

TEST(SecretsTest, UniverseBelowTwoIsAConfigError) {
  Rng rng(1);
  EXPECT_THROW(provision_secret(rng, 1), ConfigError);
  EXPECT_THROW(provision_secret(rng, 0), ConfigError);
  EXPECT_NO_THROW(provision_secret(rng, 2));
}

TEST(SecretsTest, OnlyTheChromeProcessCanRead) {
  Rng rng(1);
  const SecretStore store = provision_secret(rng, 16);
  EXPECT_LT(store.secret.secret_id, 16u);
  const auto chrome = read_secret(store, Capability::chrome_process());
  ASSERT_TRUE(std::holds_alternative<SharedSecret>(chrome));
  EXPECT_EQ(std::get<SharedSecret>(chrome), store.secret);
  EXPECT_TRUE(std::holds_alternative<CapabilityDenied>(
      read_secret(store, Capability::sandboxed_page("bank.example"))));
}

TEST(SecretsTest, CompromiseIsSticky) {
  Rng rng(1);
  SecretStore s = mark_compromised(provision_secret(rng, 16));
  EXPECT_TRUE(s.compromised);
  EXPECT_TRUE(mark_compromised(s).compromised);
}

TEST(SecretsTest, ProvisionedIdsAreUniformChiSquare) {
  // 10,000 draws over U = 128; critical value of chi-square with 127
  // degrees of freedom at alpha = 0.001 is 181.993.
  constexpr std::uint32_t kU = 128;
  constexpr int kDraws = 10'000;
  std::vector<int> counts(kU, 0);
  for (int i = 0; i < kDraws; ++i) {
    Rng rng(split_seed(2024, static_cast<std::uint64_t>(i)));
    ++counts[provision_secret(rng, kU).secret.secret_id];
  }
  const double expected = static_cast<double>(kDraws) / kU;
  double chi2 = 0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 181.993);
}

// --- navigation and the dialog --------------------------------------------

TEST(NavigateTest, VerifiedCertificateRaisesDialogWithoutASandbox) {
  Env env;
  Session s = navigate(env.start(), "bank.example", env.world.bob_certificate);
  ASSERT_TRUE(s.screen().modal.has_value());
  EXPECT_EQ(s.phase(), Phase::kDialogShown);
  EXPECT_EQ(s.screen().modal->identity(), env.world.spec.bob);
  EXPECT_EQ(s.screen().modal->trent_display_name(), "Central Bank of Examplia");
  EXPECT_EQ(s.screen().modal->secret(), env.store.secret);
  EXPECT_TRUE(s.pages().empty());
  EXPECT_EQ(s.process_count(), 1u);
  EXPECT_TRUE(s.screen().greyed);
  EXPECT_TRUE(s.screen().chrome_bar.padlock);
}

TEST(NavigateTest, LoginCreatesTheSandboxAfterCredentials) {
  Env env;
  Session s = navigate(env.start(), "bank.example", env.world.bob_certificate);
  s = submit_login(std::move(s), EnterCredentials{{"alice", "pw"}});
  EXPECT_EQ(s.phase(), Phase::kLoggedIn);
  ASSERT_EQ(s.pages().size(), 1u);
  EXPECT_EQ(s.process_count(), 2u);
  Tick entered = 0;
  for (const auto& e : s.events()) {
    if (e.kind == EventKind::kCredentialsEntered) entered = e.tick;
  }
  EXPECT_GT(s.pages()[0].created_at, entered);
  EXPECT_FALSE(s.screen().modal.has_value());
}

TEST(NavigateTest, BackAwayCreatesNoSandbox) {
  Env env;
  Session s = navigate(env.start(), "bank.example", env.world.bob_certificate);
  s = submit_login(std::move(s), BackAway{});
  EXPECT_EQ(s.phase(), Phase::kBackedAway);
  EXPECT_TRUE(s.pages().empty());
}

TEST(NavigateTest, RejectedCertificatesGiveAnInterstitialAndNoDialog) {
  Env env;
  auto tampered = env.world.bob_certificate;
  tampered.payload.subject.organization = "Evil";
  Session s = navigate(env.start(), "bank.example", tampered);
  EXPECT_FALSE(s.screen().modal.has_value());
  ASSERT_EQ(s.screen().canvas.size(), 1u);
  EXPECT_EQ(std::get<VerificationInterstitial>(s.screen().canvas[0].content).reason, "tag_mismatch");
  EXPECT_TRUE(s.pages().empty());

  // Bob's genuine certificate replayed from Mallory's origin.
  s = navigate(env.start(), kMallory, env.world.bob_certificate);
  EXPECT_FALSE(s.screen().modal.has_value());
  EXPECT_EQ(std::get<VerificationInterstitial>(s.screen().canvas[0].content).reason, "name_mismatch");
}

TEST(NavigateTest, CannotNavigateAwayFromAnOpenDialog) {
  Env env;
  Session s = navigate(env.start(), "bank.example", env.world.bob_certificate);
  EXPECT_THROW(navigate(s, kMallory, std::nullopt), ProtocolError);
}

TEST(NavigateTest, NoLoginAffordanceMeansSubmitIsAProtocolError) {
  Env env;
  EXPECT_THROW(submit_login(env.mallory_page(), BackAway{}), ProtocolError);
}

// --- sandboxed content ----------------------------------------------------

TEST(SurfaceTest, PagesCannotDrawPopupsOrInterstitialsDirectly) {
  Env env;
  Session s = env.mallory_page();
  EXPECT_THROW(place_surface(s, kMallory, PopupWindow{"bank.example", true, {}}), CapabilityViolation);
  EXPECT_THROW(place_surface(s, kMallory, VerificationInterstitial{"ok"}), CapabilityViolation);
  EXPECT_THROW(place_surface(s, "bank.example", PageContent{"x"}), ProtocolError);
}

TEST(SurfaceTest, NestedSurfacesAreRestampedWithThePageCapability) {
  Env env;
  CounterfeitDesktop desktop;
  desktop.embedded.push_back({Capability::chrome_process(), FakeDialogImage{env.world.spec.bob, "x", 1}});
  Session s = place_surface(env.mallory_page(), kMallory, desktop);
  for_each_surface(s.screen().canvas, [](const Surface& surface) {
    EXPECT_FALSE(surface.origin_cap.is_chrome());
  });
}

TEST(SurfaceTest, PopupAddressBarIsForcedToTheOpener) {
  Env env;
  Session s = open_popup(env.mallory_page(), kMallory, true);
  const auto& popup = std::get<PopupWindow>(s.screen().canvas.back().content);
  EXPECT_EQ(popup.address_bar, kMallory);
  EXPECT_EQ(s.screen().chrome_bar.overlay_address_bar, kMallory);
}

TEST(SurfaceTest, WindowIconCountOracle) {
  // One for the browser, one per popup, one for a chrome-owned dialog; fake
  // dialogs drawn in content add none.
  Env env;
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    Session s = env.mallory_page();
    std::uint32_t popups = 0;
    const auto steps = rng.uniform(8);
    for (std::uint64_t i = 0; i < steps; ++i) {
      if (rng.bernoulli(0.5)) {
        s = open_popup(std::move(s), kMallory, true);
        ++popups;
      } else {
        s = place_surface(std::move(s), kMallory, FakeDialogImage{env.world.spec.bob, "t", 3});
      }
    }
    ASSERT_EQ(s.screen().os_chrome.window_icons, 1 + popups);
  }
  Session genuine = navigate(env.start(), "bank.example", env.world.bob_certificate);
  EXPECT_EQ(genuine.screen().os_chrome.window_icons, 2u);
}

TEST(SurfaceTest, TransitionsArePure) {
  Env env;
  const Session before = env.mallory_page();
  const Session copy = before;
  const Session after = place_surface(before, kMallory, LoginFormInPage{});
  EXPECT_EQ(before, copy);
  EXPECT_NE(before, after);
  EXPECT_EQ(place_surface(before, kMallory, LoginFormInPage{}), after);
}

// --- fullscreen warnings --------------------------------------------------

struct WarningRow {
  const char* profile;
  bool origin_has_history;
  int entry;               // 1-based entry within the episode
  bool warned;
  std::optional<WarningStyle> style;
};

TEST(FullscreenTest, WarningTable) {
  const WarningRow rows[] = {
      {"chrome", false, 1, true, WarningStyle::kTransient},
      {"chrome", false, 2, true, WarningStyle::kTransient},
      {"chrome", true, 1, true, WarningStyle::kTransient},
      {"firefox", false, 1, true, WarningStyle::kTransient},
      {"firefox", false, 3, true, WarningStyle::kTransient},
      {"edge", false, 1, true, WarningStyle::kPersistent},
      {"edge", false, 2, false, std::nullopt},
      {"edge", true, 1, false, std::nullopt},
  };
  Env env;
  for (const auto& row : rows) {
    SCOPED_TRACE(std::string(row.profile) + " entry " + std::to_string(row.entry));
    Session s = env.mallory_page(*profile_by_name(row.profile));
    if (row.origin_has_history) s = s.with_fullscreen_history(kMallory);
    for (int i = 1; i < row.entry; ++i) {
      s = exit_fullscreen(request_fullscreen(std::move(s), kMallory, FullscreenTrigger::kUserGesture));
    }
    s = request_fullscreen(std::move(s), kMallory, FullscreenTrigger::kUserGesture);
    EXPECT_TRUE(s.screen().fullscreen);
    EXPECT_EQ(s.screen().warning.has_value(), row.warned);
    if (row.style) {
      ASSERT_TRUE(s.screen().warning);
      EXPECT_EQ(s.screen().warning->style, *row.style);
    }
  }
}

TEST(FullscreenTest, TransientExpiresAfterConfiguredTicksPersistentStays) {
  Env env;
  for (std::uint32_t d : {1u, 3u, 5u}) {
    Session s = env.mallory_page(chrome_like_profile(d));
    s = request_fullscreen(std::move(s), kMallory, FullscreenTrigger::kUserGesture);
    for (std::uint32_t t = 0; t < d; ++t) {
      ASSERT_TRUE(s.screen().warning) << "d=" << d << " t=" << t;
      s = advance_tick(std::move(s));
    }
    EXPECT_FALSE(s.screen().warning) << "d=" << d;
  }
  Session s = env.mallory_page(edge_like_profile());
  s = request_fullscreen(std::move(s), kMallory, FullscreenTrigger::kUserGesture);
  for (int t = 0; t < 1000; ++t) s = advance_tick(std::move(s));
  ASSERT_TRUE(s.screen().warning);
  s = dismiss_warning(std::move(s));
  EXPECT_FALSE(s.screen().warning);
}

TEST(FullscreenTest, PageLoadTriggerIsRefused) {
  Env env;
  Session s = request_fullscreen(env.mallory_page(), kMallory, FullscreenTrigger::kPageLoad);
  EXPECT_FALSE(s.screen().fullscreen);
  EXPECT_FALSE(s.screen().warning);
}

TEST(FullscreenTest, FullscreenHidesTheTaskbar) {
  Env env;
  Session s = request_fullscreen(env.mallory_page(), kMallory, FullscreenTrigger::kUserGesture);
  EXPECT_FALSE(s.screen().os_chrome.taskbar_visible);
  s = exit_fullscreen(std::move(s));
  EXPECT_TRUE(s.screen().os_chrome.taskbar_visible);
  EXPECT_FALSE(s.screen().warning);
}

TEST(ProfileTest, Lookup) {
  EXPECT_TRUE(profile_by_name("chrome"));
  EXPECT_TRUE(profile_by_name("firefox"));
  EXPECT_TRUE(std::holds_alternative<FirstTimePersistent>(profile_by_name("edge")->fullscreen_warning));
  EXPECT_FALSE(profile_by_name("safari"));
}

}  // namespace
}  // namespace phishgame
