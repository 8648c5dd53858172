#include "phishgame/attacks.hpp"

#include <sstream>

#include "phishgame/errors.hpp"
#include "phishgame/world.hpp"

namespace phishgame {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

FakeDialogImage fake_dialog(const AttackContext& ctx, std::uint32_t shown_id) {
  return FakeDialogImage{ctx.target_identity, ctx.target_trent_display_name, shown_id};
}

PageContent lookalike(const AttackContext& ctx) {
  return PageContent{"site:" + ctx.target_origin};
}

std::uint32_t guess(Rng& rng, std::uint32_t universe_size) {
  return static_cast<std::uint32_t>(rng.uniform(universe_size));
}

}  // namespace

std::string strategy_name(const AttackerStrategy& strategy) {
  switch (strategy.kind) {
    case AttackKind::kPlainPhishPage:
      return "plain_phish_page";
    case AttackKind::kFakeDialogDiv:
      return "fake_dialog_div";
    case AttackKind::kUndecoratedPopup:
      return "undecorated_popup";
    case AttackKind::kFullscreenCounterfeit:
      return strategy.fidelity == Fidelity::kCrayon ? "fullscreen_counterfeit_crayon"
                                                    : "fullscreen_counterfeit";
    case AttackKind::kCookieAsPassword:
      return "cookie_as_password";
    case AttackKind::kCertBearingMallory:
      return "cert_bearing_mallory";
    case AttackKind::kSecretThief:
      return "secret_thief";
  }
  return "unknown";
}

std::optional<AttackerStrategy> strategy_by_name(std::string_view name) {
  if (name == "fullscreen_counterfeit_realistic") {
    return AttackerStrategy{AttackKind::kFullscreenCounterfeit, Fidelity::kRealistic};
  }
  for (auto kind : {AttackKind::kPlainPhishPage, AttackKind::kFakeDialogDiv,
                    AttackKind::kUndecoratedPopup, AttackKind::kFullscreenCounterfeit,
                    AttackKind::kCookieAsPassword, AttackKind::kCertBearingMallory,
                    AttackKind::kSecretThief}) {
    for (auto fidelity : {Fidelity::kRealistic, Fidelity::kCrayon}) {
      const AttackerStrategy s{kind, fidelity};
      if (kind != AttackKind::kFullscreenCounterfeit && fidelity == Fidelity::kCrayon) continue;
      if (strategy_name(s) == name) return s;
    }
  }
  return std::nullopt;
}

std::vector<AttackerStrategy> default_strategies() {
  return {{AttackKind::kPlainPhishPage},
          {AttackKind::kFakeDialogDiv},
          {AttackKind::kUndecoratedPopup},
          {AttackKind::kFullscreenCounterfeit, Fidelity::kRealistic},
          {AttackKind::kCookieAsPassword},
          {AttackKind::kCertBearingMallory},
          {AttackKind::kSecretThief}};
}

std::string_view action_name(const AttackAction& step) {
  return std::visit(
      Overloaded{
          [](const action::Navigate&) { return std::string_view("navigate"); },
          [](const action::OpenPopup&) { return std::string_view("open_popup"); },
          [](const action::RequestFullscreen&) {
            return std::string_view("request_fullscreen");
          },
          [](const action::ExitFullscreen&) { return std::string_view("exit_fullscreen"); },
          [](const action::PlaceSurface&) { return std::string_view("place_surface"); },
          [](const action::AdvanceTick&) { return std::string_view("advance_tick"); },
          [](const action::ReadSecret&) { return std::string_view("read_secret"); },
          [](const action::ShowTrustedDialog&) {
            return std::string_view("show_trusted_dialog");
          },
          [](const action::SetChromeBar&) { return std::string_view("set_chrome_bar"); },
          [](const action::SetOverlayAddress&) {
            return std::string_view("set_overlay_address");
          },
          [](const action::DismissWarning&) { return std::string_view("dismiss_warning"); },
      },
      step);
}

std::uint32_t steal_secret(const SecretStore& store) {
  if (!store.compromised) {
    throw IllegalStrategy("secret_thief requires a compromised secret store");
  }
  return store.secret.secret_id;
}

AttackPlan plan_attack(const AttackerStrategy& strategy, const AttackContext& ctx, Rng& rng,
                       const SecretStore& store) {
  if (ctx.universe_size < 2) throw ConfigError("universe_size must be at least 2");
  using namespace action;
  AttackPlan plan;
  plan.strategy = strategy;
  plan.origin = ctx.attacker_origin;
  auto& steps = plan.steps;

  switch (strategy.kind) {
    case AttackKind::kPlainPhishPage:
      steps = {Navigate{}, PlaceSurface{lookalike(ctx)}, PlaceSurface{LoginFormInPage{}}};
      break;

    case AttackKind::kFakeDialogDiv:
      plan.guessed_secret_id = guess(rng, ctx.universe_size);
      steps = {Navigate{}, PlaceSurface{lookalike(ctx)},
               PlaceSurface{fake_dialog(ctx, *plan.guessed_secret_id)}};
      break;

    case AttackKind::kUndecoratedPopup:
      plan.guessed_secret_id = guess(rng, ctx.universe_size);
      steps = {Navigate{}, PlaceSurface{lookalike(ctx)}, OpenPopup{true},
               PlaceSurface{fake_dialog(ctx, *plan.guessed_secret_id), true}};
      break;

    case AttackKind::kFullscreenCounterfeit: {
      plan.guessed_secret_id = guess(rng, ctx.universe_size);
      CounterfeitDesktop desktop;
      desktop.fidelity = strategy.fidelity;
      desktop.chrome = CounterfeitChrome{ctx.target_origin, true, true, ctx.target_identity,
                                         ctx.target_trent_display_name};
      desktop.greyed = true;
      desktop.embedded = {
          Surface{Capability::sandboxed_page(ctx.attacker_origin), lookalike(ctx)},
          Surface{Capability::sandboxed_page(ctx.attacker_origin),
                  fake_dialog(ctx, *plan.guessed_secret_id)}};
      // requestFullscreen() only works from a user gesture such as a key
      // press, so the plan starts with one.
      steps = {Navigate{}, PlaceSurface{lookalike(ctx)},
               RequestFullscreen{FullscreenTrigger::kUserGesture},
               PlaceSurface{std::move(desktop)}};
      break;
    }

    case AttackKind::kCookieAsPassword:
      // The enrollment page that would set the cookie is itself an ordinary
      // page asking for credentials; after it the attack is a plain phish.
      steps = {Navigate{}, PlaceSurface{PageContent{"site:" + ctx.target_origin + "/enroll-device"}},
               PlaceSurface{LoginFormInPage{}}};
      break;

    case AttackKind::kCertBearingMallory:
      if (!ctx.attacker_certificate) {
        throw IllegalStrategy("cert_bearing_mallory needs the attacker's certificate");
      }
      steps = {Navigate{ctx.attacker_certificate}};
      break;

    case AttackKind::kSecretThief:
      plan.guessed_secret_id = steal_secret(store);
      steps = {Navigate{}, PlaceSurface{lookalike(ctx)},
               PlaceSurface{fake_dialog(ctx, *plan.guessed_secret_id)}};
      break;
  }
  return plan;
}

Session apply_attack(Session session, const AttackPlan& plan) {
  const std::string& origin = plan.origin;
  for (const AttackAction& step : plan.steps) {
    const std::string name(action_name(step));
    const auto violation = [&](std::string detail) {
      session = record_event(std::move(session), EventKind::kCapabilityViolation, origin,
                             name + ": " + detail);
    };
    // Steps get a copy: a refused transition must leave the session as it was.
    try {
      std::visit(
          Overloaded{
              [&](const action::Navigate& a) {
                session = navigate(Session(session), origin, a.certificate);
              },
              [&](const action::OpenPopup& a) {
                session = open_popup(Session(session), origin, a.undecorated_requested);
              },
              [&](const action::RequestFullscreen& a) {
                const bool was = session.screen().fullscreen;
                session = request_fullscreen(Session(session), origin, a.trigger);
                if (a.trigger == FullscreenTrigger::kPageLoad && !was) {
                  session = record_event(std::move(session), EventKind::kFullscreenDenied,
                                         origin, "not a user gesture");
                }
              },
              [&](const action::ExitFullscreen&) {
                session = exit_fullscreen(Session(session));
              },
              [&](const action::PlaceSurface& a) {
                session = place_surface(Session(session), origin, a.content, a.into_popup);
              },
              [&](const action::AdvanceTick&) { session = advance_tick(Session(session)); },
              [&](const action::ReadSecret&) {
                const auto result =
                    read_secret(session.store(), Capability::sandboxed_page(origin));
                if (std::holds_alternative<CapabilityDenied>(result)) {
                  violation("hard disk access denied");
                } else {
                  throw std::logic_error("sandboxed read_secret succeeded");
                }
              },
              [&](const action::ShowTrustedDialog&) { violation("chrome process only"); },
              [&](const action::SetChromeBar&) { violation("chrome process only"); },
              [&](const action::SetOverlayAddress&) { violation("chrome process only"); },
              [&](const action::DismissWarning&) { violation("user action only"); },
          },
          step);
    } catch (const CapabilityViolation& e) {
      violation(e.what());
    } catch (const ProtocolError& e) {
      session = record_event(std::move(session), EventKind::kStepRejected, origin,
                             name + ": " + e.what());
    }
  }
  return session;
}

double best_guess_success_probability(const AttackerStrategy& strategy, PolicyKind policy,
                                      std::uint32_t universe_size) {
  if (policy != PolicyKind::kSecretChecker) {
    throw DomainError("only defined for a policy that checks the shared secret");
  }
  if (universe_size < 2) throw DomainError("universe_size must be at least 2");
  switch (strategy.kind) {
    case AttackKind::kSecretThief:
      return 1.0;
    case AttackKind::kFakeDialogDiv:
    case AttackKind::kUndecoratedPopup:
    case AttackKind::kFullscreenCounterfeit:
      return 1.0 / static_cast<double>(universe_size);
    default:
      throw DomainError(strategy_name(strategy) + " shows no guessed secret");
  }
}

// ---------------------------------------------------------------------------
// Fuzzing

namespace {

Certificate forged_certificate(Rng& rng, const AttackContext& ctx, const Certificate& victim) {
  Certificate cert = victim;
  switch (rng.uniform(6)) {
    case 0:  // replay the victim's certificate from the attacker's origin
      break;
    case 1:  // claim the attacker's own origin on the victim's tag
      cert.payload.subject.subject_name = ctx.attacker_origin;
      break;
    case 2:  // random tag
      for (auto& b : cert.tag) b = static_cast<std::uint8_t>(rng.uniform(256));
      cert.payload.subject = IdentityCredentials{ctx.attacker_origin, "Mallory", "ZZ"};
      break;
    case 3: {  // flip one byte of the tag
      cert.payload.subject.subject_name = ctx.attacker_origin;
      cert.tag[rng.uniform(kTagSize)] ^= static_cast<std::uint8_t>(1 + rng.uniform(255));
      break;
    }
    case 4: {  // properly signed by a rogue authority nobody registered
      Rng rogue_rng(rng.next_u64());
      TrentAuthority rogue("rogue-" + std::to_string(rng.uniform(4)), rogue_rng);
      cert = rogue.issue(IdentityCredentials{ctx.attacker_origin, ctx.target_identity.organization,
                                             ctx.target_identity.jurisdiction},
                         {0, 1'000'000}, true);
      break;
    }
    default:  // stretch the validity window
      cert.payload.subject.subject_name = ctx.attacker_origin;
      cert.payload.not_after += 1 + rng.uniform(1000);
      break;
  }
  return cert;
}

SurfaceContent random_content(Rng& rng, const AttackContext& ctx, int depth) {
  const auto id = static_cast<std::uint32_t>(rng.uniform(ctx.universe_size));
  switch (rng.uniform(depth > 0 ? 6 : 8)) {
    case 0:
      return PageContent{"page " + std::to_string(rng.uniform(100))};
    case 1:
      return LoginFormInPage{};
    case 2:
      return FakeDialogImage{ctx.target_identity, ctx.target_trent_display_name, id};
    case 3:
      return VisitedLinkStyling{static_cast<std::uint32_t>(rng.uniform(50))};
    case 4:  // a page drawing an address bar of its choosing
      return PopupWindow{ctx.target_origin, true, {}};
    case 5:
      return VerificationInterstitial{"forged"};
    default: {
      CounterfeitDesktop desktop;
      desktop.fidelity = rng.bernoulli(0.5) ? Fidelity::kRealistic : Fidelity::kCrayon;
      desktop.chrome = CounterfeitChrome{ctx.target_origin, rng.bernoulli(0.8),
                                         rng.bernoulli(0.8), ctx.target_identity,
                                         ctx.target_trent_display_name};
      desktop.greyed = rng.bernoulli(0.5);
      const auto nested = rng.uniform(3);
      for (std::uint64_t i = 0; i < nested; ++i) {
        // Embedded surfaces claim the chrome capability; placement must
        // re-stamp them.
        desktop.embedded.push_back(
            Surface{Capability::chrome_process(), random_content(rng, ctx, depth + 1)});
      }
      return desktop;
    }
  }
}

void check_screen(const Session& s, const AttackContext& ctx, FuzzReport& report,
                  const std::string& where) {
  const auto note = [&](std::string what) {
    if (report.violations.size() < 20) report.violations.push_back(where + ": " + what);
  };
  const ScreenState& screen = s.screen();
  if (screen.modal) {
    ++report.trusted_dialogs;
    note("trusted dialog on screen");
  }
  std::optional<std::string> last_popup;
  for (const Surface& surface : screen.canvas) {
    if (const auto* popup = std::get_if<PopupWindow>(&surface.content)) {
      last_popup = popup->address_bar;
      if (popup->address_bar != surface.origin_cap.origin() ||
          popup->address_bar != ctx.attacker_origin) {
        ++report.overlay_mismatches;
        note("popup address bar " + popup->address_bar);
      }
    }
  }
  if (screen.chrome_bar.overlay_address_bar != last_popup) {
    ++report.overlay_mismatches;
    note("overlay address bar out of sync");
  }
  for_each_surface(screen.canvas, [&](const Surface& surface) {
    if (surface.origin_cap.is_chrome() &&
        !std::holds_alternative<VerificationInterstitial>(surface.content)) {
      ++report.overlay_mismatches;
      note("chrome-capability surface from page content");
    }
  });
  for (const SandboxedPage& page : s.pages()) {
    if (page.origin != ctx.attacker_origin) {
      ++report.accounting_errors;
      note("page for foreign origin " + page.origin);
    }
  }
  if (s.process_count() != s.pages().size() + 1 || s.pages().size() > 1) {
    ++report.accounting_errors;
    note("process accounting");
  }
}

std::vector<std::uint32_t> shown_ids(const ScreenState& screen) {
  std::vector<std::uint32_t> ids;
  for_each_surface(screen.canvas, [&](const Surface& surface) {
    if (const auto* fake = std::get_if<FakeDialogImage>(&surface.content)) {
      ids.push_back(fake->shown_secret_id);
    }
  });
  return ids;
}

}  // namespace

AttackAction random_attack_action(Rng& rng, const AttackContext& ctx,
                                  const Certificate& victim) {
  using namespace action;
  switch (rng.uniform(12)) {
    case 0:
      return Navigate{};
    case 1:
      return Navigate{forged_certificate(rng, ctx, victim)};
    case 2:
      return OpenPopup{rng.bernoulli(0.5)};
    case 3:
      return RequestFullscreen{rng.bernoulli(0.7) ? FullscreenTrigger::kUserGesture
                                                  : FullscreenTrigger::kPageLoad};
    case 4:
      return ExitFullscreen{};
    case 5:
    case 6:
      return PlaceSurface{random_content(rng, ctx, 0), rng.bernoulli(0.3)};
    case 7:
      return AdvanceTick{};
    case 8:
      return ReadSecret{};
    case 9:
      return ShowTrustedDialog{ctx.target_identity};
    case 10:
      return rng.bernoulli(0.5) ? AttackAction{SetChromeBar{ctx.target_origin, true, true}}
                                : AttackAction{SetOverlayAddress{ctx.target_origin}};
    default:
      return DismissWarning{};
  }
}

FuzzReport run_capability_fuzz(const FuzzOptions& options) {
  FuzzReport report;
  const World world = build_world(WorldSpec{}, derive_seed(options.seed, "fuzz-world"));
  AttackContext ctx;
  ctx.target_identity = world.spec.bob;
  ctx.target_origin = world.bob_origin();
  ctx.target_trent_display_name = world.spec.trent_display_name;
  ctx.attacker_origin = world.mallory_origin();
  ctx.universe_size = options.universe_size;

  const std::array<BrowserProfile, 3> profiles = {chrome_like_profile(), firefox_like_profile(),
                                                  edge_like_profile()};

  for (std::uint64_t seq = 0; seq < options.sequences; ++seq) {
    Rng rng(split_seed(options.seed, seq));
    SecretStore store_a = provision_secret(rng, options.universe_size);
    SecretStore store_b = store_a;
    store_b.secret.secret_id = static_cast<std::uint32_t>(
        (store_a.secret.secret_id + 1 + rng.uniform(options.universe_size - 1)) %
        options.universe_size);
    store_b.secret.label = "image-" + std::to_string(store_b.secret.secret_id);

    AttackPlan plan;
    plan.origin = ctx.attacker_origin;
    if (rng.bernoulli(0.6)) plan.steps.push_back(action::Navigate{});
    const auto length = 1 + rng.uniform(options.max_steps);
    for (std::uint64_t i = 0; i < length; ++i) {
      plan.steps.push_back(random_attack_action(rng, ctx, world.bob_certificate));
    }

    const BrowserProfile& profile = profiles[seq % profiles.size()];
    Session a = begin_session(profile, store_a, world.registry);
    Session b = begin_session(profile, store_b, world.registry);
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
      AttackPlan one{plan.strategy, plan.origin, {plan.steps[i]}, std::nullopt};
      const auto before = a.events().size();
      a = apply_attack(std::move(a), one);
      b = apply_attack(std::move(b), one);
      ++report.steps;
      for (auto e = before; e < a.events().size(); ++e) {
        const auto kind = a.events()[e].kind;
        if (kind == EventKind::kCapabilityViolation || kind == EventKind::kStepRejected) {
          ++report.refused_steps;
        }
      }

      std::ostringstream where;
      where << "sequence " << seq << " step " << i << " (" << action_name(plan.steps[i]) << ")";
      check_screen(a, ctx, report, where.str());

      // Non-interference: what the page drew cannot depend on the secret.
      if (!(a.screen() == b.screen())) {
        ++report.secret_leaks;
        if (report.violations.size() < 20) {
          report.violations.push_back(where.str() + ": screen depends on the secret");
        }
      }
      const auto ids_a = shown_ids(a.screen());
      const auto ids_b = shown_ids(b.screen());
      for (std::size_t k = 0; k < ids_a.size() && k < ids_b.size(); ++k) {
        const bool hit_a = ids_a[k] == store_a.secret.secret_id;
        const bool hit_b = ids_b[k] == store_b.secret.secret_id;
        if (hit_a && hit_b) {
          ++report.secret_leaks;
          if (report.violations.size() < 20) {
            report.violations.push_back(where.str() + ": true secret drawn by page");
          }
        } else if (hit_a) {
          ++report.guess_collisions;
        }
      }
    }
    if (!(a.store() == store_a) || !(b.store() == store_b)) ++report.store_mutations;
    ++report.sequences;
  }
  return report;
}

}  // namespace phishgame
