#include "phishgame/vmachine.hpp"

#include <algorithm>

#include "phishgame/errors.hpp"

namespace phishgame {

bool operator==(const CounterfeitDesktop& a, const CounterfeitDesktop& b) {
  return a.fidelity == b.fidelity && a.chrome == b.chrome && a.greyed == b.greyed &&
         a.embedded == b.embedded;
}

bool operator==(const PopupWindow& a, const PopupWindow& b) {
  return a.address_bar == b.address_bar &&
         a.undecorated_requested == b.undecorated_requested && a.embedded == b.embedded;
}

BrowserProfile chrome_like_profile(std::uint32_t warning_ticks) {
  return {"chrome", EveryTimeTransient{std::max<std::uint32_t>(warning_ticks, 1)}};
}

BrowserProfile firefox_like_profile(std::uint32_t warning_ticks) {
  return {"firefox", EveryTimeTransient{std::max<std::uint32_t>(warning_ticks, 1)}};
}

BrowserProfile edge_like_profile() { return {"edge", FirstTimePersistent{}}; }

std::optional<BrowserProfile> profile_by_name(std::string_view name) {
  if (name == "chrome") return chrome_like_profile();
  if (name == "firefox") return firefox_like_profile();
  if (name == "edge") return edge_like_profile();
  return std::nullopt;
}

std::string_view to_string(Fidelity fidelity) {
  return fidelity == Fidelity::kCrayon ? "crayon" : "realistic";
}

std::string_view to_string(WarningStyle style) {
  return style == WarningStyle::kTransient ? "transient" : "persistent";
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::kNavigating:
      return "navigating";
    case Phase::kDialogShown:
      return "dialog_shown";
    case Phase::kBrowsing:
      return "browsing";
    case Phase::kLoggedIn:
      return "logged_in";
    case Phase::kBackedAway:
      return "backed_away";
  }
  return "unknown";
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kNavigated:
      return "navigated";
    case EventKind::kVerificationRejected:
      return "verification_rejected";
    case EventKind::kDialogShown:
      return "dialog_shown";
    case EventKind::kPageCreated:
      return "page_created";
    case EventKind::kPageClosed:
      return "page_closed";
    case EventKind::kSurfacePlaced:
      return "surface_placed";
    case EventKind::kPopupOpened:
      return "popup_opened";
    case EventKind::kFullscreenEntered:
      return "fullscreen_entered";
    case EventKind::kFullscreenDenied:
      return "fullscreen_denied";
    case EventKind::kFullscreenExited:
      return "fullscreen_exited";
    case EventKind::kWarningShown:
      return "warning_shown";
    case EventKind::kWarningExpired:
      return "warning_expired";
    case EventKind::kWarningDismissed:
      return "warning_dismissed";
    case EventKind::kCredentialsEntered:
      return "credentials_entered";
    case EventKind::kCredentialsCaptured:
      return "credentials_captured";
    case EventKind::kBackedAway:
      return "backed_away";
    case EventKind::kCapabilityViolation:
      return "capability_violation";
    case EventKind::kStepRejected:
      return "step_rejected";
  }
  return "unknown";
}

namespace {

std::string_view content_name(const SurfaceContent& content) {
  struct {
    std::string_view operator()(const PageContent&) const { return "page_content"; }
    std::string_view operator()(const LoginFormInPage&) const { return "login_form"; }
    std::string_view operator()(const FakeDialogImage&) const { return "fake_dialog_image"; }
    std::string_view operator()(const CounterfeitDesktop&) const {
      return "counterfeit_desktop";
    }
    std::string_view operator()(const VisitedLinkStyling&) const {
      return "visited_link_styling";
    }
    std::string_view operator()(const PopupWindow&) const { return "popup_window"; }
    std::string_view operator()(const VerificationInterstitial&) const {
      return "verification_interstitial";
    }
  } visitor;
  return std::visit(visitor, content);
}

// Popups and interstitials are drawn by the browser; pages may only ask for
// a popup through open_popup(). Also re-stamps every nested surface with the
// placing page's capability so content cannot claim another origin.
void adopt_sandboxed_content(SurfaceContent& content, const Capability& cap) {
  if (std::holds_alternative<PopupWindow>(content) ||
      std::holds_alternative<VerificationInterstitial>(content)) {
    throw CapabilityViolation("sandboxed page cannot draw " +
                              std::string(content_name(content)));
  }
  if (auto* desktop = std::get_if<CounterfeitDesktop>(&content)) {
    for (Surface& nested : desktop->embedded) {
      nested.origin_cap = cap;
      adopt_sandboxed_content(nested.content, cap);
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------

TrustedDialog ChromeProcess::render_trusted_dialog(const Certificate& cert,
                                                   const SecretStore& store,
                                                   const TrentRegistry& registry, Tick now,
                                                   std::string origin) const {
  if (!verify_certificate(cert, registry, now).verified()) {
    throw ProtocolError("trusted dialog requires a verified certificate");
  }
  auto secret = std::get<SharedSecret>(read_secret(store, capability()));
  auto display = registry.display_name(cert.payload.trent_name)
                     .value_or(cert.payload.trent_name);
  return TrustedDialog(cert.payload.subject, std::move(display), std::move(secret),
                       std::move(origin));
}

bool Session::has_page(std::string_view origin) const {
  return std::any_of(pages_.begin(), pages_.end(),
                     [&](const SandboxedPage& p) { return p.origin == origin; });
}

Session Session::with_fullscreen_history(std::string origin) const {
  Session copy = *this;
  copy.fullscreen_warned_origins_.insert(std::move(origin));
  return copy;
}

void Session::log(EventKind kind, std::string origin, std::string detail) {
  events_.push_back({screen_.now, kind, std::move(origin), std::move(detail)});
}

void Session::create_page(const std::string& origin) {
  pages_.push_back({origin, screen_.now});
  log(EventKind::kPageCreated, origin);
}

void Session::close_page(const std::string& origin) {
  const auto it = std::remove_if(pages_.begin(), pages_.end(),
                                 [&](const SandboxedPage& p) { return p.origin == origin; });
  if (it != pages_.end()) {
    pages_.erase(it, pages_.end());
    log(EventKind::kPageClosed, origin);
  }
}

// Derived screen fields. greyed follows the modal; the OS shows one icon for
// the browser window, one per popup and one for a chrome-owned dialog.
void Session::recompose() {
  screen_.greyed = screen_.modal.has_value();
  std::uint32_t icons = 1;
  std::optional<std::string> overlay;
  for (const Surface& s : screen_.canvas) {
    if (const auto* popup = std::get_if<PopupWindow>(&s.content)) {
      ++icons;
      overlay = popup->address_bar;
    }
  }
  if (screen_.modal) ++icons;
  screen_.os_chrome.window_icons = icons;
  screen_.os_chrome.taskbar_visible = !screen_.fullscreen;
  screen_.chrome_bar.overlay_address_bar = overlay;
}

Session begin_session(BrowserProfile profile, SecretStore store, TrentRegistry registry) {
  Session s;
  s.profile_ = std::move(profile);
  s.store_ = std::move(store);
  s.registry_ = std::move(registry);
  s.recompose();
  return s;
}

Session navigate(Session s, std::string_view origin_view,
                 const std::optional<Certificate>& presented_cert) {
  if (s.phase_ == Phase::kDialogShown) {
    throw ProtocolError("cannot navigate while the login dialog is open");
  }
  const std::string origin(origin_view);
  s.log(EventKind::kNavigated, origin, presented_cert ? "with certificate" : "");

  // A fresh navigation replaces the foreground and tears down any old
  // sandbox for the same origin.
  s.close_page(origin);
  s.screen_.canvas.clear();
  s.screen_.modal.reset();
  s.screen_.fullscreen = false;
  s.screen_.warning.reset();
  s.screen_.chrome_bar = ChromeBar{origin};

  if (!presented_cert) {
    s.create_page(origin);
    s.screen_.canvas.push_back({Capability::sandboxed_page(origin), PageContent{"site:" + origin}});
    s.phase_ = Phase::kBrowsing;
    s.recompose();
    return s;
  }

  const Certificate& cert = *presented_cert;
  std::optional<std::string> rejection;
  if (cert.payload.subject.subject_name != origin) {
    rejection = "name_mismatch";
  } else if (auto result = verify_certificate(cert, s.registry_, s.screen_.now);
             !result.verified()) {
    rejection = std::string(to_string(*result.rejection));
  }
  if (rejection) {
    s.log(EventKind::kVerificationRejected, origin, *rejection);
    s.screen_.canvas.push_back(
        {Capability::chrome_process(), VerificationInterstitial{*rejection}});
    s.phase_ = Phase::kNavigating;
    s.recompose();
    return s;
  }

  s.screen_.chrome_bar.padlock = true;
  s.screen_.chrome_bar.green_bar = true;
  s.screen_.chrome_bar.certificate_identity = cert.payload.subject;
  s.screen_.chrome_bar.certificate_trent =
      s.registry_.display_name(cert.payload.trent_name).value_or(cert.payload.trent_name);

  if (cert.payload.wants_login_dialog) {
    const ChromeProcess chrome;
    s.screen_.modal =
        chrome.render_trusted_dialog(cert, s.store_, s.registry_, s.screen_.now, origin);
    s.phase_ = Phase::kDialogShown;
    s.log(EventKind::kDialogShown, origin);
  } else {
    s.create_page(origin);
    s.screen_.canvas.push_back({Capability::sandboxed_page(origin), PageContent{"site:" + origin}});
    s.phase_ = Phase::kBrowsing;
  }
  s.recompose();
  return s;
}

Session place_surface(Session s, std::string_view origin_view, SurfaceContent content,
                      bool into_popup) {
  const std::string origin(origin_view);
  if (!s.has_page(origin)) {
    throw ProtocolError("no sandboxed page for origin " + origin);
  }
  const Capability cap = Capability::sandboxed_page(origin);
  adopt_sandboxed_content(content, cap);
  const std::string detail(content_name(content));

  if (into_popup) {
    auto it = std::find_if(s.screen_.canvas.rbegin(), s.screen_.canvas.rend(),
                           [&](const Surface& surface) {
                             return surface.origin_cap == cap &&
                                    std::holds_alternative<PopupWindow>(surface.content);
                           });
    if (it == s.screen_.canvas.rend()) {
      throw ProtocolError("no popup window for origin " + origin);
    }
    std::get<PopupWindow>(it->content).embedded.push_back({cap, std::move(content)});
  } else {
    s.screen_.canvas.push_back({cap, std::move(content)});
  }
  s.log(EventKind::kSurfacePlaced, origin, detail);
  s.recompose();
  return s;
}

Session open_popup(Session s, std::string_view origin_view, bool undecorated_requested) {
  const std::string origin(origin_view);
  if (!s.has_page(origin)) {
    throw ProtocolError("no sandboxed page for origin " + origin);
  }
  // The address bar is forced to the opener's origin whatever was requested.
  s.screen_.canvas.push_back({Capability::sandboxed_page(origin),
                              PopupWindow{origin, undecorated_requested, {}}});
  s.log(EventKind::kPopupOpened, origin,
        undecorated_requested ? "undecorated requested" : "");
  s.recompose();
  return s;
}

Session request_fullscreen(Session s, std::string_view origin_view,
                           FullscreenTrigger trigger) {
  const std::string origin(origin_view);
  if (!s.has_page(origin)) {
    throw ProtocolError("no sandboxed page for origin " + origin);
  }
  // requestFullscreen() is refused outside a user gesture, e.g. on load.
  if (trigger == FullscreenTrigger::kPageLoad || s.screen_.fullscreen) return s;

  s.screen_.fullscreen = true;
  s.log(EventKind::kFullscreenEntered, origin);
  if (const auto* every = std::get_if<EveryTimeTransient>(&s.profile_.fullscreen_warning)) {
    s.screen_.warning = ScreenWarning{WarningStyle::kTransient,
                                      s.screen_.now + every->duration_ticks};
    s.log(EventKind::kWarningShown, origin, "transient");
  } else if (s.fullscreen_warned_origins_.insert(origin).second) {
    s.screen_.warning = ScreenWarning{WarningStyle::kPersistent, std::nullopt};
    s.log(EventKind::kWarningShown, origin, "persistent");
  }
  s.recompose();
  return s;
}

Session exit_fullscreen(Session s) {
  if (!s.screen_.fullscreen) return s;
  s.screen_.fullscreen = false;
  s.screen_.warning.reset();
  s.log(EventKind::kFullscreenExited, {});
  s.recompose();
  return s;
}

Session dismiss_warning(Session s) {
  if (!s.screen_.warning) return s;
  s.screen_.warning.reset();
  s.log(EventKind::kWarningDismissed, {});
  return s;
}

Session advance_tick(Session s) {
  ++s.screen_.now;
  const auto& warning = s.screen_.warning;
  if (warning && warning->style == WarningStyle::kTransient &&
      *warning->expires_at <= s.screen_.now) {
    s.screen_.warning.reset();
    s.log(EventKind::kWarningExpired, {});
  }
  return s;
}

Session submit_login(Session s, const LoginDecision& decision) {
  const bool enter = std::holds_alternative<EnterCredentials>(decision);

  if (s.screen_.modal) {
    const std::string origin = s.screen_.modal->origin();
    s.screen_.modal.reset();
    if (enter) {
      s.log(EventKind::kCredentialsEntered, origin,
            std::get<EnterCredentials>(decision).credentials.username);
      // The sandbox for the site is created only after the login, one tick on.
      s = advance_tick(std::move(s));
      s.create_page(origin);
      s.screen_.canvas.push_back({Capability::sandboxed_page(origin), PageContent{"site:" + origin}});
      s.phase_ = Phase::kLoggedIn;
    } else {
      s.log(EventKind::kBackedAway, origin);
      s.phase_ = Phase::kBackedAway;
    }
    s.recompose();
    return s;
  }

  const auto counterfeit = counterfeit_login_origin(s.screen_);
  if (!counterfeit) {
    throw ProtocolError("no login dialog or login form on screen");
  }
  if (enter) {
    s.log(EventKind::kCredentialsCaptured, *counterfeit,
          std::get<EnterCredentials>(decision).credentials.username);
  } else {
    s.log(EventKind::kBackedAway, *counterfeit);
    s.phase_ = Phase::kBackedAway;
  }
  return s;
}

Session record_event(Session s, EventKind kind, std::string origin, std::string detail) {
  s.log(kind, std::move(origin), std::move(detail));
  return s;
}

std::optional<std::string> counterfeit_login_origin(const ScreenState& screen) {
  std::optional<std::string> found;
  for_each_surface(screen.canvas, [&](const Surface& s) {
    if (found || s.origin_cap.is_chrome()) return;
    if (std::holds_alternative<FakeDialogImage>(s.content) ||
        std::holds_alternative<LoginFormInPage>(s.content)) {
      found = s.origin_cap.origin();
    }
  });
  return found;
}

bool has_login_affordance(const ScreenState& screen) {
  return screen.modal.has_value() || counterfeit_login_origin(screen).has_value();
}

}  // namespace phishgame
