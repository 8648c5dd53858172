// The browser as a virtual machine: one chrome process plus N sandboxed
// pages, the composed screen they produce, fullscreen warnings, and the
// trusted login dialog.
//
// Every transition is a pure function Session -> Session. Sandboxed pages
// act only through place_surface / open_popup / request_fullscreen; the
// trusted dialog can only be built by ChromeProcess, whose constructor is
// reachable from navigate() alone.

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "phishgame/capability.hpp"
#include "phishgame/pki.hpp"
#include "phishgame/secrets.hpp"

namespace phishgame {

// ---------------------------------------------------------------------------
// Browser profiles

struct EveryTimeTransient {
  std::uint32_t duration_ticks = 3;
  friend bool operator==(const EveryTimeTransient&, const EveryTimeTransient&) = default;
};
struct FirstTimePersistent {
  friend bool operator==(const FirstTimePersistent&, const FirstTimePersistent&) = default;
};
using FullscreenWarningPolicy = std::variant<EveryTimeTransient, FirstTimePersistent>;

struct BrowserProfile {
  std::string name;
  FullscreenWarningPolicy fullscreen_warning;

  friend bool operator==(const BrowserProfile&, const BrowserProfile&) = default;
};

inline constexpr std::uint32_t kDefaultWarningTicks = 3;

BrowserProfile chrome_like_profile(std::uint32_t warning_ticks = kDefaultWarningTicks);
BrowserProfile firefox_like_profile(std::uint32_t warning_ticks = kDefaultWarningTicks);
BrowserProfile edge_like_profile();
/// "chrome", "firefox" or "edge".
std::optional<BrowserProfile> profile_by_name(std::string_view name);

// ---------------------------------------------------------------------------
// Surfaces

enum class Fidelity { kCrayon, kRealistic };
std::string_view to_string(Fidelity fidelity);

struct Surface;

struct PageContent {
  std::string descriptor;
  friend bool operator==(const PageContent&, const PageContent&) = default;
};

struct LoginFormInPage {
  friend bool operator==(const LoginFormInPage&, const LoginFormInPage&) = default;
};

/// A picture of a dialog drawn inside web content. It never owns an OS
/// window, so it never has a window icon.
struct FakeDialogImage {
  IdentityCredentials identity;
  std::string trent_display_name;
  std::uint32_t shown_secret_id = 0;

  static constexpr bool has_window_icon = false;
  friend bool operator==(const FakeDialogImage&, const FakeDialogImage&) = default;
};

/// Browser controls and desktop painted by a page: address bar, padlock,
/// green bar, a certificate viewer, and a taskbar.
struct CounterfeitChrome {
  std::string address;
  bool padlock = true;
  bool green_bar = true;
  std::optional<IdentityCredentials> certificate_identity;
  std::string certificate_trent;
  friend bool operator==(const CounterfeitChrome&, const CounterfeitChrome&) = default;
};

struct CounterfeitDesktop {
  Fidelity fidelity = Fidelity::kRealistic;
  CounterfeitChrome chrome;
  bool greyed = false;  // painted modal backdrop
  std::vector<Surface> embedded;
  friend bool operator==(const CounterfeitDesktop&, const CounterfeitDesktop&);
};

/// Darker links claiming prior visits. Any page can paint these.
struct VisitedLinkStyling {
  std::uint32_t claimed_visits = 0;
  friend bool operator==(const VisitedLinkStyling&, const VisitedLinkStyling&) = default;
};

/// A window opened with window.open(). The browser always adds an address
/// bar showing the opener's real origin.
struct PopupWindow {
  std::string address_bar;
  bool undecorated_requested = false;
  std::vector<Surface> embedded;
  friend bool operator==(const PopupWindow&, const PopupWindow&);
};

/// Shown by the chrome process when certificate checks fail.
struct VerificationInterstitial {
  std::string reason;
  friend bool operator==(const VerificationInterstitial&,
                         const VerificationInterstitial&) = default;
};

using SurfaceContent =
    std::variant<PageContent, LoginFormInPage, FakeDialogImage, CounterfeitDesktop,
                 VisitedLinkStyling, PopupWindow, VerificationInterstitial>;

struct Surface {
  Capability origin_cap = Capability::chrome_process();
  SurfaceContent content;
  friend bool operator==(const Surface&, const Surface&) = default;
};

// ---------------------------------------------------------------------------
// The trusted dialog

class ChromeProcess;

class TrustedDialog {
 public:
  const IdentityCredentials& identity() const { return identity_; }
  const std::string& trent_display_name() const { return trent_display_name_; }
  const SharedSecret& secret() const { return secret_; }
  /// Origin the dialog was raised for.
  const std::string& origin() const { return origin_; }
  static constexpr bool has_window_icon = true;

  friend bool operator==(const TrustedDialog&, const TrustedDialog&) = default;

 private:
  friend class ChromeProcess;
  TrustedDialog(IdentityCredentials identity, std::string trent_display_name,
                SharedSecret secret, std::string origin)
      : identity_(std::move(identity)),
        trent_display_name_(std::move(trent_display_name)),
        secret_(std::move(secret)),
        origin_(std::move(origin)) {}

  IdentityCredentials identity_;
  std::string trent_display_name_;
  SharedSecret secret_;
  std::string origin_;
};

// ---------------------------------------------------------------------------
// Screen

struct ChromeBar {
  std::string address;
  bool padlock = false;
  bool green_bar = false;
  std::optional<std::string> overlay_address_bar;
  // What the certificate viewer behind the padlock shows.
  std::optional<IdentityCredentials> certificate_identity;
  std::optional<std::string> certificate_trent;
  friend bool operator==(const ChromeBar&, const ChromeBar&) = default;
};

enum class WarningStyle { kTransient, kPersistent };
std::string_view to_string(WarningStyle style);

struct ScreenWarning {
  WarningStyle style = WarningStyle::kTransient;
  std::optional<Tick> expires_at;  // set iff transient
  friend bool operator==(const ScreenWarning&, const ScreenWarning&) = default;
};

struct OsChrome {
  std::uint32_t window_icons = 1;
  bool taskbar_visible = true;
  friend bool operator==(const OsChrome&, const OsChrome&) = default;
};

struct ScreenState {
  ChromeBar chrome_bar;
  std::vector<Surface> canvas;
  std::optional<TrustedDialog> modal;
  bool greyed = false;
  bool fullscreen = false;
  std::optional<ScreenWarning> warning;
  OsChrome os_chrome;
  Tick now = 0;
  friend bool operator==(const ScreenState&, const ScreenState&) = default;
};

// ---------------------------------------------------------------------------
// Session

enum class Phase { kNavigating, kDialogShown, kBrowsing, kLoggedIn, kBackedAway };
std::string_view to_string(Phase phase);

enum class FullscreenTrigger { kUserGesture, kPageLoad };

struct SandboxedPage {
  std::string origin;
  Tick created_at = 0;
  friend bool operator==(const SandboxedPage&, const SandboxedPage&) = default;
};

enum class EventKind {
  kNavigated,
  kVerificationRejected,
  kDialogShown,
  kPageCreated,
  kPageClosed,
  kSurfacePlaced,
  kPopupOpened,
  kFullscreenEntered,
  kFullscreenDenied,
  kFullscreenExited,
  kWarningShown,
  kWarningExpired,
  kWarningDismissed,
  kCredentialsEntered,
  kCredentialsCaptured,
  kBackedAway,
  kCapabilityViolation,
  kStepRejected,
};
std::string_view to_string(EventKind kind);

struct SessionEvent {
  Tick tick = 0;
  EventKind kind = EventKind::kNavigated;
  std::string origin;
  std::string detail;
  friend bool operator==(const SessionEvent&, const SessionEvent&) = default;
};

struct Credentials {
  std::string username;
  std::string password;
  friend bool operator==(const Credentials&, const Credentials&) = default;
};

struct EnterCredentials {
  Credentials credentials;
  friend bool operator==(const EnterCredentials&, const EnterCredentials&) = default;
};
struct BackAway {
  friend bool operator==(const BackAway&, const BackAway&) = default;
};
using LoginDecision = std::variant<EnterCredentials, BackAway>;

class Session;

Session begin_session(BrowserProfile profile, SecretStore store, TrentRegistry registry);
Session navigate(Session session, std::string_view origin,
                 const std::optional<Certificate>& presented_cert);
Session place_surface(Session session, std::string_view origin, SurfaceContent content,
                      bool into_popup = false);
Session open_popup(Session session, std::string_view origin, bool undecorated_requested);
Session request_fullscreen(Session session, std::string_view requesting_origin,
                           FullscreenTrigger trigger);
Session exit_fullscreen(Session session);
Session dismiss_warning(Session session);
Session submit_login(Session session, const LoginDecision& decision);
Session advance_tick(Session session);
Session record_event(Session session, EventKind kind, std::string origin,
                     std::string detail);

class Session {
 public:
  const BrowserProfile& profile() const { return profile_; }
  const SecretStore& store() const { return store_; }
  const TrentRegistry& registry() const { return registry_; }
  const std::vector<SandboxedPage>& pages() const { return pages_; }
  const ScreenState& screen() const { return screen_; }
  const std::set<std::string>& fullscreen_warned_origins() const {
    return fullscreen_warned_origins_;
  }
  Phase phase() const { return phase_; }
  const std::vector<SessionEvent>& events() const { return events_; }

  bool has_page(std::string_view origin) const;
  /// The N + 1 personalities: one per sandboxed page plus the chrome process.
  std::size_t process_count() const { return pages_.size() + 1; }

  /// Allows an origin's later fullscreen entries to skip the first-time
  /// warning, as if it had gone fullscreen in an earlier visit.
  Session with_fullscreen_history(std::string origin) const;

  friend bool operator==(const Session&, const Session&) = default;

 private:
  friend class ChromeProcess;
  friend Session begin_session(BrowserProfile, SecretStore, TrentRegistry);
  friend Session navigate(Session, std::string_view, const std::optional<Certificate>&);
  friend Session place_surface(Session, std::string_view, SurfaceContent, bool);
  friend Session open_popup(Session, std::string_view, bool);
  friend Session request_fullscreen(Session, std::string_view, FullscreenTrigger);
  friend Session exit_fullscreen(Session);
  friend Session dismiss_warning(Session);
  friend Session submit_login(Session, const LoginDecision&);
  friend Session advance_tick(Session);
  friend Session record_event(Session, EventKind, std::string, std::string);

  void log(EventKind kind, std::string origin, std::string detail = {});
  void create_page(const std::string& origin);
  void close_page(const std::string& origin);
  void recompose();

  BrowserProfile profile_;
  SecretStore store_;
  TrentRegistry registry_;
  std::vector<SandboxedPage> pages_;
  ScreenState screen_;
  std::set<std::string> fullscreen_warned_origins_;
  Phase phase_ = Phase::kNavigating;
  std::vector<SessionEvent> events_;
};

/// The chrome personality. Only navigate() can obtain one.
class ChromeProcess {
 public:
  Capability capability() const { return Capability::chrome_process(); }

  /// Throws ProtocolError unless `cert` verifies at `now`.
  TrustedDialog render_trusted_dialog(const Certificate& cert, const SecretStore& store,
                                      const TrentRegistry& registry, Tick now,
                                      std::string origin) const;

 private:
  ChromeProcess() = default;
  friend Session navigate(Session, std::string_view, const std::optional<Certificate>&);
};

/// Thrown when a sandboxed page tries something only the chrome process may
/// do (drawing a popup's address bar, an interstitial).
class CapabilityViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Screen queries

/// Origin of the first login affordance painted by a sandboxed page
/// (an in-page form or a fake dialog), searching nested surfaces.
std::optional<std::string> counterfeit_login_origin(const ScreenState& screen);

/// Genuine modal or counterfeit affordance present.
bool has_login_affordance(const ScreenState& screen);

/// Visits every surface on the canvas, including nested ones.
template <typename Fn>
void for_each_surface(const std::vector<Surface>& surfaces, Fn&& fn) {
  for (const Surface& s : surfaces) {
    fn(s);
    if (const auto* desktop = std::get_if<CounterfeitDesktop>(&s.content)) {
      for_each_surface(desktop->embedded, fn);
    } else if (const auto* popup = std::get_if<PopupWindow>(&s.content)) {
      for_each_surface(popup->embedded, fn);
    }
  }
}

}  // namespace phishgame
