// Mallory's strategy catalog. A strategy becomes an AttackPlan: a list of
// actions a sandboxed page can request from the browser, plus the secret it
// is guessing (if it draws a dialog).

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "phishgame/pki.hpp"
#include "phishgame/rng.hpp"
#include "phishgame/secrets.hpp"
#include "phishgame/users.hpp"
#include "phishgame/vmachine.hpp"

namespace phishgame {

enum class AttackKind {
  kPlainPhishPage,
  kFakeDialogDiv,
  kUndecoratedPopup,
  kFullscreenCounterfeit,
  kCookieAsPassword,
  kCertBearingMallory,
  kSecretThief,
};

struct AttackerStrategy {
  AttackKind kind = AttackKind::kPlainPhishPage;
  Fidelity fidelity = Fidelity::kRealistic;  // FullscreenCounterfeit only

  friend bool operator==(const AttackerStrategy&, const AttackerStrategy&) = default;
};

/// Stable identifiers used in configs, reports and the service API:
/// plain_phish_page, fake_dialog_div, undecorated_popup,
/// fullscreen_counterfeit (realistic), fullscreen_counterfeit_crayon,
/// cookie_as_password, cert_bearing_mallory, secret_thief.
std::string strategy_name(const AttackerStrategy& strategy);
std::optional<AttackerStrategy> strategy_by_name(std::string_view name);

/// The seven strategies of the catalog, fullscreen at realistic fidelity.
std::vector<AttackerStrategy> default_strategies();

/// What Mallory knows: everything public about Bob and the Trent, her own
/// origin, and the certificate she bought in her own name.
struct AttackContext {
  IdentityCredentials target_identity;
  std::string target_origin;
  std::string target_trent_display_name;
  std::string attacker_origin;
  std::optional<Certificate> attacker_certificate;
  std::uint32_t universe_size = kDefaultUniverseSize;
};

namespace action {
/// Navigate the attacker's own origin, optionally presenting a certificate.
struct Navigate {
  std::optional<Certificate> certificate;
};
struct OpenPopup {
  bool undecorated_requested = true;
};
struct RequestFullscreen {
  FullscreenTrigger trigger = FullscreenTrigger::kUserGesture;
};
struct ExitFullscreen {};
struct PlaceSurface {
  SurfaceContent content;
  bool into_popup = false;
};
struct AdvanceTick {};

// Chrome-only operations. A page can attempt them; apply_attack records a
// capability violation and skips the step.
struct ReadSecret {};
struct ShowTrustedDialog {
  IdentityCredentials identity;
};
struct SetChromeBar {
  std::string address;
  bool padlock = true;
  bool green_bar = true;
};
struct SetOverlayAddress {
  std::string address;
};
struct DismissWarning {};
}  // namespace action

using AttackAction =
    std::variant<action::Navigate, action::OpenPopup, action::RequestFullscreen,
                 action::ExitFullscreen, action::PlaceSurface, action::AdvanceTick,
                 action::ReadSecret, action::ShowTrustedDialog, action::SetChromeBar,
                 action::SetOverlayAddress, action::DismissWarning>;

std::string_view action_name(const AttackAction& step);

struct AttackPlan {
  AttackerStrategy strategy;
  std::string origin;  // the attacker page every step acts as
  std::vector<AttackAction> steps;
  std::optional<std::uint32_t> guessed_secret_id;
};

/// Reads the secret off a hacked machine. Throws IllegalStrategy unless the
/// store is compromised.
std::uint32_t steal_secret(const SecretStore& store);

/// Builds the plan for `strategy`. Only SecretThief looks at `store`, and
/// only through steal_secret(). Throws IllegalStrategy for SecretThief on an
/// uncompromised store and for CertBearingMallory without a certificate.
AttackPlan plan_attack(const AttackerStrategy& strategy, const AttackContext& context,
                       Rng& rng, const SecretStore& store);

/// Applies each step as the plan's sandboxed origin. Chrome-only steps and
/// steps the browser refuses are logged as events and skipped.
Session apply_attack(Session session, const AttackPlan& plan);

/// Probability that a dialog with a guessed secret shows the right image:
/// 1/U for a uniform guess, 1 for SecretThief. Throws DomainError for
/// strategies that show no guessed secret or a policy that does not check it.
double best_guess_success_probability(const AttackerStrategy& strategy, PolicyKind policy,
                                      std::uint32_t universe_size);

// ---------------------------------------------------------------------------
// Capability-soundness fuzzing

struct FuzzOptions {
  std::uint64_t sequences = 10'000;
  std::uint32_t max_steps = 16;
  std::uint64_t seed = 1;
  std::uint32_t universe_size = kDefaultUniverseSize;
};

struct FuzzReport {
  std::uint64_t sequences = 0;
  std::uint64_t steps = 0;
  std::uint64_t refused_steps = 0;  // capability violations and protocol refusals
  std::uint64_t trusted_dialogs = 0;
  std::uint64_t secret_leaks = 0;
  std::uint64_t guess_collisions = 0;
  std::uint64_t overlay_mismatches = 0;
  std::uint64_t accounting_errors = 0;
  std::uint64_t store_mutations = 0;
  std::vector<std::string> violations;  // first few, for diagnostics

  bool clean() const {
    return trusted_dialogs == 0 && secret_leaks == 0 && overlay_mismatches == 0 &&
           accounting_errors == 0 && store_mutations == 0;
  }
};

/// Random attacker action sequences against uncompromised stores. Each
/// sequence runs twice with two different secrets: a sandboxed surface
/// showing the true secret in both runs is a leak, in one run a lucky guess.
FuzzReport run_capability_fuzz(const FuzzOptions& options);

/// Random action drawn from the whole attacker vocabulary, including
/// forged certificates and chrome-only attempts.
AttackAction random_attack_action(Rng& rng, const AttackContext& context,
                                  const Certificate& victim_certificate);

}  // namespace phishgame
