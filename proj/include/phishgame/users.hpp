// Alice-Human: what she notices on a screen and how she decides.
//
// All randomness lives in perceive(); decide() is a pure function of the
// perceived signals.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "phishgame/pki.hpp"
#include "phishgame/rng.hpp"
#include "phishgame/vmachine.hpp"

namespace phishgame {

enum class SignalKind : std::size_t {
  kPadlockVisible,
  kGreenBarVisible,
  kIdentityShown,
  kTrentNameShown,
  kSecretShown,
  kDialogHasWindowIcon,
  kScreenGreyed,
  kFullscreenWarning,
  kOverlayAddressBar,
  kLoginFieldsInWebpage,
  kFullscreenActive,
};
inline constexpr std::size_t kSignalKindCount = 11;

std::string_view to_string(SignalKind kind);
std::optional<SignalKind> signal_kind_by_name(std::string_view name);

struct Signal {
  SignalKind kind;
  std::optional<IdentityCredentials> identity;  // IdentityShown
  std::string text;                             // TrentNameShown, OverlayAddressBar
  std::uint32_t secret_id = 0;                  // SecretShown: the displayed id
  bool flag = false;                            // DialogHasWindowIcon
  WarningStyle warning_style = WarningStyle::kTransient;  // FullscreenWarning

  friend bool operator==(const Signal&, const Signal&) = default;
};

struct SignalSet {
  std::vector<Signal> signals;
  /// Whether there is anywhere to type credentials. Not subject to
  /// attention: a user who logs in has found the login.
  bool login_affordance = false;

  bool contains(SignalKind kind) const;
  std::vector<const Signal*> of_kind(SignalKind kind) const;
  friend bool operator==(const SignalSet&, const SignalSet&) = default;
};

struct AttentionProfile {
  std::array<double, kSignalKindCount> p_notice{};
  /// Chance that a crayon-quality counterfeit desktop is seen for what it is.
  double fidelity_penalty = 0.0;

  double notice(SignalKind kind) const { return p_notice[static_cast<std::size_t>(kind)]; }
  void set(SignalKind kind, double p) { p_notice[static_cast<std::size_t>(kind)] = p; }
  bool valid() const;
};

AttentionProfile full_attention();
/// Illustrative only: warnings 0.3, window icons 0.2, identity 0.5,
/// everything else 1.0; crayon fakes spotted half the time.
AttentionProfile casual_attention();
std::optional<AttentionProfile> attention_by_name(std::string_view name);

/// Each candidate signal present on the screen is kept independently with
/// probability p_notice[kind]. One uniform is drawn per candidate whatever
/// its probability, so raising any p_notice can only add signals.
SignalSet perceive(const ScreenState& screen, const AttentionProfile& attention, Rng& rng);

/// Every signal a fully attentive user could notice, in the order perceive()
/// considers them.
std::vector<Signal> candidate_signals(const ScreenState& screen);

enum class PolicyKind {
  kOblivious,
  kPadlockChecker,
  kCertInspector,
  kWarningSensitive,
  kSecretChecker,
};
inline constexpr std::array<PolicyKind, 5> kAllPolicies = {
    PolicyKind::kOblivious, PolicyKind::kPadlockChecker, PolicyKind::kCertInspector,
    PolicyKind::kWarningSensitive, PolicyKind::kSecretChecker};

std::string_view to_string(PolicyKind kind);
std::optional<PolicyKind> policy_kind_by_name(std::string_view name);

struct UserMemory {
  std::uint32_t expected_secret_id = 0;
  std::set<IdentityCredentials> known_identities;
  std::set<std::string> known_trents;
};

struct UserPolicy {
  PolicyKind kind = PolicyKind::kOblivious;
  UserMemory memory;
};

enum class Decision { kEnterCredentials, kBackAway };
std::string_view to_string(Decision decision);

Decision decide(const UserPolicy& policy, const SignalSet& signals);

/// Signals on `screen` that a fully attentive secret checker would hold
/// against it, in candidate order. An absent secret image counts as
/// kSecretShown. Empty for Bob's own dialog.
std::vector<SignalKind> revealing_signals(const ScreenState& screen, const UserMemory& memory);

}  // namespace phishgame
