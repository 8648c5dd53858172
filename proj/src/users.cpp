#include "phishgame/users.hpp"

#include <algorithm>

namespace phishgame {
namespace {

constexpr std::array<std::string_view, kSignalKindCount> kSignalNames = {
    "padlock_visible",         "green_bar_visible",   "identity_shown",
    "trent_name_shown",        "secret_shown",        "dialog_has_window_icon",
    "screen_greyed",           "fullscreen_warning",  "overlay_address_bar",
    "login_fields_in_webpage", "fullscreen_active",
};

constexpr std::array<std::string_view, 5> kPolicyNames = {
    "oblivious", "padlock_checker", "cert_inspector", "warning_sensitive", "secret_checker"};

Signal make(SignalKind kind) { return Signal{kind}; }

Signal identity_signal(const IdentityCredentials& identity) {
  Signal s{SignalKind::kIdentityShown};
  s.identity = identity;
  return s;
}

Signal text_signal(SignalKind kind, std::string text) {
  Signal s{kind};
  s.text = std::move(text);
  return s;
}

Signal secret_signal(std::uint32_t id) {
  Signal s{SignalKind::kSecretShown};
  s.secret_id = id;
  return s;
}

Signal icon_signal(bool has_icon) {
  Signal s{SignalKind::kDialogHasWindowIcon};
  s.flag = has_icon;
  return s;
}

struct Candidate {
  Signal signal;
  // Seen through a crayon-quality fake rather than noticed as a signal.
  bool crayon_recognition = false;
};

void add_counterfeit_chrome(const CounterfeitChrome& chrome, std::vector<Candidate>& out) {
  if (chrome.padlock) out.push_back({make(SignalKind::kPadlockVisible)});
  if (chrome.green_bar) out.push_back({make(SignalKind::kGreenBarVisible)});
  if (chrome.certificate_identity) {
    out.push_back({identity_signal(*chrome.certificate_identity)});
    out.push_back({text_signal(SignalKind::kTrentNameShown, chrome.certificate_trent)});
  }
}

std::vector<Candidate> candidates(const ScreenState& screen) {
  std::vector<Candidate> out;

  bool covered_by_counterfeit = false;
  for (const Surface& s : screen.canvas) {
    if (std::holds_alternative<CounterfeitDesktop>(s.content)) covered_by_counterfeit = true;
  }

  // Fullscreen hides the real browser controls; a counterfeit desktop
  // substitutes its own.
  if (!screen.fullscreen) {
    const ChromeBar& bar = screen.chrome_bar;
    if (bar.padlock) out.push_back({make(SignalKind::kPadlockVisible)});
    if (bar.green_bar) out.push_back({make(SignalKind::kGreenBarVisible)});
    if (bar.certificate_identity) out.push_back({identity_signal(*bar.certificate_identity)});
    if (bar.certificate_trent) {
      out.push_back({text_signal(SignalKind::kTrentNameShown, *bar.certificate_trent)});
    }
  } else if (!covered_by_counterfeit) {
    out.push_back({make(SignalKind::kFullscreenActive)});
  }

  if (screen.warning) {
    Signal w{SignalKind::kFullscreenWarning};
    w.warning_style = screen.warning->style;
    out.push_back({w});
  }

  if (screen.modal) {
    out.push_back({identity_signal(screen.modal->identity())});
    out.push_back(
        {text_signal(SignalKind::kTrentNameShown, screen.modal->trent_display_name())});
    out.push_back({secret_signal(screen.modal->secret().secret_id)});
    out.push_back({icon_signal(TrustedDialog::has_window_icon)});
  }
  if (screen.greyed) out.push_back({make(SignalKind::kScreenGreyed)});

  for_each_surface(screen.canvas, [&](const Surface& s) {
    if (std::holds_alternative<LoginFormInPage>(s.content)) {
      out.push_back({make(SignalKind::kLoginFieldsInWebpage)});
    } else if (const auto* fake = std::get_if<FakeDialogImage>(&s.content)) {
      out.push_back({identity_signal(fake->identity)});
      out.push_back({text_signal(SignalKind::kTrentNameShown, fake->trent_display_name)});
      out.push_back({secret_signal(fake->shown_secret_id)});
      out.push_back({icon_signal(FakeDialogImage::has_window_icon)});
    } else if (const auto* popup = std::get_if<PopupWindow>(&s.content)) {
      out.push_back({text_signal(SignalKind::kOverlayAddressBar, popup->address_bar)});
    } else if (const auto* desktop = std::get_if<CounterfeitDesktop>(&s.content)) {
      if (desktop->fidelity == Fidelity::kCrayon) {
        out.push_back({make(SignalKind::kFullscreenActive), true});
      }
      add_counterfeit_chrome(desktop->chrome, out);
      if (desktop->greyed) out.push_back({make(SignalKind::kScreenGreyed)});
    }
  });
  return out;
}

bool all_known(const std::vector<const Signal*>& shown,
               const std::set<IdentityCredentials>& known) {
  return !shown.empty() && std::all_of(shown.begin(), shown.end(), [&](const Signal* s) {
    return s->identity && known.count(*s->identity) > 0;
  });
}

bool padlock_ok(const SignalSet& signals) {
  return signals.contains(SignalKind::kPadlockVisible) ||
         signals.contains(SignalKind::kGreenBarVisible);
}

}  // namespace

std::string_view to_string(SignalKind kind) {
  return kSignalNames[static_cast<std::size_t>(kind)];
}

std::optional<SignalKind> signal_kind_by_name(std::string_view name) {
  for (std::size_t i = 0; i < kSignalNames.size(); ++i) {
    if (kSignalNames[i] == name) return static_cast<SignalKind>(i);
  }
  return std::nullopt;
}

std::string_view to_string(PolicyKind kind) {
  return kPolicyNames[static_cast<std::size_t>(kind)];
}

std::optional<PolicyKind> policy_kind_by_name(std::string_view name) {
  for (std::size_t i = 0; i < kPolicyNames.size(); ++i) {
    if (kPolicyNames[i] == name) return static_cast<PolicyKind>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Decision decision) {
  return decision == Decision::kEnterCredentials ? "enter_credentials" : "back_away";
}

bool SignalSet::contains(SignalKind kind) const {
  return std::any_of(signals.begin(), signals.end(),
                     [&](const Signal& s) { return s.kind == kind; });
}

std::vector<const Signal*> SignalSet::of_kind(SignalKind kind) const {
  std::vector<const Signal*> out;
  for (const Signal& s : signals) {
    if (s.kind == kind) out.push_back(&s);
  }
  return out;
}

bool AttentionProfile::valid() const {
  const auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  return std::all_of(p_notice.begin(), p_notice.end(), in_unit) && in_unit(fidelity_penalty);
}

AttentionProfile full_attention() {
  AttentionProfile a;
  a.p_notice.fill(1.0);
  a.fidelity_penalty = 1.0;
  return a;
}

AttentionProfile casual_attention() {
  AttentionProfile a;
  a.p_notice.fill(1.0);
  a.set(SignalKind::kFullscreenWarning, 0.3);
  a.set(SignalKind::kDialogHasWindowIcon, 0.2);
  a.set(SignalKind::kIdentityShown, 0.5);
  a.set(SignalKind::kSecretShown, 1.0);
  a.fidelity_penalty = 0.5;
  return a;
}

std::optional<AttentionProfile> attention_by_name(std::string_view name) {
  if (name == "full") return full_attention();
  if (name == "casual") return casual_attention();
  return std::nullopt;
}

std::vector<Signal> candidate_signals(const ScreenState& screen) {
  std::vector<Signal> out;
  for (auto& c : candidates(screen)) out.push_back(std::move(c.signal));
  return out;
}

SignalSet perceive(const ScreenState& screen, const AttentionProfile& attention, Rng& rng) {
  SignalSet set;
  set.login_affordance = has_login_affordance(screen);
  for (auto& c : candidates(screen)) {
    const double p = c.crayon_recognition ? attention.fidelity_penalty
                                          : attention.notice(c.signal.kind);
    if (rng.uniform01() < p) set.signals.push_back(std::move(c.signal));
  }
  return set;
}

Decision decide(const UserPolicy& policy, const SignalSet& signals) {
  constexpr auto kEnter = Decision::kEnterCredentials;
  constexpr auto kBack = Decision::kBackAway;
  if (!signals.login_affordance) return kBack;

  switch (policy.kind) {
    case PolicyKind::kOblivious:
      return kEnter;

    case PolicyKind::kPadlockChecker:
      return padlock_ok(signals) ? kEnter : kBack;

    case PolicyKind::kCertInspector:
      return all_known(signals.of_kind(SignalKind::kIdentityShown),
                       policy.memory.known_identities)
                 ? kEnter
                 : kBack;

    case PolicyKind::kWarningSensitive:
      if (signals.contains(SignalKind::kFullscreenWarning) ||
          signals.contains(SignalKind::kFullscreenActive)) {
        return kBack;
      }
      return padlock_ok(signals) ? kEnter : kBack;

    case PolicyKind::kSecretChecker: {
      // Login belongs in the browser's dialog only: a form in a page, or a
      // dialog under a popup's address bar, is web content.
      if (signals.contains(SignalKind::kLoginFieldsInWebpage) ||
          signals.contains(SignalKind::kOverlayAddressBar)) {
        return kBack;
      }
      const auto secrets = signals.of_kind(SignalKind::kSecretShown);
      const bool secret_ok =
          !secrets.empty() && std::all_of(secrets.begin(), secrets.end(), [&](const Signal* s) {
            return s->secret_id == policy.memory.expected_secret_id;
          });
      const auto trents = signals.of_kind(SignalKind::kTrentNameShown);
      const bool trent_ok =
          !trents.empty() && std::all_of(trents.begin(), trents.end(), [&](const Signal* s) {
            return policy.memory.known_trents.count(s->text) > 0;
          });
      const bool identity_ok = all_known(signals.of_kind(SignalKind::kIdentityShown),
                                         policy.memory.known_identities);
      return secret_ok && trent_ok && identity_ok ? kEnter : kBack;
    }
  }
  return kBack;
}


std::vector<SignalKind> revealing_signals(const ScreenState& screen, const UserMemory& memory) {
  std::vector<SignalKind> out;
  auto add = [&](SignalKind k) {
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  };
  bool saw_secret = false;
  for (const Signal& s : candidate_signals(screen)) {
    switch (s.kind) {
      case SignalKind::kLoginFieldsInWebpage:
      case SignalKind::kOverlayAddressBar:
      case SignalKind::kFullscreenWarning:
      case SignalKind::kFullscreenActive:
        add(s.kind);
        break;
      case SignalKind::kSecretShown:
        saw_secret = true;
        if (s.secret_id != memory.expected_secret_id) add(s.kind);
        break;
      case SignalKind::kIdentityShown:
        if (!s.identity || memory.known_identities.count(*s.identity) == 0) add(s.kind);
        break;
      case SignalKind::kTrentNameShown:
        if (memory.known_trents.count(s.text) == 0) add(s.kind);
        break;
      case SignalKind::kDialogHasWindowIcon:
        if (!s.flag) add(s.kind);
        break;
      default:
        break;
    }
  }
  if (!saw_secret) add(SignalKind::kSecretShown);
  return out;
}

}  // namespace phishgame
