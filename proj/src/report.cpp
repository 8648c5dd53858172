#include "phishgame/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "phishgame/view.hpp"

namespace phishgame {

using nlohmann::json;

json stats_json(const AggregateStats& s) {
  json outcomes = json::object();
  for (std::size_t i = 0; i < kOutcomeCount; ++i) {
    outcomes[std::string(to_string(static_cast<Outcome>(i)))] = s.outcome_counts[i];
  }
  return {{"n", s.n},
          {"n_genuine", s.n_genuine},
          {"n_phish", s.n_phish},
          {"accepted_genuine", s.accepted_genuine},
          {"accepted_phish", s.accepted_phish},
          {"captured", s.captured},
          {"outcomes", outcomes},
          {"attack_success_rate", s.attack_success_rate},
          {"accept_given_genuine", s.accept_given_genuine},
          {"accept_given_phish", s.accept_given_phish},
          {"wilson_low", s.attack_success_ci.low},
          {"wilson_high", s.attack_success_ci.high},
          {"mean_user_payoff", s.mean_user_payoff},
          {"mean_attacker_payoff", s.mean_attacker_payoff}};
}

json signal_json(const Signal& sig) {
  json j = {{"kind", to_string(sig.kind)}};
  switch (sig.kind) {
    case SignalKind::kIdentityShown:
      if (sig.identity) j["identity"] = to_json(*sig.identity);
      break;
    case SignalKind::kTrentNameShown:
    case SignalKind::kOverlayAddressBar:
      j["text"] = sig.text;
      break;
    case SignalKind::kSecretShown:
      j["secret_id"] = sig.secret_id;
      break;
    case SignalKind::kDialogHasWindowIcon:
      j["flag"] = sig.flag;
      break;
    case SignalKind::kFullscreenWarning:
      j["style"] = to_string(sig.warning_style);
      break;
    default:
      break;
  }
  return j;
}

json event_json(const SessionEvent& e) {
  return {{"tick", e.tick}, {"kind", to_string(e.kind)}, {"origin", e.origin}, {"detail", e.detail}};
}

json transcript_json(const EpisodeTranscript& t) {
  json events = json::array();
  for (const auto& e : t.events) events.push_back(event_json(e));
  json signals = json::array();
  for (const auto& s : t.signals.signals) signals.push_back(signal_json(s));
  return {{"seed", t.seed},
          {"world", to_string(t.world)},
          {"strategy", t.strategy ? json(strategy_name(*t.strategy)) : json(nullptr)},
          {"policy", to_string(t.policy)},
          {"secret_id", t.secret_id},
          {"guessed_secret_id", t.guessed_secret_id ? json(*t.guessed_secret_id) : json(nullptr)},
          {"events", events},
          {"screen", screen_view(t.screen)},
          {"signals", signals},
          {"login_affordance", t.signals.login_affordance},
          {"decision", to_string(t.decision)},
          {"credentials_captured", t.credentials_captured},
          {"outcome", to_string(t.outcome)},
          {"payoffs", {{"user", t.payoffs.user}, {"attacker", t.payoffs.attacker}}}};
}

std::string format_trace(const EpisodeTranscript& t, const ScenarioConfig& config) {
  std::ostringstream out;
  out << "config " << config.hash << "\n";
  out << "seed " << t.seed << "\n";
  out << "profile " << config.profile_name << ", U=" << config.universe_size
      << ", policy " << to_string(t.policy) << ", attention " << config.attention_name << "\n";
  out << "\nevents\n";
  for (const auto& e : t.events) {
    out << "  t=" << std::setw(3) << e.tick << "  " << std::left << std::setw(22) << to_string(e.kind)
        << std::right << e.origin;
    if (!e.detail.empty()) out << "  (" << e.detail << ")";
    out << "\n";
  }
  out << "\nscreen\n" << screen_view(t.screen).dump(2) << "\n";
  out << "\nnoticed\n";
  if (t.signals.signals.empty()) out << "  nothing\n";
  for (const auto& s : t.signals.signals) out << "  " << signal_json(s).dump() << "\n";
  out << "\ndecision " << to_string(t.decision) << "\n";
  out << "\nreveal\n";
  out << "  world " << to_string(t.world);
  if (t.strategy) out << " (" << strategy_name(*t.strategy) << ")";
  out << "\n  secret " << t.secret_id;
  if (t.guessed_secret_id) out << ", guessed " << *t.guessed_secret_id;
  out << "\n  outcome " << to_string(t.outcome) << "\n";
  out << "  payoffs user " << t.payoffs.user << ", attacker " << t.payoffs.attacker << "\n";
  return out.str();
}

namespace {

json provenance(const ScenarioConfig& config, std::uint64_t n) {
  json policies = json::array();
  for (auto p : config.policies) policies.push_back(to_string(p));
  json strategies = json::array();
  for (const auto& s : config.strategies) strategies.push_back(strategy_name(s));
  return {{"config_hash", config.hash},
          {"base_seed", config.seed},
          {"n_per_cell", n},
          {"profile", config.profile_name},
          {"universe_size", config.universe_size},
          {"attention", config.attention_name},
          {"compromised", config.compromised},
          {"policies", policies},
          {"strategies", strategies}};
}

json cell_json(const MatrixCell& cell) {
  json j = stats_json(cell.stats);
  j["strategy"] = cell.strategy ? json(strategy_name(*cell.strategy)) : json(nullptr);
  j["policy"] = to_string(cell.policy);
  return j;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

json matrix_json(const Matrix& matrix, const ScenarioConfig& config) {
  json cells = json::array();
  json baselines = json::array();
  for (const auto& cell : matrix.cells) {
    (cell.strategy ? cells : baselines).push_back(cell_json(cell));
  }
  return {{"provenance", provenance(config, config.n)}, {"cells", cells}, {"baselines", baselines}};
}

std::string matrix_csv(const Matrix& matrix, const ScenarioConfig& config) {
  std::ostringstream out;
  out << "# config_hash=" << config.hash << " base_seed=" << config.seed << "\n";
  out << "strategy,policy,n,n_genuine,n_phish,accepted_genuine,accepted_phish,captured,"
         "attack_success_rate,wilson_low,wilson_high,accept_given_genuine,accept_given_phish,"
         "mean_user_payoff,mean_attacker_payoff\n";
  for (const auto& cell : matrix.cells) {
    const auto& s = cell.stats;
    out << (cell.strategy ? strategy_name(*cell.strategy) : "") << ',' << to_string(cell.policy)
        << ',' << s.n << ',' << s.n_genuine << ',' << s.n_phish << ',' << s.accepted_genuine << ','
        << s.accepted_phish << ',' << s.captured << ',' << fmt(s.attack_success_rate) << ','
        << fmt(s.attack_success_ci.low) << ',' << fmt(s.attack_success_ci.high) << ','
        << fmt(s.accept_given_genuine) << ',' << fmt(s.accept_given_phish) << ','
        << fmt(s.mean_user_payoff) << ',' << fmt(s.mean_attacker_payoff) << "\n";
  }
  return out.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path + ": " + ec.message());
  }
}

}  // namespace phishgame
