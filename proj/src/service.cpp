#include "phishgame/service.hpp"

#include <cstdio>
#include <random>
#include <set>

#include "httplib.h"

#include "phishgame/errors.hpp"
#include "phishgame/report.hpp"
#include "phishgame/scenario.hpp"
#include "phishgame/view.hpp"

namespace phishgame {

using nlohmann::json;

ApiResponse api_error(int status, std::string code, std::string message) {
  return {status, {{"code", std::move(code)}, {"message", std::move(message)}}};
}

namespace {

constexpr double kDefaultExploration = 0.1;
constexpr double kDefaultPGenuine = 0.5;
constexpr std::uint32_t kMaxUniverse = 1u << 20;

struct BadRequest {
  ApiResponse response;
};

[[noreturn]] void reject(std::string code, std::string message) {
  throw BadRequest{api_error(400, std::move(code), std::move(message))};
}

void require_object(const json& j, const std::set<std::string>& allowed) {
  if (!j.is_object()) reject("INVALID_REQUEST", "request body must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) reject("INVALID_REQUEST", "unknown field '" + key + "'");
  }
}

std::uint64_t get_count(const json& j, const char* key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    reject("INVALID_REQUEST", std::string(key) + " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

double get_probability(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) reject("INVALID_REQUEST", std::string(key) + " must be a number");
  const double p = v.get<double>();
  if (!(p >= 0.0 && p <= 1.0)) reject("INVALID_REQUEST", std::string(key) + " must lie in [0, 1]");
  return p;
}

std::string random_token() {
  std::random_device rd;
  char buf[33];
  std::uint32_t words[4];
  for (auto& w : words) w = rd();
  std::snprintf(buf, sizeof buf, "%08x%08x%08x%08x", words[0], words[1], words[2], words[3]);
  return buf;
}

std::optional<Decision> decision_by_name(const std::string& name) {
  if (name == to_string(Decision::kEnterCredentials)) return Decision::kEnterCredentials;
  if (name == to_string(Decision::kBackAway)) return Decision::kBackAway;
  return std::nullopt;
}

}  // namespace

struct SessionSettings {
  std::string profile_name;
  BrowserProfile profile;
  std::uint32_t universe_size = kDefaultUniverseSize;
  double p_genuine = kDefaultPGenuine;
  std::vector<AttackerStrategy> strategies;
  double exploration = kDefaultExploration;
  std::uint64_t seed = 0;
  bool compromised = false;
  std::uint64_t max_episodes = 0;  // 0: unlimited
  PayoffTable payoffs;
};

class LiveSession {
 public:
  enum class Phase { kAwaitingDecision, kEnded };

  LiveSession(std::string id, SessionSettings settings)
      : id_(std::move(id)), settings_(std::move(settings)), store_(provision()) {
    prepare_next();
  }

  std::mutex mu;

  const SecretStore& store() const { return store_; }
  std::uint64_t episode() const { return episode_; }

  ApiResponse screen() const {
    if (phase_ != Phase::kAwaitingDecision) {
      return api_error(409, "WRONG_PHASE", "the session has ended");
    }
    return {200, {{"episode", episode_}, {"screen", screen_view(current_->transcript.screen)}}};
  }

  ApiResponse decide(const json& request) {
    require_object(request, {"decision", "episode"});
    if (!request.contains("decision") || !request["decision"].is_string()) {
      reject("INVALID_REQUEST", "decision must be enter_credentials or back_away");
    }
    const auto decision = decision_by_name(request["decision"].get<std::string>());
    if (!decision) reject("INVALID_REQUEST", "decision must be enter_credentials or back_away");

    std::uint64_t target = episode_;
    if (request.contains("episode")) target = get_count(request, "episode", episode_);

    if (auto done = resolved_.find(target); done != resolved_.end()) {
      if (done->second.first == *decision) return {200, done->second.second};
      return api_error(409, "ALREADY_DECIDED",
                       "episode " + std::to_string(target) + " was already decided");
    }
    if (phase_ != Phase::kAwaitingDecision) {
      return api_error(409, "WRONG_PHASE", "the session has ended");
    }
    if (target != episode_) {
      return api_error(409, "WRONG_PHASE",
                       "episode " + std::to_string(target) + " is not in play");
    }

    const UserMemory memory = user_memory(current_->world, store_);
    std::vector<SignalKind> revealing;
    if (current_->transcript.world == WorldType::kPhish) {
      revealing = revealing_signals(current_->transcript.screen, memory);
    }
    EpisodeTranscript t = resolve_episode(std::move(*current_), *decision, settings_.payoffs);
    current_.reset();

    if (t.strategy) history_.push_back({*t.strategy, t.credentials_captured});
    human_points_ += t.payoffs.user;
    attacker_points_ += t.payoffs.attacker;

    const std::uint64_t resolved_episode = episode_;
    transcripts_.push_back(std::move(t));
    ++episode_;
    if (settings_.max_episodes != 0 && episode_ >= settings_.max_episodes) {
      phase_ = Phase::kEnded;
    } else {
      prepare_next();
    }

    const EpisodeTranscript& last = transcripts_.back();
    json signals = json::array();
    for (SignalKind k : revealing) signals.push_back(to_string(k));
    json body = {
        {"episode", resolved_episode},
        {"decision", to_string(*decision)},
        {"reveal",
         {{"world", to_string(last.world)},
          {"strategy", last.strategy ? json(strategy_name(*last.strategy)) : json(nullptr)},
          {"secret_id", last.secret_id},
          {"revealing_signals", signals}}},
        {"outcome", to_string(last.outcome)},
        {"credentials_captured", last.credentials_captured},
        {"payoffs", {{"user", last.payoffs.user}, {"attacker", last.payoffs.attacker}}},
        {"score", score()},
        {"next_episode_ready", phase_ == Phase::kAwaitingDecision}};
    resolved_.emplace(resolved_episode, std::make_pair(*decision, body));
    return {200, body};
  }

  ApiResponse stats() const {
    std::vector<EpisodeSummary> summaries;
    summaries.reserve(transcripts_.size());
    for (const auto& t : transcripts_) summaries.push_back(summarize(t));
    json body = stats_json(aggregate(summaries, settings_.payoffs));

    json history = json::array();
    for (const auto& r : history_) {
      history.push_back({{"strategy", strategy_name(r.strategy)}, {"success", r.success}});
    }
    const auto rates = smoothed_success_rates(history_, settings_.strategies);
    json per_strategy = json::array();
    for (std::size_t i = 0; i < settings_.strategies.size(); ++i) {
      std::uint64_t attempts = 0;
      std::uint64_t successes = 0;
      for (const auto& r : history_) {
        if (r.strategy == settings_.strategies[i]) {
          ++attempts;
          successes += r.success ? 1 : 0;
        }
      }
      per_strategy.push_back({{"strategy", strategy_name(settings_.strategies[i])},
                              {"attempts", attempts},
                              {"successes", successes},
                              {"smoothed_rate", rates[i]}});
    }
    body["history"] = history;
    body["per_strategy"] = per_strategy;
    body["score"] = score();
    return {200, body};
  }

 private:
  SecretStore provision() const {
    Rng rng(derive_seed(settings_.seed, "secret"));
    SecretStore s = provision_secret(rng, settings_.universe_size);
    return settings_.compromised ? mark_compromised(std::move(s)) : s;
  }

  void prepare_next() {
    const std::uint64_t seed = split_seed(settings_.seed, episode_);
    Rng adversary(derive_seed(seed, "adversary"));
    EpisodeConfig c;
    c.p_genuine = settings_.p_genuine;
    c.strategy = best_response(history_, settings_.strategies, settings_.exploration, adversary);
    c.profile = settings_.profile;
    c.universe_size = settings_.universe_size;
    c.payoffs = settings_.payoffs;
    c.seed = seed;
    c.compromised = settings_.compromised;
    current_.emplace(prepare_episode(c, store_));
  }

  json score() const {
    return {{"human_points", human_points_},
            {"attacker_points", attacker_points_},
            {"episodes_played", transcripts_.size()}};
  }

  std::string id_;
  SessionSettings settings_;
  SecretStore store_;
  Phase phase_ = Phase::kAwaitingDecision;
  std::uint64_t episode_ = 0;
  std::optional<PreparedEpisode> current_;
  std::vector<AttackRecord> history_;
  std::vector<EpisodeTranscript> transcripts_;
  std::map<std::uint64_t, std::pair<Decision, json>> resolved_;
  double human_points_ = 0.0;
  double attacker_points_ = 0.0;
};

SessionService::SessionService() = default;
SessionService::~SessionService() = default;

ApiResponse SessionService::create_session(const json& request) {
  try {
    require_object(request, {"profile_name", "universe_size", "p_genuine", "strategies",
                             "exploration", "seed", "compromised", "max_episodes"});
    SessionSettings s;
    if (!request.contains("profile_name") || !request["profile_name"].is_string()) {
      reject("INVALID_REQUEST", "profile_name is required");
    }
    s.profile_name = request["profile_name"].get<std::string>();
    auto profile = profile_by_name(s.profile_name);
    if (!profile) {
      return api_error(400, "UNKNOWN_PROFILE", "unknown profile '" + s.profile_name + "'");
    }
    s.profile = *profile;

    const std::uint64_t u = get_count(request, "universe_size", kDefaultUniverseSize);
    if (u < 2 || u > kMaxUniverse) {
      reject("INVALID_REQUEST", "universe_size must lie in [2, " + std::to_string(kMaxUniverse) + "]");
    }
    s.universe_size = static_cast<std::uint32_t>(u);
    s.p_genuine = get_probability(request, "p_genuine", kDefaultPGenuine);
    s.exploration = get_probability(request, "exploration", kDefaultExploration);

    if (request.contains("strategies")) {
      const json& list = request["strategies"];
      if (!list.is_array() || list.empty()) {
        reject("INVALID_REQUEST", "strategies must be a nonempty array of names");
      }
      for (const json& item : list) {
        if (!item.is_string()) reject("INVALID_REQUEST", "strategy names must be strings");
        auto strategy = strategy_by_name(item.get<std::string>());
        if (!strategy) {
          return api_error(400, "UNKNOWN_STRATEGY",
                           "unknown strategy '" + item.get<std::string>() + "'");
        }
        if (std::find(s.strategies.begin(), s.strategies.end(), *strategy) == s.strategies.end()) {
          s.strategies.push_back(*strategy);
        }
      }
    } else {
      s.strategies = default_strategies();
    }

    if (request.contains("seed")) {
      s.seed = get_count(request, "seed", 0);
    } else {
      std::random_device rd;
      s.seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
    }
    if (request.contains("compromised")) {
      if (!request["compromised"].is_boolean()) reject("INVALID_REQUEST", "compromised must be a boolean");
      s.compromised = request["compromised"].get<bool>();
    }
    s.max_episodes = get_count(request, "max_episodes", 0);
    if (!request.contains("strategies") && !s.compromised) {
      std::erase_if(s.strategies, [](const auto& st) { return st.kind == AttackKind::kSecretThief; });
    }

    for (const auto& strategy : s.strategies) {
      if (strategy.kind == AttackKind::kSecretThief && !s.compromised && s.p_genuine < 1.0) {
        return api_error(400, "ILLEGAL_STRATEGY",
                         "secret_thief needs a compromised secret store");
      }
    }

    std::string id = random_token();
    auto session = std::make_shared<LiveSession>(id, std::move(s));
    json body = {{"session_id", id},
                 {"secret_id", session->store().secret.secret_id},
                 {"universe_size", session->store().universe_size},
                 {"episode", session->episode()}};
    {
      std::lock_guard lock(mu_);
      sessions_.emplace(std::move(id), std::move(session));
    }
    return {201, body};
  } catch (const BadRequest& e) {
    return e.response;
  } catch (const ConfigError& e) {
    return api_error(400, "ILLEGAL_STRATEGY", e.what());
  }
}

std::shared_ptr<LiveSession> SessionService::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

namespace {
ApiResponse not_found(const std::string& id) {
  return api_error(404, "SESSION_NOT_FOUND", "no session '" + id + "'");
}
}  // namespace

ApiResponse SessionService::get_screen(const std::string& id) {
  auto session = find(id);
  if (!session) return not_found(id);
  std::lock_guard lock(session->mu);
  return session->screen();
}

ApiResponse SessionService::post_decision(const std::string& id, const json& request) {
  auto session = find(id);
  if (!session) return not_found(id);
  std::lock_guard lock(session->mu);
  try {
    return session->decide(request);
  } catch (const BadRequest& e) {
    return e.response;
  }
}

ApiResponse SessionService::get_stats(const std::string& id) {
  auto session = find(id);
  if (!session) return not_found(id);
  std::lock_guard lock(session->mu);
  return session->stats();
}

ApiResponse SessionService::get_schema(const std::string& name) const {
  if (name == "scenario") return {200, scenario_schema()};
  for (const auto& known : api_schema_names()) {
    if (known == name) return {200, api_schema(name)};
  }
  return api_error(404, "SCHEMA_NOT_FOUND", "no schema '" + name + "'");
}

std::size_t SessionService::session_count() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

// ---------------------------------------------------------------------------
// HTTP

namespace {

void send(httplib::Response& res, const ApiResponse& api) {
  res.status = api.status;
  res.set_content(api.body.dump(), "application/json");
}

std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded()) {
    send(res, api_error(400, "INVALID_REQUEST", "body is not valid JSON"));
    return std::nullopt;
  }
  return body;
}

}  // namespace

HttpServer::HttpServer(SessionService& service, std::string static_dir)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto& srv = *server_;
  srv.set_payload_max_length(64 * 1024);

  srv.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) send(res, service_.create_session(*body));
  });
  srv.Get(R"(/sessions/([^/]+)/screen)", [this](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.get_screen(req.matches[1]));
  });
  srv.Post(R"(/sessions/([^/]+)/decision)",
           [this](const httplib::Request& req, httplib::Response& res) {
             if (auto body = parse_body(req, res)) {
               send(res, service_.post_decision(req.matches[1], *body));
             }
           });
  srv.Get(R"(/sessions/([^/]+)/stats)", [this](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.get_stats(req.matches[1]));
  });
  srv.Get("/schema/v1", [](const httplib::Request&, httplib::Response& res) {
    json names = json::array();
    for (const auto& n : api_schema_names()) names.push_back("/schema/v1/" + n + ".json");
    names.push_back("/schema/v1/scenario.json");
    send(res, {200, {{"schemas", names}}});
  });
  srv.Get(R"(/schema/v1/([a-z_]+)\.json)", [this](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.get_schema(req.matches[1]));
  });

  if (!static_dir.empty() && !srv.set_mount_point("/", static_dir)) {
    throw ConfigError("static directory not found: " + static_dir);
  }

  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    const bool missing = res.status == 404;
    send(res, api_error(res.status, missing ? "NOT_FOUND" : "INVALID_REQUEST",
                        missing ? "no such route" : "request rejected"));
    return httplib::Server::HandlerResponse::Handled;
  });
  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
    send(res, api_error(500, "INTERNAL", "internal error"));
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_) server_->stop();
}

}  // namespace phishgame
