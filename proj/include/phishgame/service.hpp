// Live game sessions for a human playing Alice against an adaptive Mallory.
//
// SessionService speaks JSON in and (status, JSON) out and knows nothing of
// HTTP; HttpServer maps routes onto it and serves the UI bundle.
//
// Nothing returned before a decision names the world type or the strategy.
// Screens go through screen_view() only.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "json.hpp"

#include "phishgame/game.hpp"

namespace httplib {
class Server;
}

namespace phishgame {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

ApiResponse api_error(int status, std::string code, std::string message);

class LiveSession;

class SessionService {
 public:
  SessionService();
  ~SessionService();
  SessionService(const SessionService&) = delete;
  SessionService& operator=(const SessionService&) = delete;

  ApiResponse create_session(const nlohmann::json& request);
  ApiResponse get_screen(const std::string& session_id);
  ApiResponse post_decision(const std::string& session_id, const nlohmann::json& request);
  ApiResponse get_stats(const std::string& session_id);
  /// `name` without the .json suffix; "scenario" is the config schema.
  ApiResponse get_schema(const std::string& name) const;

  std::size_t session_count() const;

 private:
  std::shared_ptr<LiveSession> find(const std::string& id) const;

  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<LiveSession>> sessions_;
};

class HttpServer {
 public:
  /// `static_dir` empty: no static mount.
  HttpServer(SessionService& service, std::string static_dir = {});
  ~HttpServer();

  /// Port 0 picks a free one. Returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  bool listen();
  void stop();

 private:
  SessionService& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace phishgame
