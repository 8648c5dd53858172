// phishgame: matrix evaluation, episode traces, capability fuzzing, and the
// game server.
//
// Exit codes: 0 ok, 1 runtime failure, 2 usage or config error, 3 the fuzzer
// found a violation.

#include <csignal>
#include <filesystem>
#include <iostream>
#include <pthread.h>
#include <thread>

#include "CLI11.hpp"

#include "phishgame/attacks.hpp"
#include "phishgame/game.hpp"
#include "phishgame/report.hpp"
#include "phishgame/scenario.hpp"
#include "phishgame/service.hpp"
#include "phishgame/view.hpp"

namespace fs = std::filesystem;
using namespace phishgame;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitViolation = 3;

int run_matrix(const std::string& config_path, const std::string& out_dir, unsigned threads) {
  const ScenarioConfig cfg = load_scenario(config_path);
  EpisodeConfig base = cfg.episode_config();
  BatchOptions opts;
  opts.threads = threads;
  const Matrix m = evaluate_matrix(base, cfg.strategies, cfg.policies, cfg.n, opts);

  fs::create_directories(out_dir);
  write_file_atomic((fs::path(out_dir) / "matrix.json").string(), matrix_json(m, cfg).dump(2) + "\n");
  write_file_atomic((fs::path(out_dir) / "matrix.csv").string(), matrix_csv(m, cfg));
  std::cout << "wrote " << m.cells.size() << " cells to " << out_dir << "\n";
  return 0;
}

int run_episode_cmd(const std::string& config_path, std::optional<std::uint64_t> seed,
                    const std::string& strategy, const std::string& policy, bool trace,
                    const std::string& out) {
  ScenarioConfig cfg = load_scenario(config_path);
  if (seed) cfg.seed = *seed;
  EpisodeConfig c = cfg.episode_config();
  if (!strategy.empty()) {
    auto s = strategy_by_name(strategy);
    if (!s) throw ScenarioError("--strategy", 0, "unknown strategy '" + strategy + "'");
    c.strategy = *s;
  }
  if (!policy.empty()) {
    auto p = policy_kind_by_name(policy);
    if (!p) throw ScenarioError("--policy", 0, "unknown policy '" + policy + "'");
    c.policy = *p;
  }
  const EpisodeTranscript t = run_episode(c);
  std::string text;
  if (trace) {
    text = format_trace(t, cfg);
  } else {
    nlohmann::json j = transcript_json(t);
    j["config_hash"] = cfg.hash;
    j["base_seed"] = cfg.seed;
    text = j.dump(2) + "\n";
  }
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file_atomic(out, text);
  }
  return 0;
}

int run_fuzz(std::uint64_t actions, std::uint64_t seed, std::uint32_t max_steps,
             std::uint32_t universe) {
  FuzzOptions opts;
  opts.sequences = actions;
  opts.seed = seed;
  opts.max_steps = max_steps;
  opts.universe_size = universe;
  const FuzzReport r = run_capability_fuzz(opts);
  nlohmann::json j = {{"sequences", r.sequences},
                      {"steps", r.steps},
                      {"refused_steps", r.refused_steps},
                      {"trusted_dialogs", r.trusted_dialogs},
                      {"secret_leaks", r.secret_leaks},
                      {"guess_collisions", r.guess_collisions},
                      {"overlay_mismatches", r.overlay_mismatches},
                      {"accounting_errors", r.accounting_errors},
                      {"store_mutations", r.store_mutations},
                      {"violations", r.violations},
                      {"base_seed", seed},
                      {"clean", r.clean()}};
  std::cout << j.dump(2) << "\n";
  return r.clean() ? 0 : kExitViolation;
}

int run_serve(const std::string& host, int port, const std::string& static_dir) {
  // Signals go to a waiter thread, not to whichever thread httplib is on.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  SessionService service;
  HttpServer server(service, static_dir);
  const int bound = server.bind(host, port);
  if (bound < 0) {
    std::cerr << "error: cannot bind " << host << ":" << port << "\n";
    return kExitRuntime;
  }
  std::cout << "listening on http://" << host << ":" << bound << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
  });
  const bool ok = server.listen();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return ok ? 0 : kExitRuntime;
}

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v != nullptr && *v != '\0' ? v : fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phishing game simulator: screening matrices, traces, fuzzing, game server"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir = env_or("PHISHGAME_OUT_DIR", ".");
  unsigned threads = 0;
  auto* matrix = app.add_subcommand("matrix", "Evaluate every strategy against every policy");
  matrix->add_option("--config", config, "Scenario YAML")->required()->check(CLI::ExistingFile);
  matrix->add_option("--out", out_dir, "Output directory (env PHISHGAME_OUT_DIR)");
  matrix->add_option("--threads", threads, "Worker threads, 0 for all cores");

  std::optional<std::uint64_t> episode_seed;
  std::string strategy;
  std::string policy;
  bool trace = false;
  std::string episode_out;
  auto* episode = app.add_subcommand("episode", "Run one episode and print its transcript");
  episode->add_option("--config", config, "Scenario YAML")->required()->check(CLI::ExistingFile);
  episode->add_option("--seed", episode_seed, "Episode seed (default: the config's)");
  episode->add_option("--strategy", strategy, "Override the config's first strategy");
  episode->add_option("--policy", policy, "Override the config's first policy");
  episode->add_flag("--trace", trace, "Human-readable trace instead of JSON");
  episode->add_option("--out", episode_out, "Write to a file instead of stdout");

  std::uint64_t actions = 10'000;
  std::uint64_t fuzz_seed = 1;
  std::uint32_t max_steps = 16;
  std::uint32_t universe = kDefaultUniverseSize;
  auto* fuzz = app.add_subcommand("fuzz", "Random attacker action sequences; exit 3 on a violation");
  fuzz->add_option("--actions", actions, "Number of action sequences")->check(CLI::PositiveNumber);
  fuzz->add_option("--seed", fuzz_seed, "Base seed");
  fuzz->add_option("--max-steps", max_steps, "Longest sequence")->check(CLI::PositiveNumber);
  fuzz->add_option("--universe-size", universe, "Secret universe size")->check(CLI::Range(2u, 1u << 20));

  int port = 8080;
  std::string host = "127.0.0.1";
  std::string static_dir;
  auto* serve = app.add_subcommand("serve", "HTTP+JSON game server");
  serve->add_option("--port", port, "Port (env PHISHGAME_PORT)")
      ->envname("PHISHGAME_PORT")
      ->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--static", static_dir, "UI bundle to serve at /")->check(CLI::ExistingDirectory);

  std::string schema_name = "scenario";
  auto* schema = app.add_subcommand("schema", "Print a published JSON schema");
  schema->add_option("name", schema_name, "scenario, screen, decision_response, ...");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*matrix) return run_matrix(config, out_dir, threads);
    if (*episode) return run_episode_cmd(config, episode_seed, strategy, policy, trace, episode_out);
    if (*fuzz) return run_fuzz(actions, fuzz_seed, max_steps, universe);
    if (*serve) return run_serve(host, port, static_dir);
    if (*schema) {
      SessionService service;
      const ApiResponse r = service.get_schema(schema_name);
      if (r.status != 200) {
        std::cerr << "error: " << r.body["message"].get<std::string>() << "\n";
        return kExitUsage;
      }
      std::cout << r.body.dump(2) << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
