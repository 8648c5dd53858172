#include <filesystem>
#include <fstream>
#include <unistd.h>

#include <gtest/gtest.h>

#include "phishgame/report.hpp"
#include "phishgame/scenario.hpp"
#include "support.hpp"

namespace phishgame {
namespace {

namespace fs = std::filesystem;

ScenarioError parse_error(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e;
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return ScenarioError("", 0, "");
}

TEST(ScenarioTest, MinimalDocumentTakesDefaults) {
  const auto cfg = parse_scenario("version: 1\n");
  EXPECT_EQ(cfg.profile_name, "chrome");
  EXPECT_EQ(cfg.universe_size, 128u);
  EXPECT_EQ(cfg.policies.size(), 5u);
  EXPECT_EQ(cfg.strategies.size(), 7u);
  EXPECT_EQ(cfg.hash, sha256_hex("version: 1\n"));
}

TEST(ScenarioTest, FullDocument) {
  const auto cfg = parse_scenario(R"(version: 1
profile: edge
universe_size: 64
n: 50
seed: 9
p_genuine: 0.25
compromised: true
policies: [warning_sensitive]
strategies: [fullscreen_counterfeit_crayon, secret_thief]
attention: {preset: casual, fullscreen_warning: 0.9, fidelity_penalty: 0.1}
payoffs:
  backaway_from_bob: {user: -0.5}
glance_delay_ticks: 2
prior_fullscreen_entries: 1
)");
  EXPECT_EQ(cfg.profile_name, "edge");
  EXPECT_TRUE(std::holds_alternative<FirstTimePersistent>(cfg.profile.fullscreen_warning));
  EXPECT_EQ(cfg.universe_size, 64u);
  EXPECT_EQ(cfg.n, 50u);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_DOUBLE_EQ(cfg.p_genuine, 0.25);
  EXPECT_TRUE(cfg.compromised);
  EXPECT_EQ(cfg.policies, std::vector<PolicyKind>{PolicyKind::kWarningSensitive});
  EXPECT_EQ(cfg.strategies[0].fidelity, Fidelity::kCrayon);
  EXPECT_DOUBLE_EQ(cfg.attention.notice(SignalKind::kFullscreenWarning), 0.9);
  EXPECT_DOUBLE_EQ(cfg.attention.notice(SignalKind::kIdentityShown), 0.5);
  EXPECT_DOUBLE_EQ(cfg.attention.fidelity_penalty, 0.1);
  EXPECT_EQ(cfg.attention_name, "custom");
  EXPECT_DOUBLE_EQ(cfg.payoffs[Outcome::kBackawayFromBob].user, -0.5);
  EXPECT_DOUBLE_EQ(cfg.payoffs[Outcome::kBackawayFromBob].attacker, 0.0);
  EXPECT_EQ(cfg.glance_delay_ticks, 2u);
  const auto ec = cfg.episode_config();
  EXPECT_EQ(ec.prior_fullscreen_entries, 1u);
  EXPECT_EQ(ec.policy, PolicyKind::kWarningSensitive);
}

TEST(ScenarioTest, ErrorsCarryLineAndField) {
  struct Case {
    const char* text;
    const char* field;
    int line;
  } cases[] = {
      {"profile: chrome\n", "version", 0},
      {"version: 2\n", "version", 1},
      {"version: 1\nprofile: safari\n", "profile", 2},
      {"version: 1\nuniverse_size: 1\n", "universe_size", 2},
      {"version: 1\nn: -3\n", "n", 2},
      {"version: 1\n\np_genuine: 1.5\n", "p_genuine", 3},
      {"version: 1\npolicies:\n  - oblivious\n  - paranoid\n", "policies[1]", 4},
      {"version: 1\nstrategies: [plain_phish_page, plain_phish_page]\n", "strategies[1]", 2},
      {"version: 1\nstrategies: []\n", "strategies", 2},
      {"version: 1\nattention: sleepy\n", "attention", 2},
      {"version: 1\nattention:\n  telepathy: 0.5\n", "attention.telepathy", 3},
      {"version: 1\npayoffs:\n  jackpot: {user: 1}\n", "payoffs.jackpot", 3},
      {"version: 1\ncolour: blue\n", "colour", 2},
      {"version: 1\nseed: abc\n", "seed", 2},
      {"version: 1\ncompromised: maybe\n", "compromised", 2},
      {"version: 1\nprofile: chrome: x\nn: 3\n", "document", 2},
  };
  for (const auto& c : cases) {
    SCOPED_TRACE(c.text);
    const auto e = parse_error(c.text);
    EXPECT_EQ(e.field(), c.field);
    if (c.line != 0) {
      EXPECT_EQ(e.line(), c.line);
    }
  }
}

TEST(ScenarioTest, BundledDefaultLoadsAndMatchesItsSchema) {
  const auto cfg = load_scenario(PHISHGAME_SOURCE_DIR "/configs/default.yaml");
  EXPECT_EQ(cfg.strategies.size(), 7u);
  EXPECT_EQ(cfg.policies.size(), 5u);
  EXPECT_EQ(cfg.n, 10000u);
}

TEST(ScenarioTest, SchemaAcceptsAGoodDocumentShape) {
  const nlohmann::json doc = {{"version", 1},
                              {"profile", "edge"},
                              {"policies", {"secret_checker"}},
                              {"attention", {{"preset", "casual"}, {"secret_shown", 1.0}}}};
  EXPECT_EQ(testing_support::validate_schema(scenario_schema(), doc), "");
  EXPECT_NE(testing_support::validate_schema(scenario_schema(), {{"profile", "edge"}}), "");
}

TEST(ReportTest, ProvenanceAndShape) {
  auto cfg = parse_scenario("version: 1\nn: 20\nseed: 3\n");
  const Matrix m = evaluate_matrix(cfg.episode_config(), cfg.strategies, cfg.policies, cfg.n);
  const auto j = matrix_json(m, cfg);
  EXPECT_EQ(j["provenance"]["config_hash"], cfg.hash);
  EXPECT_EQ(j["provenance"]["base_seed"], 3);
  EXPECT_EQ(j["cells"].size(), 35u);
  EXPECT_EQ(j["baselines"].size(), 5u);
  const auto csv = matrix_csv(m, cfg);
  EXPECT_EQ(csv.rfind("# config_hash=" + cfg.hash + " base_seed=3\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2 + 40);
}

TEST(ReportTest, AtomicWriteReplacesContents) {
  const fs::path dir = fs::temp_directory_path() / ("phishgame_report_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const auto path = (dir / "out.txt").string();
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  std::ifstream in(path);
  std::string got((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(got, "second");
  EXPECT_EQ(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}), 1);
  fs::remove_all(dir);
}

TEST(ReportTest, TraceMentionsOutcome) {
  auto cfg = parse_scenario("version: 1\nseed: 5\np_genuine: 1\n");
  const auto t = run_episode(cfg.episode_config());
  const auto trace = format_trace(t, cfg);
  EXPECT_NE(trace.find("outcome credentials_to_bob"), std::string::npos);
  EXPECT_NE(trace.find("config " + cfg.hash), std::string::npos);
}

}  // namespace
}  // namespace phishgame
