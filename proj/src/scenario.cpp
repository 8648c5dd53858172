#include "phishgame/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace phishgame {

ScenarioError::ScenarioError(std::string field, int line, const std::string& message)
    : ConfigError((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + field +
                  ": " + message),
      field_(std::move(field)),
      line_(line) {}

namespace {

int line_of(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  return mark.is_null() ? 0 : mark.line + 1;
}

[[noreturn]] void fail(const std::string& field, const YAML::Node& node, const std::string& msg) {
  throw ScenarioError(field, line_of(node), msg);
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& field, const char* expected) {
  if (!node.IsScalar()) fail(field, node, std::string("expected ") + expected);
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(field, node, std::string("expected ") + expected + ", got '" + node.Scalar() + "'");
  }
}

std::uint64_t unsigned_int(const YAML::Node& node, const std::string& field) {
  if (node.IsScalar() && !node.Scalar().empty() && node.Scalar().front() == '-') {
    fail(field, node, "must not be negative");
  }
  return scalar<std::uint64_t>(node, field, "a non-negative integer");
}

std::uint32_t unsigned32(const YAML::Node& node, const std::string& field) {
  const std::uint64_t v = unsigned_int(node, field);
  if (v > UINT32_MAX) fail(field, node, "out of range");
  return static_cast<std::uint32_t>(v);
}

double probability(const YAML::Node& node, const std::string& field) {
  const double p = scalar<double>(node, field, "a number");
  if (!(p >= 0.0 && p <= 1.0)) fail(field, node, "must lie in [0, 1]");
  return p;
}

double finite(const YAML::Node& node, const std::string& field) {
  const double v = scalar<double>(node, field, "a number");
  if (!std::isfinite(v)) fail(field, node, "must be finite");
  return v;
}

std::vector<std::string> name_list(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence() || node.size() == 0) fail(field, node, "expected a nonempty list");
  std::vector<std::string> names;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const std::string item_field = field + "[" + std::to_string(i) + "]";
    auto name = scalar<std::string>(node[i], item_field, "a name");
    if (!seen.insert(name).second) fail(item_field, node[i], "duplicate '" + name + "'");
    names.push_back(std::move(name));
  }
  return names;
}

void parse_attention(const YAML::Node& node, ScenarioConfig& cfg) {
  if (node.IsScalar()) {
    const auto name = node.Scalar();
    auto preset = attention_by_name(name);
    if (!preset) fail("attention", node, "unknown preset '" + name + "'");
    cfg.attention_name = name;
    cfg.attention = *preset;
    return;
  }
  if (!node.IsMap()) fail("attention", node, "expected a preset name or a map");
  std::string preset_name = "full";
  if (node["preset"]) preset_name = scalar<std::string>(node["preset"], "attention.preset", "a name");
  auto preset = attention_by_name(preset_name);
  if (!preset) fail("attention.preset", node["preset"], "unknown preset '" + preset_name + "'");
  AttentionProfile a = *preset;
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    const std::string field = "attention." + key;
    if (key == "preset") continue;
    if (key == "fidelity_penalty") {
      a.fidelity_penalty = probability(kv.second, field);
    } else if (auto kind = signal_kind_by_name(key)) {
      a.set(*kind, probability(kv.second, field));
    } else {
      fail(field, kv.first, "unknown signal kind");
    }
  }
  cfg.attention_name = node.size() == 1 && node["preset"] ? preset_name : "custom";
  cfg.attention = a;
}

void parse_payoffs(const YAML::Node& node, PayoffTable& table) {
  if (!node.IsMap()) fail("payoffs", node, "expected a map");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    const std::string field = "payoffs." + key;
    std::optional<Outcome> outcome;
    for (std::size_t i = 0; i < kOutcomeCount; ++i) {
      if (to_string(static_cast<Outcome>(i)) == key) outcome = static_cast<Outcome>(i);
    }
    if (!outcome) fail(field, kv.first, "unknown outcome");
    const YAML::Node row = kv.second;
    if (!row.IsMap()) fail(field, row, "expected {user, attacker}");
    for (const auto& cell : row) {
      const auto side = cell.first.as<std::string>();
      if (side == "user") {
        table[*outcome].user = finite(cell.second, field + ".user");
      } else if (side == "attacker") {
        table[*outcome].attacker = finite(cell.second, field + ".attacker");
      } else {
        fail(field + "." + side, cell.first, "unknown key");
      }
    }
  }
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "version",     "profile",    "warning_ticks", "universe_size",
      "n",           "seed",       "p_genuine",     "compromised",
      "policies",    "strategies", "attention",     "payoffs",
      "glance_delay_ticks",        "prior_fullscreen_entries"};
  return keys;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError("document", e.mark.is_null() ? 0 : e.mark.line + 1, e.msg);
  }
  if (!root.IsMap()) throw ScenarioError("document", line_of(root), "expected a mapping");

  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (!known_keys().contains(key)) fail(key, kv.first, "unknown field");
  }

  ScenarioConfig cfg;
  if (!root["version"]) throw ScenarioError("version", 0, "missing required field");
  cfg.version = scalar<int>(root["version"], "version", "an integer");
  if (cfg.version != kScenarioVersion) {
    fail("version", root["version"], "unsupported version " + std::to_string(cfg.version));
  }

  std::uint32_t warning_ticks = kDefaultWarningTicks;
  if (const auto n = root["warning_ticks"]) {
    warning_ticks = unsigned32(n, "warning_ticks");
    if (warning_ticks == 0) fail("warning_ticks", n, "must be at least 1");
  }
  if (const auto n = root["profile"]) cfg.profile_name = scalar<std::string>(n, "profile", "a name");
  if (cfg.profile_name == "chrome") {
    cfg.profile = chrome_like_profile(warning_ticks);
  } else if (cfg.profile_name == "firefox") {
    cfg.profile = firefox_like_profile(warning_ticks);
  } else if (cfg.profile_name == "edge") {
    cfg.profile = edge_like_profile();
  } else {
    fail("profile", root["profile"], "unknown profile '" + cfg.profile_name + "'");
  }

  if (const auto n = root["universe_size"]) {
    cfg.universe_size = unsigned32(n, "universe_size");
    if (cfg.universe_size < 2) fail("universe_size", n, "must be at least 2");
  }
  if (const auto n = root["n"]) {
    cfg.n = unsigned_int(n, "n");
    if (cfg.n == 0) fail("n", n, "must be at least 1");
  }
  if (const auto n = root["seed"]) cfg.seed = unsigned_int(n, "seed");
  if (const auto n = root["p_genuine"]) cfg.p_genuine = probability(n, "p_genuine");
  if (const auto n = root["compromised"]) {
    cfg.compromised = scalar<bool>(n, "compromised", "true or false");
  }

  if (const auto n = root["policies"]) {
    cfg.policies.clear();
    const auto names = name_list(n, "policies");
    for (std::size_t i = 0; i < names.size(); ++i) {
      auto kind = policy_kind_by_name(names[i]);
      if (!kind) fail("policies[" + std::to_string(i) + "]", n[i], "unknown policy '" + names[i] + "'");
      cfg.policies.push_back(*kind);
    }
  }
  if (const auto n = root["strategies"]) {
    cfg.strategies.clear();
    const auto names = name_list(n, "strategies");
    for (std::size_t i = 0; i < names.size(); ++i) {
      auto s = strategy_by_name(names[i]);
      if (!s) {
        fail("strategies[" + std::to_string(i) + "]", n[i], "unknown strategy '" + names[i] + "'");
      }
      cfg.strategies.push_back(*s);
    }
  }
  if (const auto n = root["attention"]) parse_attention(n, cfg);
  if (const auto n = root["payoffs"]) parse_payoffs(n, cfg.payoffs);
  if (const auto n = root["glance_delay_ticks"]) {
    cfg.glance_delay_ticks = unsigned32(n, "glance_delay_ticks");
  }
  if (const auto n = root["prior_fullscreen_entries"]) {
    cfg.prior_fullscreen_entries = unsigned32(n, "prior_fullscreen_entries");
  }

  cfg.hash = sha256_hex(text);
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("document", 0, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

EpisodeConfig ScenarioConfig::episode_config() const {
  EpisodeConfig c;
  c.p_genuine = p_genuine;
  c.strategy = strategies.front();
  c.policy = policies.front();
  c.attention = attention;
  c.profile = profile;
  c.universe_size = universe_size;
  c.payoffs = payoffs;
  c.seed = seed;
  c.compromised = compromised;
  c.glance_delay_ticks = glance_delay_ticks;
  c.prior_fullscreen_entries = prior_fullscreen_entries;
  return c;
}

nlohmann::json scenario_schema() {
  using nlohmann::json;
  json policies = json::array();
  for (PolicyKind k : kAllPolicies) policies.push_back(std::string(to_string(k)));
  json strategies = json::array();
  for (const auto& s : default_strategies()) strategies.push_back(strategy_name(s));
  strategies.push_back("fullscreen_counterfeit_crayon");
  json attention_props = {{"preset", {{"enum", {"full", "casual"}}}},
                          {"fidelity_penalty", {{"type", "number"}, {"minimum", 0}, {"maximum", 1}}}};
  for (std::size_t i = 0; i < kSignalKindCount; ++i) {
    attention_props[std::string(to_string(static_cast<SignalKind>(i)))] = {
        {"type", "number"}, {"minimum", 0}, {"maximum", 1}};
  }
  json row = {{"type", "object"},
              {"properties", {{"user", {{"type", "number"}}}, {"attacker", {{"type", "number"}}}}},
              {"additionalProperties", false}};
  json payoff_props = json::object();
  for (std::size_t i = 0; i < kOutcomeCount; ++i) {
    payoff_props[std::string(to_string(static_cast<Outcome>(i)))] = row;
  }
  auto count = [](int min) { return json{{"type", "integer"}, {"minimum", min}}; };
  return {
      {"$schema", "https://json-schema.org/draft/2020-12/schema"},
      {"$id", "/schema/v1/scenario.json"},
      {"type", "object"},
      {"required", {"version"}},
      {"additionalProperties", false},
      {"properties",
       {{"version", {{"const", kScenarioVersion}}},
        {"profile", {{"enum", {"chrome", "firefox", "edge"}}}},
        {"warning_ticks", count(1)},
        {"universe_size", count(2)},
        {"n", count(1)},
        {"seed", count(0)},
        {"p_genuine", {{"type", "number"}, {"minimum", 0}, {"maximum", 1}}},
        {"compromised", {{"type", "boolean"}}},
        {"policies",
         {{"type", "array"}, {"minItems", 1}, {"uniqueItems", true}, {"items", {{"enum", policies}}}}},
        {"strategies",
         {{"type", "array"}, {"minItems", 1}, {"uniqueItems", true}, {"items", {{"enum", strategies}}}}},
        {"attention",
         {{"oneOf",
           {{{"enum", {"full", "casual"}}},
            {{"type", "object"}, {"properties", attention_props}, {"additionalProperties", false}}}}}},
        {"payoffs",
         {{"type", "object"}, {"properties", payoff_props}, {"additionalProperties", false}}},
        {"glance_delay_ticks", count(0)},
        {"prior_fullscreen_entries", count(0)}}}};
}

}  // namespace phishgame
