#include "phishgame/view.hpp"

#include <stdexcept>

namespace phishgame {

using nlohmann::json;

json to_json(const IdentityCredentials& identity) {
  return {{"subject_name", identity.subject_name},
          {"organization", identity.organization},
          {"jurisdiction", identity.jurisdiction}};
}

namespace {

struct Composition {
  json dialogs = json::array();
  json popups = json::array();
  json descriptors = json::array();
  bool login_form = false;
  bool visited_link_styling = false;
  json interstitial = nullptr;
};

void compose(const std::vector<Surface>& surfaces, const std::string& container,
             Composition& out) {
  for (const Surface& s : surfaces) {
    if (const auto* page = std::get_if<PageContent>(&s.content)) {
      out.descriptors.push_back(page->descriptor);
    } else if (std::holds_alternative<LoginFormInPage>(s.content)) {
      out.login_form = true;
    } else if (const auto* fake = std::get_if<FakeDialogImage>(&s.content)) {
      out.dialogs.push_back({{"container", container},
                             {"identity", to_json(fake->identity)},
                             {"trent_display_name", fake->trent_display_name},
                             {"secret_image_id", fake->shown_secret_id},
                             {"window_icon", FakeDialogImage::has_window_icon}});
    } else if (const auto* links = std::get_if<VisitedLinkStyling>(&s.content)) {
      (void)links;
      out.visited_link_styling = true;
    } else if (const auto* popup = std::get_if<PopupWindow>(&s.content)) {
      out.popups.push_back({{"address_bar", popup->address_bar}});
      compose(popup->embedded, "popup", out);
    } else if (const auto* desktop = std::get_if<CounterfeitDesktop>(&s.content)) {
      // Outside fullscreen a painted desktop is just a picture in the page.
      compose(desktop->embedded, container, out);
    } else if (const auto* stop = std::get_if<VerificationInterstitial>(&s.content)) {
      out.interstitial = stop->reason;
    }
  }
}

json certificate_view(const std::optional<IdentityCredentials>& identity,
                      const std::optional<std::string>& trent) {
  if (!identity) return nullptr;
  return {{"identity", to_json(*identity)}, {"trent_display_name", trent.value_or("")}};
}

}  // namespace

json screen_view(const ScreenState& screen) {
  const CounterfeitDesktop* cover = nullptr;
  std::size_t cover_index = 0;
  if (screen.fullscreen) {
    for (std::size_t i = 0; i < screen.canvas.size(); ++i) {
      if (const auto* d = std::get_if<CounterfeitDesktop>(&screen.canvas[i].content)) {
        cover = d;
        cover_index = i;
      }
    }
  }

  Composition comp;
  json browser_bar;
  json taskbar;
  std::string chrome_style = "native";
  bool greyed = screen.greyed;

  if (screen.modal) {
    comp.dialogs.push_back({{"container", "screen"},
                            {"identity", to_json(screen.modal->identity())},
                            {"trent_display_name", screen.modal->trent_display_name()},
                            {"secret_image_id", screen.modal->secret().secret_id},
                            {"window_icon", TrustedDialog::has_window_icon}});
  }

  if (cover != nullptr) {
    // The page owns every pixel; what it painted is what the user sees.
    const CounterfeitChrome& fake = cover->chrome;
    browser_bar = {{"visible", true},
                   {"address", fake.address},
                   {"padlock", fake.padlock},
                   {"green_bar", fake.green_bar},
                   {"certificate",
                    certificate_view(fake.certificate_identity,
                                     fake.certificate_identity
                                         ? std::optional<std::string>(fake.certificate_trent)
                                         : std::nullopt)}};
    taskbar = {{"visible", true}, {"window_icons", 1}};
    chrome_style = cover->fidelity == Fidelity::kCrayon ? "crayon" : "native";
    greyed = greyed || cover->greyed;
    compose(cover->embedded, "screen", comp);
    compose(std::vector<Surface>(screen.canvas.begin() + static_cast<std::ptrdiff_t>(cover_index) + 1,
                                 screen.canvas.end()),
            "screen", comp);
  } else {
    const ChromeBar& bar = screen.chrome_bar;
    browser_bar = {{"visible", !screen.fullscreen},
                   {"address", bar.address},
                   {"padlock", bar.padlock},
                   {"green_bar", bar.green_bar},
                   {"certificate", certificate_view(bar.certificate_identity, bar.certificate_trent)}};
    taskbar = {{"visible", screen.os_chrome.taskbar_visible},
               {"window_icons", screen.os_chrome.window_icons}};
    compose(screen.canvas, "screen", comp);
  }

  // A greyed screen blanks everything behind the dialog.
  if (greyed) {
    comp.descriptors = json::array();
    comp.login_form = false;
    comp.visited_link_styling = false;
  }

  json warning = nullptr;
  if (screen.warning) {
    json expires = nullptr;
    if (screen.warning->expires_at) {
      const Tick at = *screen.warning->expires_at;
      expires = at > screen.now ? at - screen.now : 0;
    }
    warning = {{"style", to_string(screen.warning->style)}, {"expires_in_ticks", expires}};
  }

  return {{"schema_version", kSchemaVersion},
          {"tick", screen.now},
          {"chrome_style", chrome_style},
          {"browser_bar", browser_bar},
          {"taskbar", taskbar},
          {"greyed", greyed},
          {"warning", warning},
          {"page",
           {{"descriptors", comp.descriptors},
            {"login_form", comp.login_form},
            {"visited_link_styling", comp.visited_link_styling},
            {"interstitial", comp.interstitial}}},
          {"dialogs", comp.dialogs},
          {"popups", comp.popups}};
}

// ---------------------------------------------------------------------------
// Schemas

namespace {

json object(json properties, bool all_required = true) {
  json required = json::array();
  if (all_required) {
    for (const auto& [key, _] : properties.items()) required.push_back(key);
  }
  return {{"type", "object"},
          {"properties", std::move(properties)},
          {"required", std::move(required)},
          {"additionalProperties", false}};
}

json type(const char* t) { return {{"type", t}}; }
json nullable(const char* t) { return {{"type", json::array({t, "null"})}}; }
json count() { return {{"type", "integer"}, {"minimum", 0}}; }
json probability() { return {{"type", "number"}, {"minimum", 0}, {"maximum", 1}}; }
json one_of(std::initializer_list<const char*> values) {
  json e = json::array();
  for (const char* v : values) e.push_back(v);
  return {{"type", "string"}, {"enum", e}};
}

json identity_schema() {
  return object({{"subject_name", type("string")},
                 {"organization", type("string")},
                 {"jurisdiction", type("string")}});
}

json screen_schema() {
  json certificate = object({{"identity", identity_schema()},
                             {"trent_display_name", type("string")}});
  certificate["type"] = json::array({"object", "null"});
  json warning = object({{"style", one_of({"transient", "persistent"})},
                         {"expires_in_ticks", {{"type", json::array({"integer", "null"})},
                                               {"minimum", 0}}}});
  warning["type"] = json::array({"object", "null"});
  json dialog = object({{"container", one_of({"screen", "popup"})},
                        {"identity", identity_schema()},
                        {"trent_display_name", type("string")},
                        {"secret_image_id", count()},
                        {"window_icon", type("boolean")}});
  json schema = object(
      {{"schema_version", one_of({"v1"})},
       {"tick", count()},
       {"chrome_style", one_of({"native", "crayon"})},
       {"browser_bar", object({{"visible", type("boolean")},
                               {"address", type("string")},
                               {"padlock", type("boolean")},
                               {"green_bar", type("boolean")},
                               {"certificate", certificate}})},
       {"taskbar", object({{"visible", type("boolean")}, {"window_icons", count()}})},
       {"greyed", type("boolean")},
       {"warning", warning},
       {"page", object({{"descriptors", {{"type", "array"}, {"items", type("string")}}},
                        {"login_form", type("boolean")},
                        {"visited_link_styling", type("boolean")},
                        {"interstitial", nullable("string")}})},
       {"dialogs", {{"type", "array"}, {"items", dialog}}},
       {"popups", {{"type", "array"}, {"items", object({{"address_bar", type("string")}})}}}});
  return schema;
}

json score_schema() {
  return object({{"human_points", type("number")},
                 {"attacker_points", type("number")},
                 {"episodes_played", count()}});
}

json payoff_schema() { return object({{"user", type("number")}, {"attacker", type("number")}}); }

}  // namespace

std::vector<std::string> api_schema_names() {
  return {"screen",           "screen_response",   "create_session_request",
          "create_session_response", "decision_request", "decision_response",
          "stats_response",   "error"};
}

json api_schema(const std::string& name) {
  json schema;
  if (name == "screen") {
    schema = screen_schema();
  } else if (name == "screen_response") {
    schema = object({{"episode", count()}, {"screen", screen_schema()}});
  } else if (name == "create_session_request") {
    schema = object({{"profile_name", one_of({"chrome", "firefox", "edge"})},
                     {"universe_size", {{"type", "integer"}, {"minimum", 2}}},
                     {"p_genuine", probability()},
                     {"strategies", {{"type", "array"}, {"items", type("string")}, {"minItems", 1}}},
                     {"exploration", probability()},
                     {"seed", count()},
                     {"compromised", type("boolean")},
                     {"max_episodes", count()}},
                    false);
    schema["required"] = json::array({"profile_name"});
  } else if (name == "create_session_response") {
    schema = object({{"session_id", type("string")},
                     {"secret_id", count()},
                     {"universe_size", count()},
                     {"episode", count()}});
  } else if (name == "decision_request") {
    schema = object({{"decision", one_of({"enter_credentials", "back_away"})},
                     {"episode", count()}},
                    false);
    schema["required"] = json::array({"decision"});
  } else if (name == "decision_response") {
    schema = object(
        {{"episode", count()},
         {"decision", one_of({"enter_credentials", "back_away"})},
         {"reveal", object({{"world", one_of({"genuine", "phish"})},
                            {"strategy", nullable("string")},
                            {"secret_id", count()},
                            {"revealing_signals", {{"type", "array"}, {"items", type("string")}}}})},
         {"outcome", one_of({"credentials_to_mallory", "credentials_to_bob", "backaway_from_bob",
                             "backaway_from_mallory"})},
         {"credentials_captured", type("boolean")},
         {"payoffs", payoff_schema()},
         {"score", score_schema()},
         {"next_episode_ready", type("boolean")}});
  } else if (name == "stats_response") {
    json outcomes = object({{"credentials_to_mallory", count()},
                            {"credentials_to_bob", count()},
                            {"backaway_from_bob", count()},
                            {"backaway_from_mallory", count()}});
    json record = object({{"strategy", type("string")}, {"success", type("boolean")}});
    json per_strategy = object({{"strategy", type("string")},
                                {"attempts", count()},
                                {"successes", count()},
                                {"smoothed_rate", probability()}});
    schema = object({{"n", count()},
                     {"n_genuine", count()},
                     {"n_phish", count()},
                     {"accepted_genuine", count()},
                     {"accepted_phish", count()},
                     {"captured", count()},
                     {"outcomes", outcomes},
                     {"attack_success_rate", probability()},
                     {"accept_given_genuine", probability()},
                     {"accept_given_phish", probability()},
                     {"wilson_low", probability()},
                     {"wilson_high", probability()},
                     {"mean_user_payoff", type("number")},
                     {"mean_attacker_payoff", type("number")},
                     {"history", {{"type", "array"}, {"items", record}}},
                     {"per_strategy", {{"type", "array"}, {"items", per_strategy}}},
                     {"score", score_schema()}});
  } else if (name == "error") {
    schema = object({{"code", type("string")}, {"message", type("string")}});
  } else {
    throw std::out_of_range("no schema named " + name);
  }
  schema["$schema"] = "https://json-schema.org/draft/2020-12/schema";
  schema["$id"] = "/schema/v1/" + name + ".json";
  return schema;
}

}  // namespace phishgame
