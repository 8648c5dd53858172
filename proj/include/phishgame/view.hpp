// What leaves the engine: the screen as the user sees it.
//
// The serialized form describes pixels, not provenance. A realistic
// counterfeit desktop serializes with the same keys as the browser's own
// chrome; nothing says which surfaces came from a sandboxed page.

#pragma once

#include <string>

#include "json.hpp"

#include "phishgame/vmachine.hpp"

namespace phishgame {

inline constexpr const char* kSchemaVersion = "v1";

nlohmann::json to_json(const IdentityCredentials& identity);

/// Screen view, schema "screen" below.
nlohmann::json screen_view(const ScreenState& screen);

/// JSON Schema documents published under /schema/v1/<name>.json:
/// screen, screen_response, create_session_request, create_session_response,
/// decision_request, decision_response, stats_response, error.
nlohmann::json api_schema(const std::string& name);
std::vector<std::string> api_schema_names();

}  // namespace phishgame
