// Shared test helpers: an independent certificate encoder and a strict
// validator for the JSON Schema subset the service publishes.

#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "phishgame/pki.hpp"

namespace testing_support {

inline void put_text(std::vector<std::uint8_t>& out, const std::string& s) {
  const auto n = static_cast<std::uint32_t>(s.size());
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(n >> shift));
  out.insert(out.end(), s.begin(), s.end());
}

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

/// Written from the encoding rules, not from canonical_encode().
inline std::vector<std::uint8_t> oracle_encode(const phishgame::CertificatePayload& p) {
  std::vector<std::uint8_t> out;
  put_text(out, p.subject.subject_name);
  put_text(out, p.subject.organization);
  put_text(out, p.subject.jurisdiction);
  put_text(out, p.trent_name);
  put_u64(out, p.serial);
  put_u64(out, p.not_before);
  put_u64(out, p.not_after);
  put_u64(out, p.wants_login_dialog ? 1 : 0);
  return out;
}

/// Parses the encoding back. Throws std::runtime_error on trailing or
/// missing bytes.
inline phishgame::CertificatePayload oracle_decode(const std::vector<std::uint8_t>& in) {
  std::size_t pos = 0;
  auto need = [&](std::size_t n) {
    if (pos + n > in.size()) throw std::runtime_error("truncated");
  };
  auto text = [&] {
    need(4);
    std::uint32_t n = 0;
    for (int i = 0; i < 4; ++i) n = (n << 8) | in[pos++];
    need(n);
    std::string s(in.begin() + static_cast<std::ptrdiff_t>(pos),
                  in.begin() + static_cast<std::ptrdiff_t>(pos + n));
    pos += n;
    return s;
  };
  auto u64 = [&] {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | in[pos++];
    return v;
  };
  phishgame::CertificatePayload p;
  p.subject.subject_name = text();
  p.subject.organization = text();
  p.subject.jurisdiction = text();
  p.trent_name = text();
  p.serial = u64();
  p.not_before = u64();
  p.not_after = u64();
  const std::uint64_t flag = u64();
  if (flag > 1) throw std::runtime_error("flag not 0/1");
  p.wants_login_dialog = flag == 1;
  if (pos != in.size()) throw std::runtime_error("trailing bytes");
  return p;
}

/// Validates `value` against the subset of JSON Schema used here: type
/// (string or list), properties, required, additionalProperties: false,
/// items, enum, const, minimum, maximum, minItems, oneOf. Unknown keywords
/// fail loudly so the oracle never silently accepts. Returns "" when valid,
/// otherwise the first error with its JSON pointer.
inline std::string validate_schema(const nlohmann::json& schema, const nlohmann::json& value,
                                   const std::string& path = "") {
  using nlohmann::json;
  static const std::set<std::string> known = {
      "$schema", "$id",     "type",    "properties", "required", "additionalProperties",
      "items",   "enum",    "const",   "minimum",    "maximum",  "minItems",
      "uniqueItems", "oneOf"};
  for (const auto& [k, _] : schema.items()) {
    if (!known.contains(k)) return path + ": unsupported keyword " + k;
  }
  const std::string where = path.empty() ? "/" : path;

  auto type_ok = [&](const std::string& t) {
    if (t == "object") return value.is_object();
    if (t == "array") return value.is_array();
    if (t == "string") return value.is_string();
    if (t == "boolean") return value.is_boolean();
    if (t == "null") return value.is_null();
    if (t == "integer") return value.is_number_integer();
    if (t == "number") return value.is_number();
    return false;
  };
  if (schema.contains("type")) {
    const json& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = type_ok(t.get<std::string>());
    } else {
      for (const auto& each : t) ok = ok || type_ok(each.get<std::string>());
    }
    if (!ok) return where + ": expected type " + t.dump() + ", got " + value.dump();
  }
  if (schema.contains("oneOf")) {
    int matches = 0;
    for (const auto& option : schema["oneOf"]) {
      if (validate_schema(option, value, path).empty()) ++matches;
    }
    if (matches != 1) return where + ": matches " + std::to_string(matches) + " oneOf branches";
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& e : schema["enum"]) found = found || e == value;
    if (!found) return where + ": " + value.dump() + " not in enum";
  }
  if (schema.contains("const") && schema["const"] != value) {
    return where + ": expected " + schema["const"].dump();
  }
  if (value.is_number()) {
    if (schema.contains("minimum") && value.get<double>() < schema["minimum"].get<double>()) {
      return where + ": below minimum";
    }
    if (schema.contains("maximum") && value.get<double>() > schema["maximum"].get<double>()) {
      return where + ": above maximum";
    }
  }
  if (value.is_object()) {
    const json props = schema.value("properties", json::object());
    if (schema.contains("required")) {
      for (const auto& r : schema["required"]) {
        if (!value.contains(r.get<std::string>())) return where + ": missing " + r.get<std::string>();
      }
    }
    for (const auto& [k, v] : value.items()) {
      if (props.contains(k)) {
        auto err = validate_schema(props[k], v, path + "/" + k);
        if (!err.empty()) return err;
      } else if (schema.value("additionalProperties", true) == false) {
        return where + ": unexpected key " + k;
      }
    }
  }
  if (value.is_array()) {
    if (schema.contains("minItems") && value.size() < schema["minItems"].get<std::size_t>()) {
      return where + ": too few items";
    }
    if (schema.contains("items")) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        auto err = validate_schema(schema["items"], value[i], path + "/" + std::to_string(i));
        if (!err.empty()) return err;
      }
    }
  }
  return "";
}

/// All key paths in a JSON document, array indices collapsed to "*".
inline void key_paths(const nlohmann::json& j, const std::string& prefix, std::set<std::string>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      out.insert(prefix + "/" + k);
      key_paths(v, prefix + "/" + k, out);
    }
  } else if (j.is_array()) {
    for (const auto& v : j) key_paths(v, prefix + "/*", out);
  }
}

}  // namespace testing_support
