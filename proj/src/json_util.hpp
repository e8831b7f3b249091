#pragma once

#include <initializer_list>
#include <stdexcept>
#include <string>

#include <json.hpp>

// Internal helpers for strict JSON document parsing: unknown keys are
// rejected and every error message carries the JSON path to the problem.
namespace osiris::detail {

using nlohmann::json;

[[noreturn]] inline void fail_at(const std::string& path, const std::string& msg) {
  throw std::invalid_argument(path + ": " + msg);
}

inline void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail_at(path, "expected an object");
}

inline void check_allowed_keys(const json& obj, const std::string& path,
                               std::initializer_list<const char*> allowed) {
  require_object(obj, path);
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : allowed) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) fail_at(path + "." + key, "unknown field");
  }
}

inline const json& require_field(const json& obj, const std::string& path, const char* key) {
  require_object(obj, path);
  auto it = obj.find(key);
  if (it == obj.end()) fail_at(path + "." + key, "missing required field");
  return *it;
}

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail_at(path, "expected a number");
  return j.get<double>();
}

inline int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail_at(path, "expected an integer");
  return j.get<int>();
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail_at(path, "expected a string");
  return j.get<std::string>();
}

inline bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail_at(path, "expected a boolean");
  return j.get<bool>();
}

inline const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) fail_at(path, "expected an array");
  return j;
}

inline json parse_document(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw std::invalid_argument(what + ": malformed JSON");
  return j;
}

}  // namespace osiris::detail
