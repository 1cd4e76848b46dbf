#include "foodvol/schema.hpp"

namespace foodvol {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ValidationError, "schema violation at " + path + ": " + what);
}

bool matches_type(const json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "number") return value.is_number();
  if (type == "integer") return value.is_number_integer();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  return false;
}

void check(const json& schema, const json& value, const std::string& path) {
  if (schema.contains("type")) {
    const std::string type = schema["type"].get<std::string>();
    if (!matches_type(value, type)) {
      fail(path, "expected " + type + ", got " + std::string(value.type_name()));
    }
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& candidate : schema["enum"]) {
      if (candidate == value) {
        found = true;
        break;
      }
    }
    if (!found) fail(path, "value not in enum");
  }
  if (schema.contains("minimum") && value.is_number()) {
    if (value.get<double>() < schema["minimum"].get<double>()) {
      fail(path, "below minimum " + schema["minimum"].dump());
    }
  }
  if (value.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!value.contains(key.get<std::string>())) {
          fail(path, "missing required key '" + key.get<std::string>() + "'");
        }
      }
    }
    if (schema.contains("properties")) {
      for (const auto& [key, sub] : schema["properties"].items()) {
        if (value.contains(key)) check(sub, value[key], path + "/" + key);
      }
    }
  }
  if (value.is_array()) {
    if (schema.contains("minItems") && value.size() < schema["minItems"].get<std::size_t>()) {
      fail(path, "fewer than minItems elements");
    }
    if (schema.contains("maxItems") && value.size() > schema["maxItems"].get<std::size_t>()) {
      fail(path, "more than maxItems elements");
    }
    if (schema.contains("items")) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        check(schema["items"], value[i], path + "/" + std::to_string(i));
      }
    }
  }
}

}  // namespace

void validate_schema(const json& schema, const json& value) {
  check(schema, value, "$");
}

}  // namespace foodvol
