#include "schema_check.hpp"

#include <fstream>
#include <stdexcept>

namespace ttscorpus::fixtures {

using nlohmann::json;

namespace {

bool has_type(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "integer") return v.is_number_integer();
  if (t == "number") return v.is_number();
  throw std::invalid_argument("schema type not supported: " + t);
}

}  // namespace

std::string schema_violation(const json& schema, const json& value, const std::string& where) {
  if (schema.contains("oneOf")) {
    int matches = 0;
    for (const auto& alt : schema["oneOf"]) matches += schema_violation(alt, value, where).empty();
    if (matches != 1) return where + ": matches " + std::to_string(matches) + " oneOf branches";
  }
  if (schema.contains("type")) {
    const json& t = schema["type"];
    bool ok = false;
    if (t.is_array()) {
      for (const auto& x : t) ok = ok || has_type(value, x.get<std::string>());
    } else {
      ok = has_type(value, t.get<std::string>());
    }
    if (!ok) return where + ": expected type " + t.dump();
  }
  if (schema.contains("const") && value != schema["const"]) return where + ": expected " + schema["const"].dump();
  if (schema.contains("enum")) {
    const auto& e = schema["enum"];
    if (std::find(e.begin(), e.end(), value) == e.end()) return where + ": not in enum";
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
    for (const auto& r : schema.value("required", json::array())) {
      if (!value.contains(r.get<std::string>())) return where + ": missing " + r.get<std::string>();
    }
    const json props = schema.value("properties", json::object());
    for (const auto& [k, v] : value.items()) {
      if (props.contains(k)) {
        if (auto err = schema_violation(props[k], v, where + "." + k); !err.empty()) return err;
      } else if (schema.contains("additionalProperties") && schema["additionalProperties"] == false) {
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
        if (auto err = schema_violation(schema["items"], value[i], where + "[" + std::to_string(i) + "]");
            !err.empty()) {
          return err;
        }
      }
    }
  }
  return {};
}

json load_schema(const std::string& name) {
  std::ifstream in(std::string(TTSCORPUS_SCHEMA_DIR) + "/" + name + ".schema.json");
  if (!in) throw std::runtime_error("missing schema " + name);
  return json::parse(in);
}

}  // namespace ttscorpus::fixtures
