#pragma once

#include <string>
#include <vector>

#include "json.hpp"

// Structural validator for the subset of JSON Schema the shipped report
// schemas use: type (string or array of strings), enum, properties,
// required, additionalProperties: false, and items.

namespace schema_check {

using nlohmann::json;

inline bool type_matches(const std::string& t, const json& v) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "integer") return v.is_number_integer() || v.is_number_unsigned();
    if (t == "number") return v.is_number();
    if (t == "null") return v.is_null();
    return false;
}

inline void validate(const json& schema, const json& value, const std::string& path,
                     std::vector<std::string>& errors) {
    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& candidate : schema["enum"])
            if (candidate == value) { ok = true; break; }
        if (!ok) errors.push_back(path + ": value not allowed by enum");
    }
    if (schema.contains("type")) {
        const json& t = schema["type"];
        bool ok = false;
        if (t.is_string()) {
            ok = type_matches(t.get<std::string>(), value);
        } else {
            for (const auto& ti : t)
                if (type_matches(ti.get<std::string>(), value)) { ok = true; break; }
        }
        if (!ok) {
            errors.push_back(path + ": type mismatch (" + value.type_name() + ")");
            return;
        }
    }
    if (value.is_object()) {
        if (schema.contains("required"))
            for (const auto& r : schema["required"])
                if (!value.contains(r.get<std::string>()))
                    errors.push_back(path + ": missing required '" + r.get<std::string>() + "'");
        const json props = schema.value("properties", json::object());
        const bool closed = schema.contains("additionalProperties") &&
                            schema["additionalProperties"] == json(false);
        for (auto it = value.begin(); it != value.end(); ++it) {
            if (props.contains(it.key()))
                validate(props[it.key()], it.value(), path + "/" + it.key(), errors);
            else if (closed)
                errors.push_back(path + ": unexpected property '" + it.key() + "'");
        }
    }
    if (value.is_array() && schema.contains("items")) {
        std::size_t i = 0;
        for (const auto& el : value)
            validate(schema["items"], el, path + "[" + std::to_string(i++) + "]", errors);
    }
}

inline std::vector<std::string> validate(const json& schema, const json& value) {
    std::vector<std::string> errors;
    validate(schema, value, "$", errors);
    return errors;
}

} // namespace schema_check
