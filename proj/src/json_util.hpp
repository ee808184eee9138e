#pragma once

// Field access for the JSON file formats. Every failure is a DataError
// that names the offending field path.

#include "reassembly/error.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace reassembly::json_util {

using nlohmann::json;

[[noreturn]] inline void schema_error(const std::string& field, const std::string& what) {
    throw DataError(DataError::Kind::Schema, "field '" + field + "': " + what);
}

inline const json& require(const json& obj, const std::string& key, const std::string& path = {}) {
    const std::string field = path.empty() ? key : path + "." + key;
    if (!obj.is_object()) schema_error(path.empty() ? "<root>" : path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) schema_error(field, "missing");
    return *it;
}

template <class T>
T get_as(const json& value, const std::string& field) {
    try {
        if constexpr (std::is_same_v<T, std::string>) {
            if (!value.is_string()) schema_error(field, "expected a string");
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!value.is_boolean()) schema_error(field, "expected a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!value.is_number_integer()) schema_error(field, "expected an integer");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!value.is_number()) schema_error(field, "expected a number");
        }
        return value.get<T>();
    } catch (const json::exception& e) {
        schema_error(field, e.what());
    }
}

template <class T>
T get_field(const json& obj, const std::string& key, const std::string& path = {}) {
    return get_as<T>(require(obj, key, path), path.empty() ? key : path + "." + key);
}

inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(DataError::Kind::Io, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError(DataError::Kind::Parse, path.string() + ": " + e.what());
    }
}

inline void write_json_file(const std::filesystem::path& path, const json& value) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(DataError::Kind::Io, "cannot write " + path.string());
    out << value.dump(2) << '\n';
    if (!out) throw DataError(DataError::Kind::Io, "cannot write " + path.string());
}

}  // namespace reassembly::json_util
