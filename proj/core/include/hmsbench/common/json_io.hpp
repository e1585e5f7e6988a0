#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hmsbench {

using nlohmann::json;

/// Parses `text`, mapping parse failures to ValidationError at `where`.
json parse_document(std::string_view text, const std::string& where);

/// Canonical single-line dump: lexicographic keys (nlohmann's std::map
/// ordering), no whitespace, integral floats folded to integers.
std::string canonical_dump(const json& value);

/// Recursively folds integral doubles into int64 so equal values encode
/// identically.
json canonicalize(const json& value);

// Field accessors that report the dotted path of a bad field.
const json& require(const json& obj, std::string_view key, const std::string& path);
std::string require_string(const json& obj, std::string_view key, const std::string& path);
std::int64_t require_int(const json& obj, std::string_view key, const std::string& path);
void require_keys_exactly(const json& obj, const std::vector<std::string>& keys,
                          const std::string& path);
void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& path);

} // namespace hmsbench
