#include "hmsbench/common/json_io.hpp"

#include "hmsbench/common/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hmsbench {

json parse_document(std::string_view text, const std::string& where) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ValidationError(where, std::string("malformed JSON: ") + e.what());
  }
}

json canonicalize(const json& value) {
  switch (value.type()) {
  case json::value_t::object: {
    json out = json::object();
    for (const auto& [key, item] : value.items()) {
      out[key] = canonicalize(item);
    }
    return out;
  }
  case json::value_t::array: {
    json out = json::array();
    for (const auto& item : value) {
      out.push_back(canonicalize(item));
    }
    return out;
  }
  case json::value_t::number_unsigned: {
    const auto u = value.get<std::uint64_t>();
    if (u <= static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      return json(static_cast<std::int64_t>(u));
    }
    return value;
  }
  case json::value_t::number_float: {
    const double d = value.get<double>();
    if (!std::isfinite(d)) {
      throw ValidationError("", "non-finite number cannot be encoded");
    }
    if (std::trunc(d) == d && std::fabs(d) < 9.0e15) {
      return json(static_cast<std::int64_t>(d));
    }
    return value;
  }
  default:
    return value;
  }
}

std::string canonical_dump(const json& value) { return canonicalize(value).dump(); }

const json& require(const json& obj, std::string_view key, const std::string& path) {
  if (!obj.is_object()) {
    throw ValidationError(path, "expected an object");
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError(path.empty() ? std::string(key) : path + "." + std::string(key),
                          "missing required field");
  }
  return *it;
}

std::string require_string(const json& obj, std::string_view key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) {
    throw ValidationError(path.empty() ? std::string(key) : path + "." + std::string(key),
                          "expected a string");
  }
  return v.get<std::string>();
}

std::int64_t require_int(const json& obj, std::string_view key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number_integer()) {
    throw ValidationError(path.empty() ? std::string(key) : path + "." + std::string(key),
                          "expected an integer");
  }
  return v.get<std::int64_t>();
}

void require_keys_exactly(const json& obj, const std::vector<std::string>& keys,
                          const std::string& path) {
  if (!obj.is_object()) {
    throw ValidationError(path, "expected an object");
  }
  for (const auto& key : keys) {
    if (!obj.contains(key)) {
      throw ValidationError(path.empty() ? key : path + "." + key, "missing required field");
    }
  }
  reject_unknown_keys(obj, keys, path);
}

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& path) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ValidationError(path.empty() ? key : path + "." + key, "unknown field");
    }
  }
}

} // namespace hmsbench
