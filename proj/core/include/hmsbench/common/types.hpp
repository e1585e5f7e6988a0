#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hmsbench {

/// Simulation time in integer ticks. The tick carries no physical unit.
using Tick = std::int64_t;

/// Interface Layer protocol version exchanged during the handshake.
inline constexpr const char* kProtocolVersion = "1";

/// Harness version stamped into suite manifests.
inline constexpr const char* kHarnessVersion = "0.1.0";

/// Raised when an input document fails validation. `field()` names the
/// offending location, e.g. "machines[1].id".
class ValidationError : public std::runtime_error {
public:
  ValidationError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

} // namespace hmsbench
