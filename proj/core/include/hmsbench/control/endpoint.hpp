#pragma once

#include "hmsbench/control/reference_control.hpp"
#include "hmsbench/il/session.hpp"
#include "hmsbench/il/transport.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace hmsbench::control {

/// Control side of an IL session: answers hello, acknowledges directives,
/// and replies to each notification batch with FLOW2 taps, the round's
/// commands and end-of-round.
class ControlEndpoint {
public:
  ControlEndpoint(ReferenceControl& control, il::SessionConfig config);

  /// Reacts to one inbound line; returns the lines to send back. Throws
  /// il::SessionError on a malformed line or a failed handshake.
  std::vector<std::string> handle(std::string_view line);

  /// Serves a whole session over `transport` until "bye" has been sent or
  /// the peer goes away. Returns true when the session ended with bye.
  bool serve(il::Transport& transport);

  bool finished() const { return finished_; }

private:
  ReferenceControl* control_;
  il::SessionConfig config_;
  bool greeted_ = false;
  bool finished_ = false;
};

} // namespace hmsbench::control
