#pragma once

#include "hmsbench/control/types.hpp"
#include "hmsbench/emulation/sim_event.hpp"
#include "hmsbench/il/message.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hmsbench::il {

// Payload builders and readers for the IL1 message kinds. Readers throw
// ValidationError on malformed bodies.

std::string notification_corr(std::uint64_t round);
std::string directive_corr(std::uint64_t round, std::size_t index);

InterfaceMessage make_batch(std::uint64_t round, Tick time,
                            std::span<const emulation::SimEvent> events);
std::vector<emulation::SimEvent> batch_events(const InterfaceMessage& message);

InterfaceMessage make_command(std::uint64_t round, Tick time, const std::string& corr,
                              const control::ControlCommand& command);
control::ControlCommand command_of(const InterfaceMessage& message);

InterfaceMessage make_directive(std::uint64_t round, Tick time, const std::string& corr,
                                const control::ControlDirective& directive);
control::ControlDirective directive_of(const InterfaceMessage& message);

InterfaceMessage make_ack(std::uint64_t round, Tick time, const std::string& corr,
                          const control::DirectiveAck& ack);
control::DirectiveAck ack_of(const InterfaceMessage& message);

InterfaceMessage make_session(std::string kind, std::uint64_t round, Tick time, json body);

} // namespace hmsbench::il
