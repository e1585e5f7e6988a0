#pragma once

#include "hmsbench/common/types.hpp"
#include "hmsbench/emulation/sim_event.hpp"
#include "hmsbench/il/message.hpp"

#include <cstdint>
#include <string>
#include <variant>

namespace hmsbench::il {

/// Free-form control observation (FLOW2).
struct ControlDataPoint {
  std::string name;
  std::string subject;
  double value = 0.0;

  bool operator==(const ControlDataPoint&) const = default;
};

/// Named control-side KPI (FLOW7).
struct Metric {
  std::string name;
  double value = 0.0;

  bool operator==(const Metric&) const = default;
};

/// Record delivered to the KPI engine. `seq` orders records within a tag;
/// for FLOW1 it is the event sequence number.
struct TaggedRecord {
  StreamTag tag = StreamTag::Flow1;
  Tick time = 0;
  std::uint64_t seq = 0;
  std::variant<emulation::SimEvent, ControlDataPoint, Metric> payload;

  bool operator==(const TaggedRecord&) const = default;
};

/// Consumer of tapped streams.
class TapSink {
public:
  virtual ~TapSink() = default;
  virtual void ingest(const TaggedRecord& record) = 0;
};

/// Tap message for FLOW1/FLOW2/FLOW7 records; throws for other tags.
InterfaceMessage make_tap(std::uint64_t round, const std::string& corr, const TaggedRecord& record);
TaggedRecord tap_record(const InterfaceMessage& message);

} // namespace hmsbench::il
