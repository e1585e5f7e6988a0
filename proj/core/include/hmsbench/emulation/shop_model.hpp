#pragma once

#include "hmsbench/common/json_io.hpp"
#include "hmsbench/common/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hmsbench::emulation {

/// A machine sits on the transport node carrying its id and can run each
/// operation kind in `durations` for the listed number of ticks.
struct MachineSpec {
  std::string id;
  std::map<std::string, Tick> durations;

  bool capable(std::string_view op) const { return durations.find(std::string(op)) != durations.end(); }
  bool operator==(const MachineSpec&) const = default;
};

struct TransportEdge {
  std::string from;
  std::string to;
  Tick travel = 0;

  bool operator==(const TransportEdge&) const = default;
};

/// Static description of the shop floor. Holds no clock and no orders, so
/// one document serves every scenario unmodified.
struct ShopModel {
  std::vector<MachineSpec> machines;
  std::vector<std::string> nodes;
  std::vector<TransportEdge> edges;
  int shuttle_count = 0;
  std::string shuttle_home;
  std::string input_node;
  std::string output_node;

  const MachineSpec* find_machine(std::string_view id) const;
  bool has_node(std::string_view id) const;
  bool has_machine_capable(std::string_view op) const;
  /// Shuttle ids are S1..Sn.
  std::vector<std::string> shuttle_ids() const;

  bool operator==(const ShopModel&) const = default;
};

/// Parses and validates a model document. Throws ValidationError naming the
/// offending field (duplicate id, disconnected graph, non-positive duration).
ShopModel load_model(std::string_view document);

json model_to_json(const ShopModel& model);
ShopModel model_from_json(const json& document);

/// All-pairs shortest travel times over the transport graph.
class Routes {
public:
  explicit Routes(const ShopModel& model);

  /// Shortest travel time, or nullopt when unreachable or unknown.
  std::optional<Tick> distance(std::string_view from, std::string_view to) const;

private:
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<std::vector<std::optional<Tick>>> dist_;
};

} // namespace hmsbench::emulation
