#pragma once

#include "hmsbench/control/types.hpp"
#include "hmsbench/emulation/shop_model.hpp"
#include "hmsbench/emulation/sim_event.hpp"
#include "hmsbench/il/taps.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hmsbench::control {

/// Monotonic nanosecond clock used to time decisions. An empty clock makes
/// every latency read as zero, which keeps runs byte-reproducible.
using LatencyClock = std::function<std::int64_t()>;

/// Steady-clock nanoseconds.
LatencyClock wall_clock();

/// Where the control believes an order currently is.
enum class OrderPlace : std::uint8_t { Unreleased, AtNode, OnShuttle, InProcess, Gone };

struct OrderHolon {
  std::string holon_id;
  ProductOrder order;
  std::size_t step = 0;
  OrderPlace place = OrderPlace::Unreleased;
  std::string location;
  std::string assigned_machine;
  bool release_issued = false;
  bool cancel_requested = false;

  bool routing_done() const { return step >= order.routing.size(); }
  bool terminal() const {
    return order.status == OrderStatus::Completed || order.status == OrderStatus::Cancelled ||
           order.status == OrderStatus::Scrapped;
  }
};

struct ResourceHolon {
  std::string holon_id;
  std::string id;
  const emulation::MachineSpec* spec = nullptr;
  bool down = false;
  bool blocked = false;
  std::string busy_with;
  std::string reserved_for;

  bool available() const { return !down && !blocked; }
};

struct ShuttleView {
  std::string id;
  std::string node;
  bool moving = false;
  std::string destination;
  std::string carrying;
  std::string pickup_for;
};

/// Small deterministic holonic control: one order holon per order and one
/// resource holon per machine, dispatching by (priority desc, due asc, id
/// asc) and routing the nearest idle shuttle to each pickup.
class ReferenceControl {
public:
  /// Throws ValidationError on duplicate order ids or a routing step no
  /// machine can perform.
  ReferenceControl(const emulation::ShopModel& model, std::vector<ProductOrder> order_book,
                   LatencyClock clock = {});

  /// Updates the shop view from `batch` and returns this round's commands,
  /// always terminated by end-of-round.
  std::vector<ControlCommand> on_notifications(Tick now,
                                               std::span<const emulation::SimEvent> batch);

  DirectiveAck apply_directive(Tick now, const ControlDirective& directive);

  /// FLOW2 data points produced since the previous call.
  std::vector<il::TaggedRecord> take_data_points();

  /// FLOW7 control-side KPI.
  std::vector<il::Metric> export_control_kpi() const;

  std::size_t order_holon_count() const { return orders_.size(); }
  std::size_t resource_holon_count() const { return resources_.size(); }
  const OrderHolon* order(const std::string& id) const;
  const ResourceHolon* resource(const std::string& id) const;
  std::uint64_t reschedules() const { return reschedules_; }

private:
  OrderHolon& add_order(ProductOrder order, Tick now);
  void observe(const emulation::SimEvent& event);
  std::vector<ControlCommand> decide(Tick now);
  std::vector<OrderHolon*> ranked_orders();
  std::string target_node(const OrderHolon& order) const;
  void drop_assignment(OrderHolon& order, Tick now);
  void record(std::string name, std::string subject, double value, Tick time);

  std::shared_ptr<const emulation::ShopModel> model_;
  std::unique_ptr<emulation::Routes> routes_;
  LatencyClock clock_;
  std::map<std::string, OrderHolon> orders_;
  std::vector<std::string> arrival_order_;
  std::map<std::string, ResourceHolon> resources_;
  std::map<std::string, ShuttleView> shuttles_;

  std::vector<il::TaggedRecord> data_points_;
  std::uint64_t next_data_seq_ = 1;
  Tick now_ = 0;

  std::uint64_t commands_issued_ = 0;
  std::uint64_t directives_handled_ = 0;
  std::uint64_t reschedules_ = 0;
  std::uint64_t rounds_ = 0;
  double latency_sum_us_ = 0.0;
  double latency_max_us_ = 0.0;
};

} // namespace hmsbench::control
