#pragma once

#include "hmsbench/control/types.hpp"
#include "hmsbench/emulation/shop_model.hpp"
#include "hmsbench/emulation/sim_event.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hmsbench::emulation {

/// Raised when a command or injection references an entity the model does
/// not know, or carries an invalid parameter. State-dependent refusals
/// (busy shuttle, down machine) are reported as command-rejected events.
class KernelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class InjectionKind : std::uint8_t { MachineDown, MachineUp, SupplyShortage, SupplyRestore, ProductReject };
enum class RejectPolicy : std::uint8_t { Rework, Scrap };

std::string_view to_string(InjectionKind kind);
std::optional<InjectionKind> parse_injection_kind(std::string_view name);
std::string_view to_string(RejectPolicy policy);
std::optional<RejectPolicy> parse_reject_policy(std::string_view name);

/// A disturbance applied directly to the emulation. `target` is a machine
/// id, or an order id for product-reject.
struct Injection {
  InjectionKind kind = InjectionKind::MachineDown;
  std::string target;
  std::optional<Tick> duration;
  RejectPolicy policy = RejectPolicy::Rework;

  bool operator==(const Injection&) const = default;
};

enum class TransitionKind : std::uint8_t { Emit, Arrive, FinishOp, MachineUp, SupplyRestore, Release, Wakeup };

/// Scheduled state change. `Emit` entries carry an already-applied change
/// whose event is published on the next advance.
struct PendingTransition {
  TransitionKind kind = TransitionKind::Emit;
  EventKind event = EventKind::CommandRejected;
  std::string machine;
  std::string shuttle;
  std::string order;
  std::string node;
  std::string detail;

  bool operator==(const PendingTransition&) const = default;
};

struct MachineState {
  bool down = false;
  bool blocked = false;
  std::string order;      // non-empty while busy
  std::string operation;
  Tick finish = 0;

  bool busy() const { return !order.empty(); }
  bool operator==(const MachineState&) const = default;
};

struct ShuttleState {
  std::string node;  // current node, or departure node while moving
  bool moving = false;
  std::string destination;
  Tick arrival = 0;
  std::string carrying;

  bool operator==(const ShuttleState&) const = default;
};

enum class OrderPlace : std::uint8_t { Scheduled, AtNode, OnShuttle, InProcess, Done };

struct OrderState {
  OrderPlace place = OrderPlace::Scheduled;
  std::string location;  // node, shuttle or machine id depending on place
  bool rework_hold = false;

  bool operator==(const OrderState&) const = default;
};

struct KernelState {
  Tick clock = 0;
  std::uint64_t next_seq = 1;
  std::uint64_t next_insertion = 0;
  /// Keyed by (time, insertion counter).
  std::map<std::pair<Tick, std::uint64_t>, PendingTransition> pending;
  std::map<std::string, MachineState> machines;
  std::map<std::string, ShuttleState> shuttles;
  std::map<std::string, OrderState> orders;
  std::vector<std::string> warnings;

  bool operator==(const KernelState&) const = default;
};

/// Deterministic discrete-event emulation of the shop floor. Owns the
/// system clock; the control system only ever sees the batches it emits.
class Emulator {
public:
  explicit Emulator(ShopModel model);

  /// Rebuilds an emulator from `snapshot()` output.
  static Emulator restore(std::string_view snapshot);

  /// Applies `commands` at the current clock, moves the clock to the next
  /// pending time and returns every event at that time as one batch with
  /// consecutive sequence numbers. Returns an empty batch and leaves the
  /// clock alone when nothing is pending.
  std::vector<SimEvent> advance(std::span<const control::ControlCommand> commands);

  /// Applies a disturbance at the current clock and returns its events.
  std::vector<SimEvent> apply_injection(const Injection& injection);

  /// Makes a future advance stop at `time` even if nothing else happens then.
  void schedule_wakeup(Tick time);

  /// Canonical JSON of model and state; byte-identical for equal states.
  std::string snapshot() const;

  const ShopModel& model() const { return *model_; }
  const KernelState& state() const { return state_; }
  Tick clock() const { return state_.clock; }
  bool has_pending() const { return !state_.pending.empty(); }
  std::optional<Tick> next_time() const;
  /// True when every order the emulation has seen is done and none waits
  /// for release.
  bool all_orders_terminal() const;
  const std::vector<std::string>& warnings() const { return state_.warnings; }

  bool operator==(const Emulator& other) const {
    return *model_ == *other.model_ && state_ == other.state_;
  }

private:
  Emulator(std::shared_ptr<const ShopModel> model, KernelState state);

  void apply(const control::ControlCommand& command);
  void reject(const control::ControlCommand& command, const std::string& reason);
  void schedule(Tick time, PendingTransition transition);
  void emit_now(PendingTransition transition) { schedule(state_.clock, std::move(transition)); }
  void unschedule(TransitionKind kind, const std::string& machine);
  std::string machine_at(const std::string& node) const;
  SimEvent stamp(EventKind kind);

  std::shared_ptr<const ShopModel> model_;
  std::shared_ptr<const Routes> routes_;
  KernelState state_;
};

} // namespace hmsbench::emulation
