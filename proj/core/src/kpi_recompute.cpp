#include "hmsbench/il/message.hpp"
#include "hmsbench/il/protocol.hpp"
#include "hmsbench/kpi/engine.hpp"

#include <algorithm>

namespace hmsbench::kpi {

using emulation::EventKind;
using emulation::SimEvent;

namespace {

struct LogContents {
  std::vector<SimEvent> events;
  std::vector<il::ControlDataPoint> data;
  std::map<std::string, double> metrics;
};

LogContents read_log(std::string_view text) {
  LogContents out;
  bool bye = false;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      throw KpiError("incomplete log: last line not terminated");
    }
    const il::InterfaceMessage m = il::decode(text.substr(start, end - start));
    start = end + 1;
    if (m.direction == il::Direction::Notification) {
      auto batch = il::batch_events(m);
      out.events.insert(out.events.end(), batch.begin(), batch.end());
    } else if (m.direction == il::Direction::Tap) {
      const il::TaggedRecord r = il::tap_record(m);
      if (r.tag == il::StreamTag::Flow2) {
        out.data.push_back(std::get<il::ControlDataPoint>(r.payload));
      } else if (r.tag == il::StreamTag::Flow7) {
        const auto& metric = std::get<il::Metric>(r.payload);
        out.metrics[metric.name] = metric.value;
      }
    } else if (m.direction == il::Direction::Session && m.kind == "bye") {
      bye = true;
    }
  }
  if (!bye) {
    throw KpiError("incomplete log: no closing bye");
  }
  return out;
}

Tick overlap(Tick from, Tick to, Tick horizon) {
  return std::max<Tick>(0, std::min(to, horizon) - std::max<Tick>(from, 0));
}

} // namespace

KpiReport recompute_from_log(std::string_view log_text, const RunInfo& info) {
  const LogContents log = read_log(log_text);

  KpiReport r;
  r.run_id = info.run_id;
  r.scenario_id = info.scenario_id;
  r.seed = info.seed;

  // Horizon first: the last completion in the whole log.
  for (const SimEvent& e : log.events) {
    if (e.kind == EventKind::OrderCompleted) {
      r.makespan = std::max(r.makespan, e.time);
    }
  }
  const Tick horizon = r.makespan;

  std::map<std::string, Tick> started;
  std::map<std::string, Tick> went_down;
  for (const SimEvent& e : log.events) {
    switch (e.kind) {
    case EventKind::OpStarted:
    case EventKind::OpFinished:
    case EventKind::MachineDown:
    case EventKind::MachineUp:
    case EventKind::SupplyBlocked:
    case EventKind::SupplyRestored:
      r.machines.try_emplace(e.machine);
      break;
    case EventKind::ProductRejected:
      if (!e.machine.empty()) {
        r.machines.try_emplace(e.machine);
      }
      break;
    default:
      break;
    }

    const bool ends_op = e.kind == EventKind::OpFinished ||
                         (e.kind == EventKind::MachineDown && !e.order.empty()) ||
                         (e.kind == EventKind::ProductRejected && !e.machine.empty());
    if (ends_op) {
      auto it = started.find(e.machine);
      if (it != started.end()) {
        r.machines[e.machine].busy += overlap(it->second, e.time, horizon);
        started.erase(it);
      } else if (e.kind == EventKind::OpFinished) {
        throw KpiError("unmatched interval: op-finished on " + e.machine + " at t=" +
                       std::to_string(e.time));
      }
    }

    switch (e.kind) {
    case EventKind::OrderReleased:
      ++r.counts.released;
      r.orders[e.order].release = e.time;
      break;
    case EventKind::OpStarted:
      started[e.machine] = e.time;
      break;
    case EventKind::MachineDown:
      went_down.try_emplace(e.machine, e.time);
      break;
    case EventKind::MachineUp:
      if (auto it = went_down.find(e.machine); it != went_down.end()) {
        r.machines[e.machine].downtime += overlap(it->second, e.time, horizon);
        went_down.erase(it);
      }
      break;
    case EventKind::ProductRejected:
      if (e.detail == "scrap") {
        ++r.counts.scrapped;
        r.orders[e.order].outcome = "scrapped";
      } else {
        ++r.counts.reworked;
      }
      break;
    case EventKind::OrderCompleted:
      ++r.counts.completed;
      r.orders[e.order].outcome = "completed";
      r.orders[e.order].completion = e.time;
      break;
    case EventKind::OrderCancelled:
      ++r.counts.cancelled;
      r.orders[e.order].outcome = "cancelled";
      break;
    default:
      break;
    }
  }
  for (const auto& [machine, since] : started) {
    r.machines[machine].busy += overlap(since, horizon, horizon);
  }
  for (const auto& [machine, since] : went_down) {
    r.machines[machine].downtime += overlap(since, horizon, horizon);
  }
  for (auto& [_, m] : r.machines) {
    m.utilization = horizon == 0 ? 0.0 : static_cast<double>(m.busy) / static_cast<double>(horizon);
  }

  std::map<std::string, std::vector<double>> values;
  for (const auto& p : log.data) {
    values[p.name].push_back(p.value);
    if (p.name == "order.due") {
      auto it = r.orders.find(p.subject);
      if (it != r.orders.end()) {
        it->second.due = static_cast<Tick>(p.value);
      }
    }
  }
  for (const auto& [name, v] : values) {
    double sum = 0.0;
    for (double x : v) {
      sum += x;
    }
    r.control_data.emplace(name, DataStat{v.size(), sum / static_cast<double>(v.size()),
                                          *std::max_element(v.begin(), v.end())});
  }
  r.control_metrics = log.metrics;

  std::vector<Tick> leads;
  for (auto& [_, o] : r.orders) {
    if (!o.completion) {
      continue;
    }
    o.lead = *o.completion - o.release;
    leads.push_back(o.lead);
    if (o.due && *o.completion > *o.due) {
      o.tardiness = *o.completion - *o.due;
    }
    r.tardiness_total += o.tardiness;
  }
  if (!leads.empty()) {
    Tick sum = 0;
    for (Tick l : leads) {
      sum += l;
    }
    const double n = static_cast<double>(leads.size());
    r.lead_mean = static_cast<double>(sum) / n;
    r.lead_max = *std::max_element(leads.begin(), leads.end());
    r.tardiness_mean = static_cast<double>(r.tardiness_total) / n;
  }
  if (horizon > 0) {
    r.throughput = 1000.0 * static_cast<double>(r.counts.completed) / static_cast<double>(horizon);
  }

  const auto& c = r.counts;
  r.conserved = c.completed + c.cancelled + c.scrapped == c.released;
  if (!r.conserved) {
    r.issues.push_back("conservation violated: released " + std::to_string(c.released) +
                       ", completed " + std::to_string(c.completed) + ", cancelled " +
                       std::to_string(c.cancelled) + ", scrapped " + std::to_string(c.scrapped));
  }
  r.valid = r.issues.empty();
  return r;
}

} // namespace hmsbench::kpi
