#include "hmsbench/kpi/engine.hpp"

#include <algorithm>

namespace hmsbench::kpi {

using emulation::EventKind;
using emulation::SimEvent;

namespace {

Tick clipped(const std::vector<std::pair<Tick, Tick>>& intervals, std::optional<Tick> open,
             Tick horizon) {
  Tick total = 0;
  auto add = [&](Tick from, Tick to) {
    total += std::max<Tick>(0, std::min(to, horizon) - std::max<Tick>(from, 0));
  };
  for (const auto& [from, to] : intervals) {
    add(from, to);
  }
  if (open) {
    add(*open, horizon);
  }
  return total;
}

bool machine_event(const SimEvent& e) {
  switch (e.kind) {
  case EventKind::OpStarted:
  case EventKind::OpFinished:
  case EventKind::MachineDown:
  case EventKind::MachineUp:
  case EventKind::SupplyBlocked:
  case EventKind::SupplyRestored:
    return true;
  case EventKind::ProductRejected:
    return !e.machine.empty();
  default:
    return false;
  }
}

} // namespace

KpiEngine::KpiEngine(RunInfo info) : info_(std::move(info)) {}

void KpiEngine::invalidate(std::string issue) { issues_.push_back(std::move(issue)); }

void KpiEngine::ingest(const il::TaggedRecord& r) {
  if (closed_) {
    throw KpiError("ingest on closed run");
  }
  const int tag = static_cast<int>(r.tag);
  if (!seen_.emplace(tag, r.time, r.seq).second) {
    ++duplicates_;
    return;
  }
  auto last = last_time_.find(tag);
  if (last != last_time_.end() && r.time < last->second) {
    invalidate("time regression in " + std::string(il::to_string(r.tag)) + ": t=" +
               std::to_string(r.time) + " after t=" + std::to_string(last->second));
    return;
  }
  last_time_[tag] = r.time;

  switch (r.tag) {
  case il::StreamTag::Flow1:
    on_event(std::get<SimEvent>(r.payload));
    break;
  case il::StreamTag::Flow2: {
    const auto& p = std::get<il::ControlDataPoint>(r.payload);
    if (p.name == "order.due") {
      dues_[p.subject] = static_cast<Tick>(p.value);
    }
    DataAcc& acc = data_[p.name];
    acc.max = acc.count == 0 ? p.value : std::max(acc.max, p.value);
    ++acc.count;
    acc.sum += p.value;
    break;
  }
  case il::StreamTag::Flow7: {
    const auto& m = std::get<il::Metric>(r.payload);
    metrics_[m.name] = m.value;
    break;
  }
  default:
    invalidate("unexpected tap " + std::string(il::to_string(r.tag)));
    break;
  }
}

void KpiEngine::close_busy(const std::string& machine, Tick time) {
  MachineAcc& m = machines_[machine];
  if (m.busy_since) {
    m.busy.emplace_back(*m.busy_since, time);
    m.busy_since.reset();
  }
}

void KpiEngine::on_event(const SimEvent& e) {
  if (machine_event(e)) {
    machines_.try_emplace(e.machine);
  }
  switch (e.kind) {
  case EventKind::OrderReleased:
    ++counts_.released;
    orders_[e.order].release = e.time;
    break;
  case EventKind::OpStarted:
    machines_[e.machine].busy_since = e.time;
    break;
  case EventKind::OpFinished:
    if (!machines_[e.machine].busy_since) {
      invalidate("unmatched interval: op-finished on " + e.machine + " at t=" +
                 std::to_string(e.time) + " without op-started");
      break;
    }
    close_busy(e.machine, e.time);
    break;
  case EventKind::MachineDown: {
    if (!e.order.empty()) {
      close_busy(e.machine, e.time);
    }
    MachineAcc& m = machines_[e.machine];
    if (!m.down_since) {
      m.down_since = e.time;
    }
    break;
  }
  case EventKind::MachineUp: {
    MachineAcc& m = machines_[e.machine];
    if (m.down_since) {
      m.down.emplace_back(*m.down_since, e.time);
      m.down_since.reset();
    }
    break;
  }
  case EventKind::ProductRejected:
    if (!e.machine.empty()) {
      close_busy(e.machine, e.time);
    }
    if (e.detail == "scrap") {
      ++counts_.scrapped;
      orders_[e.order].outcome = "scrapped";
    } else {
      ++counts_.reworked;
    }
    break;
  case EventKind::OrderCompleted: {
    ++counts_.completed;
    OrderKpi& o = orders_[e.order];
    o.outcome = "completed";
    o.completion = e.time;
    break;
  }
  case EventKind::OrderCancelled:
    ++counts_.cancelled;
    orders_[e.order].outcome = "cancelled";
    break;
  default:
    break;
  }
}

KpiReport KpiEngine::finalize() const {
  if (!closed_) {
    throw KpiError("finalize on open run");
  }
  KpiReport r;
  r.run_id = info_.run_id;
  r.scenario_id = info_.scenario_id;
  r.seed = info_.seed;
  r.issues = issues_;
  r.counts = counts_;
  r.duplicates = duplicates_;
  r.orders = orders_;

  for (const auto& [_, o] : r.orders) {
    if (o.completion) {
      r.makespan = std::max(r.makespan, *o.completion);
    }
  }
  const Tick horizon = r.makespan;
  if (horizon > 0) {
    r.throughput = static_cast<double>(counts_.completed) * 1000.0 / static_cast<double>(horizon);
  }

  Tick lead_sum = 0;
  std::uint64_t completed = 0;
  for (auto& [id, o] : r.orders) {
    if (auto due = dues_.find(id); due != dues_.end()) {
      o.due = due->second;
    }
    if (!o.completion) {
      continue;
    }
    ++completed;
    o.lead = *o.completion - o.release;
    lead_sum += o.lead;
    r.lead_max = std::max(r.lead_max, o.lead);
    if (o.due) {
      o.tardiness = std::max<Tick>(0, *o.completion - *o.due);
      r.tardiness_total += o.tardiness;
    }
  }
  if (completed > 0) {
    r.lead_mean = static_cast<double>(lead_sum) / static_cast<double>(completed);
    r.tardiness_mean = static_cast<double>(r.tardiness_total) / static_cast<double>(completed);
  }

  for (const auto& [id, m] : machines_) {
    MachineKpi k;
    k.busy = clipped(m.busy, m.busy_since, horizon);
    k.downtime = clipped(m.down, m.down_since, horizon);
    k.utilization = horizon > 0 ? static_cast<double>(k.busy) / static_cast<double>(horizon) : 0.0;
    r.machines.emplace(id, k);
  }

  for (const auto& [name, acc] : data_) {
    r.control_data.emplace(
        name, DataStat{acc.count, acc.sum / static_cast<double>(acc.count), acc.max});
  }
  r.control_metrics = metrics_;

  const auto& c = r.counts;
  if (c.completed + c.cancelled + c.scrapped != c.released) {
    r.conserved = false;
    r.issues.push_back("conservation violated: released " + std::to_string(c.released) +
                       ", completed " + std::to_string(c.completed) + ", cancelled " +
                       std::to_string(c.cancelled) + ", scrapped " + std::to_string(c.scrapped));
  }
  r.valid = r.issues.empty();
  return r;
}

} // namespace hmsbench::kpi
