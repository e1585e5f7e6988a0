#include "hmsbench/kpi/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace hmsbench::kpi {

namespace {

json opt(const std::optional<Tick>& v) { return v ? json(*v) : json(nullptr); }

std::optional<Tick> opt_tick(const json& v) {
  return v.is_null() ? std::nullopt : std::optional<Tick>(v.get<Tick>());
}

bool close_enough(double a, double b, double tolerance) {
  if (a == b) {
    return true;
  }
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return std::fabs(a - b) <= tolerance * scale;
}

} // namespace

std::string format_number(double value) {
  if (value == std::floor(value) && std::fabs(value) < 9.0e15) {
    return std::to_string(static_cast<std::int64_t>(value));
  }
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

json report_to_json(const KpiReport& r) {
  json orders = json::object();
  for (const auto& [id, o] : r.orders) {
    orders[id] = {{"release", o.release},     {"completion", opt(o.completion)},
                  {"due", opt(o.due)},        {"outcome", o.outcome},
                  {"lead", o.lead},           {"tardiness", o.tardiness}};
  }
  json machines = json::object();
  for (const auto& [id, m] : r.machines) {
    machines[id] = {{"busy", m.busy}, {"downtime", m.downtime}, {"utilization", m.utilization}};
  }
  json data = json::object();
  for (const auto& [name, s] : r.control_data) {
    data[name] = {{"count", s.count}, {"mean", s.mean}, {"max", s.max}};
  }
  json metrics = json::object();
  for (const auto& [name, v] : r.control_metrics) {
    metrics[name] = v;
  }
  return canonicalize(json{
      {"run", r.run_id},
      {"scenario", r.scenario_id},
      {"seed", r.seed},
      {"valid", r.valid},
      {"issues", r.issues},
      {"makespan", r.makespan},
      {"throughput", r.throughput},
      {"orders", orders},
      {"lead_time", {{"mean", r.lead_mean}, {"max", r.lead_max}}},
      {"tardiness", {{"total", r.tardiness_total}, {"mean", r.tardiness_mean}}},
      {"machines", machines},
      {"counts",
       {{"released", r.counts.released},
        {"completed", r.counts.completed},
        {"cancelled", r.counts.cancelled},
        {"scrapped", r.counts.scrapped},
        {"reworked", r.counts.reworked}}},
      {"conserved", r.conserved},
      {"control", {{"data", data}, {"metrics", metrics}}},
      {"duplicates", r.duplicates},
  });
}

KpiReport report_from_json(const json& d) {
  KpiReport r;
  r.run_id = d.at("run").get<std::string>();
  r.scenario_id = d.at("scenario").get<std::string>();
  r.seed = d.at("seed").get<std::uint64_t>();
  r.valid = d.at("valid").get<bool>();
  r.issues = d.at("issues").get<std::vector<std::string>>();
  r.makespan = d.at("makespan").get<Tick>();
  r.throughput = d.at("throughput").get<double>();
  for (const auto& [id, o] : d.at("orders").items()) {
    OrderKpi k;
    k.release = o.at("release").get<Tick>();
    k.completion = opt_tick(o.at("completion"));
    k.due = opt_tick(o.at("due"));
    k.outcome = o.at("outcome").get<std::string>();
    k.lead = o.at("lead").get<Tick>();
    k.tardiness = o.at("tardiness").get<Tick>();
    r.orders.emplace(id, k);
  }
  r.lead_mean = d.at("lead_time").at("mean").get<double>();
  r.lead_max = d.at("lead_time").at("max").get<Tick>();
  r.tardiness_total = d.at("tardiness").at("total").get<Tick>();
  r.tardiness_mean = d.at("tardiness").at("mean").get<double>();
  for (const auto& [id, m] : d.at("machines").items()) {
    r.machines.emplace(id, MachineKpi{m.at("busy").get<Tick>(), m.at("downtime").get<Tick>(),
                                      m.at("utilization").get<double>()});
  }
  const json& c = d.at("counts");
  r.counts = {c.at("released").get<std::uint64_t>(), c.at("completed").get<std::uint64_t>(),
              c.at("cancelled").get<std::uint64_t>(), c.at("scrapped").get<std::uint64_t>(),
              c.at("reworked").get<std::uint64_t>()};
  r.conserved = d.at("conserved").get<bool>();
  for (const auto& [name, s] : d.at("control").at("data").items()) {
    r.control_data.emplace(name, DataStat{s.at("count").get<std::uint64_t>(),
                                          s.at("mean").get<double>(), s.at("max").get<double>()});
  }
  for (const auto& [name, v] : d.at("control").at("metrics").items()) {
    r.control_metrics.emplace(name, v.get<double>());
  }
  r.duplicates = d.at("duplicates").get<std::uint64_t>();
  return r;
}

std::string report_document(const KpiReport& report) {
  return report_to_json(report).dump(2) + "\n";
}

std::string csv_header() {
  return "run,scenario,seed,valid,makespan,throughput,lead_mean,lead_max,tardiness_total,"
         "tardiness_mean,utilization_mean,downtime_total,released,completed,cancelled,scrapped,"
         "reworked,commands_issued,reschedules,decision_latency_mean_us,decision_latency_max_us\n";
}

std::string csv_row(const KpiReport& r) {
  double util = 0.0;
  Tick downtime = 0;
  for (const auto& [_, m] : r.machines) {
    util += m.utilization;
    downtime += m.downtime;
  }
  if (!r.machines.empty()) {
    util /= static_cast<double>(r.machines.size());
  }
  auto metric = [&](const char* name) {
    auto it = r.control_metrics.find(name);
    return it == r.control_metrics.end() ? std::string{} : format_number(it->second);
  };
  std::ostringstream out;
  out << r.run_id << ',' << r.scenario_id << ',' << r.seed << ',' << (r.valid ? "true" : "false")
      << ',' << r.makespan << ',' << format_number(r.throughput) << ','
      << format_number(r.lead_mean) << ',' << r.lead_max << ',' << r.tardiness_total << ','
      << format_number(r.tardiness_mean) << ',' << format_number(util) << ',' << downtime << ','
      << r.counts.released << ',' << r.counts.completed << ',' << r.counts.cancelled << ','
      << r.counts.scrapped << ',' << r.counts.reworked << ',' << metric("commands_issued") << ','
      << metric("reschedules") << ',' << metric("decision_latency_mean_us") << ','
      << metric("decision_latency_max_us") << '\n';
  return out.str();
}

std::vector<std::string> report_differences(const KpiReport& a, const KpiReport& b,
                                            double tolerance) {
  std::vector<std::string> diffs;
  auto exact = [&](const std::string& what, auto x, auto y) {
    if (x != y) {
      diffs.push_back(what + ": " + std::to_string(x) + " vs " + std::to_string(y));
    }
  };
  auto ratio = [&](const std::string& what, double x, double y) {
    if (!close_enough(x, y, tolerance)) {
      diffs.push_back(what + ": " + format_number(x) + " vs " + format_number(y));
    }
  };
  exact("valid", a.valid, b.valid);
  exact("makespan", a.makespan, b.makespan);
  ratio("throughput", a.throughput, b.throughput);
  ratio("lead_mean", a.lead_mean, b.lead_mean);
  exact("lead_max", a.lead_max, b.lead_max);
  exact("tardiness_total", a.tardiness_total, b.tardiness_total);
  ratio("tardiness_mean", a.tardiness_mean, b.tardiness_mean);
  exact("counts.released", a.counts.released, b.counts.released);
  exact("counts.completed", a.counts.completed, b.counts.completed);
  exact("counts.cancelled", a.counts.cancelled, b.counts.cancelled);
  exact("counts.scrapped", a.counts.scrapped, b.counts.scrapped);
  exact("counts.reworked", a.counts.reworked, b.counts.reworked);
  exact("conserved", a.conserved, b.conserved);

  if (a.orders.size() != b.orders.size()) {
    diffs.push_back("order count: " + std::to_string(a.orders.size()) + " vs " +
                    std::to_string(b.orders.size()));
  }
  for (const auto& [id, o] : a.orders) {
    auto it = b.orders.find(id);
    if (it == b.orders.end()) {
      diffs.push_back("order " + id + " missing");
    } else if (!(o == it->second)) {
      diffs.push_back("order " + id + " differs");
    }
  }
  if (a.machines.size() != b.machines.size()) {
    diffs.push_back("machine count: " + std::to_string(a.machines.size()) + " vs " +
                    std::to_string(b.machines.size()));
  }
  for (const auto& [id, m] : a.machines) {
    auto it = b.machines.find(id);
    if (it == b.machines.end()) {
      diffs.push_back("machine " + id + " missing");
      continue;
    }
    exact("machine " + id + " busy", m.busy, it->second.busy);
    exact("machine " + id + " downtime", m.downtime, it->second.downtime);
    ratio("machine " + id + " utilization", m.utilization, it->second.utilization);
  }
  if (a.control_data.size() != b.control_data.size()) {
    diffs.push_back("control data names differ");
  }
  for (const auto& [name, s] : a.control_data) {
    auto it = b.control_data.find(name);
    if (it == b.control_data.end()) {
      diffs.push_back("control data " + name + " missing");
      continue;
    }
    exact("control data " + name + " count", s.count, it->second.count);
    ratio("control data " + name + " mean", s.mean, it->second.mean);
    ratio("control data " + name + " max", s.max, it->second.max);
  }
  if (a.control_metrics.size() != b.control_metrics.size()) {
    diffs.push_back("control metric names differ");
  }
  for (const auto& [name, v] : a.control_metrics) {
    auto it = b.control_metrics.find(name);
    if (it == b.control_metrics.end()) {
      diffs.push_back("control metric " + name + " missing");
    } else {
      ratio("control metric " + name, v, it->second);
    }
  }
  return diffs;
}

} // namespace hmsbench::kpi
