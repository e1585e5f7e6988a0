#include "hmsbench/emulation/shop_model.hpp"

#include <algorithm>
#include <set>

namespace hmsbench::emulation {

const MachineSpec* ShopModel::find_machine(std::string_view id) const {
  auto it = std::find_if(machines.begin(), machines.end(),
                         [&](const MachineSpec& m) { return m.id == id; });
  return it == machines.end() ? nullptr : &*it;
}

bool ShopModel::has_node(std::string_view id) const {
  return std::find(nodes.begin(), nodes.end(), id) != nodes.end();
}

bool ShopModel::has_machine_capable(std::string_view op) const {
  return std::any_of(machines.begin(), machines.end(),
                     [&](const MachineSpec& m) { return m.capable(op); });
}

std::vector<std::string> ShopModel::shuttle_ids() const {
  std::vector<std::string> ids;
  for (int i = 1; i <= shuttle_count; ++i) {
    ids.push_back("S" + std::to_string(i));
  }
  return ids;
}

namespace {

void validate(const ShopModel& model) {
  std::set<std::string> nodes;
  for (std::size_t i = 0; i < model.nodes.size(); ++i) {
    const auto& node = model.nodes[i];
    if (node.empty()) {
      throw ValidationError("transport.nodes[" + std::to_string(i) + "]", "empty node id");
    }
    if (!nodes.insert(node).second) {
      throw ValidationError("transport.nodes[" + std::to_string(i) + "]",
                            "duplicate node id " + node);
    }
  }

  std::set<std::string> machine_ids;
  for (std::size_t i = 0; i < model.machines.size(); ++i) {
    const auto& m = model.machines[i];
    const std::string path = "machines[" + std::to_string(i) + "]";
    if (!machine_ids.insert(m.id).second) {
      throw ValidationError(path + ".id", "duplicate machine id " + m.id);
    }
    if (!nodes.count(m.id)) {
      throw ValidationError(path + ".id", "machine " + m.id + " is not a transport node");
    }
    if (m.id == model.input_node || m.id == model.output_node) {
      throw ValidationError(path + ".id", "machine " + m.id + " shares a station node");
    }
    if (m.durations.empty()) {
      throw ValidationError(path + ".operations", "machine " + m.id + " has no operations");
    }
    for (const auto& [op, duration] : m.durations) {
      if (duration <= 0) {
        throw ValidationError(path + ".operations." + op,
                              "non-positive duration " + std::to_string(duration));
      }
    }
  }
  if (model.machines.empty()) {
    throw ValidationError("machines", "at least one machine required");
  }

  std::set<std::pair<std::string, std::string>> seen_edges;
  for (std::size_t i = 0; i < model.edges.size(); ++i) {
    const auto& e = model.edges[i];
    const std::string path = "transport.edges[" + std::to_string(i) + "]";
    if (!nodes.count(e.from)) {
      throw ValidationError(path + ".from", "unknown node " + e.from);
    }
    if (!nodes.count(e.to)) {
      throw ValidationError(path + ".to", "unknown node " + e.to);
    }
    if (e.from == e.to) {
      throw ValidationError(path, "self-loop on " + e.from);
    }
    if (e.travel <= 0) {
      throw ValidationError(path + ".travel", "non-positive duration " + std::to_string(e.travel));
    }
    if (!seen_edges.emplace(e.from, e.to).second) {
      throw ValidationError(path, "duplicate edge " + e.from + "->" + e.to);
    }
  }

  if (model.shuttle_count < 1) {
    throw ValidationError("shuttles.count", "shuttle count must be >= 1");
  }
  if (!nodes.count(model.shuttle_home)) {
    throw ValidationError("shuttles.home", "unknown node " + model.shuttle_home);
  }
  if (!nodes.count(model.input_node)) {
    throw ValidationError("stations.input", "unknown node " + model.input_node);
  }
  if (!nodes.count(model.output_node)) {
    throw ValidationError("stations.output", "unknown node " + model.output_node);
  }
  if (model.input_node == model.output_node) {
    throw ValidationError("stations", "input and output must differ");
  }

  std::vector<std::string> required{model.input_node, model.output_node};
  for (const auto& m : model.machines) {
    required.push_back(m.id);
  }
  const Routes routes(model);
  for (const auto& a : required) {
    for (const auto& b : required) {
      if (a != b && !routes.distance(a, b)) {
        throw ValidationError("transport.edges", "graph not strongly connected: no path " + a +
                                                     " -> " + b);
      }
    }
  }
}

} // namespace

ShopModel model_from_json(const json& doc) {
  require_keys_exactly(doc, {"machines", "transport", "shuttles", "stations"}, "");

  ShopModel model;
  const json& machines = doc.at("machines");
  if (!machines.is_array()) {
    throw ValidationError("machines", "expected an array");
  }
  for (std::size_t i = 0; i < machines.size(); ++i) {
    const std::string path = "machines[" + std::to_string(i) + "]";
    const json& m = machines[i];
    require_keys_exactly(m, {"id", "operations"}, path);
    MachineSpec spec;
    spec.id = require_string(m, "id", path);
    const json& ops = m.at("operations");
    if (!ops.is_object()) {
      throw ValidationError(path + ".operations", "expected an object of op -> duration");
    }
    for (const auto& [op, duration] : ops.items()) {
      if (!duration.is_number_integer()) {
        throw ValidationError(path + ".operations." + op, "expected an integer duration");
      }
      spec.durations.emplace(op, duration.get<Tick>());
    }
    model.machines.push_back(std::move(spec));
  }

  const json& transport = doc.at("transport");
  require_keys_exactly(transport, {"nodes", "edges"}, "transport");
  if (!transport.at("nodes").is_array() || !transport.at("edges").is_array()) {
    throw ValidationError("transport", "nodes and edges must be arrays");
  }
  for (std::size_t i = 0; i < transport.at("nodes").size(); ++i) {
    const json& n = transport.at("nodes")[i];
    if (!n.is_string()) {
      throw ValidationError("transport.nodes[" + std::to_string(i) + "]", "expected a string");
    }
    model.nodes.push_back(n.get<std::string>());
  }
  for (std::size_t i = 0; i < transport.at("edges").size(); ++i) {
    const std::string path = "transport.edges[" + std::to_string(i) + "]";
    const json& e = transport.at("edges")[i];
    require_keys_exactly(e, {"from", "to", "travel"}, path);
    model.edges.push_back(TransportEdge{require_string(e, "from", path),
                                        require_string(e, "to", path),
                                        require_int(e, "travel", path)});
  }

  const json& shuttles = doc.at("shuttles");
  require_keys_exactly(shuttles, {"count", "home"}, "shuttles");
  model.shuttle_count = static_cast<int>(require_int(shuttles, "count", "shuttles"));
  model.shuttle_home = require_string(shuttles, "home", "shuttles");

  const json& stations = doc.at("stations");
  require_keys_exactly(stations, {"input", "output"}, "stations");
  model.input_node = require_string(stations, "input", "stations");
  model.output_node = require_string(stations, "output", "stations");

  validate(model);
  return model;
}

ShopModel load_model(std::string_view document) {
  return model_from_json(parse_document(document, "model"));
}

json model_to_json(const ShopModel& model) {
  json machines = json::array();
  for (const auto& m : model.machines) {
    json ops = json::object();
    for (const auto& [op, d] : m.durations) {
      ops[op] = d;
    }
    machines.push_back({{"id", m.id}, {"operations", ops}});
  }
  json edges = json::array();
  for (const auto& e : model.edges) {
    edges.push_back({{"from", e.from}, {"to", e.to}, {"travel", e.travel}});
  }
  return {{"machines", machines},
          {"transport", {{"nodes", model.nodes}, {"edges", edges}}},
          {"shuttles", {{"count", model.shuttle_count}, {"home", model.shuttle_home}}},
          {"stations", {{"input", model.input_node}, {"output", model.output_node}}}};
}

Routes::Routes(const ShopModel& model) {
  std::vector<std::string> sorted = model.nodes;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    index_.emplace(sorted[i], i);
  }
  const std::size_t n = sorted.size();
  dist_.assign(n, std::vector<std::optional<Tick>>(n));
  for (std::size_t i = 0; i < n; ++i) {
    dist_[i][i] = 0;
  }
  for (const auto& e : model.edges) {
    auto a = index_.find(e.from);
    auto b = index_.find(e.to);
    if (a == index_.end() || b == index_.end()) {
      continue;
    }
    auto& cell = dist_[a->second][b->second];
    if (!cell || e.travel < *cell) {
      cell = e.travel;
    }
  }
  // Floyd-Warshall; shop graphs are tiny.
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!dist_[i][k]) {
        continue;
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (!dist_[k][j]) {
          continue;
        }
        const Tick via = *dist_[i][k] + *dist_[k][j];
        if (!dist_[i][j] || via < *dist_[i][j]) {
          dist_[i][j] = via;
        }
      }
    }
  }
}

std::optional<Tick> Routes::distance(std::string_view from, std::string_view to) const {
  auto a = index_.find(from);
  auto b = index_.find(to);
  if (a == index_.end() || b == index_.end()) {
    return std::nullopt;
  }
  return dist_[a->second][b->second];
}

} // namespace hmsbench::emulation
