#include "support/fixtures.hpp"

#include "hmsbench/common/hash.hpp"
#include "hmsbench/il/message.hpp"
#include "hmsbench/il/protocol.hpp"

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>
#include <unistd.h>

namespace fixtures {

using namespace hmsbench;

std::string data_path(const std::string& relative) {
  return std::string(HMSBENCH_DATA_DIR) + "/" + relative;
}

std::string read(const std::string& relative) { return read_file(data_path(relative)); }

const emulation::ShopModel& minicell() {
  static const emulation::ShopModel model = emulation::load_model(read("minicell/model.json"));
  return model;
}

const std::string& minicell_hash() {
  static const std::string hash = sha256_hex(read("minicell/model.json"));
  return hash;
}

const std::vector<control::ProductOrder>& minicell_orders() {
  static const auto orders = control::load_order_book(read("minicell/orders.json"));
  return orders;
}

scenario::Scenario scenario_from(const std::string& document,
                                 const std::vector<control::ProductOrder>& orders) {
  return scenario::load_scenario(document, scenario::ScenarioContext::from(minicell(), orders));
}

scenario::Scenario scenario(const std::string& name) {
  return scenario_from(read("minicell/scenarios/" + name + ".json"), minicell_orders());
}

harness::RunOutput run(const scenario::Scenario& sc, std::uint64_t seed,
                       const std::vector<control::ProductOrder>& orders,
                       harness::RunOptions options) {
  harness::RunSpec spec{"test", &minicell(), minicell_hash(), &orders, &sc, seed};
  return harness::run_one(spec, options);
}

harness::RunOutput run(const std::string& scenario_file, std::uint64_t seed,
                       harness::RunOptions options) {
  const auto sc = scenario(scenario_file);
  return run(sc, seed, minicell_orders(), options);
}

std::vector<control::ProductOrder> random_orders(std::mt19937_64& rng, int count) {
  static const std::vector<std::vector<std::string>> kRoutings{
      {"A"}, {"B"}, {"A", "B"}, {"B", "A"}, {"A", "B", "A"}, {"B", "B"}};
  std::vector<control::ProductOrder> orders;
  for (int i = 1; i <= count; ++i) {
    control::ProductOrder o;
    o.id = "R" + std::to_string(i);
    o.routing = kRoutings[rng() % kRoutings.size()];
    o.release = static_cast<Tick>(rng() % 60);
    o.due = o.release + 20 + static_cast<Tick>(rng() % 120);
    o.priority = static_cast<int>(rng() % 3);
    orders.push_back(o);
  }
  return orders;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) {
      end = text.size();
    }
    out.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& ls) {
  std::string out;
  for (const auto& l : ls) {
    out += l;
    out += '\n';
  }
  return out;
}

std::vector<emulation::SimEvent> logged_events(const std::string& log) {
  std::vector<emulation::SimEvent> events;
  for (const auto& line : lines(log)) {
    const auto m = il::decode(line);
    if (m.direction == il::Direction::Notification) {
      const auto batch = il::batch_events(m);
      events.insert(events.end(), batch.begin(), batch.end());
    }
  }
  return events;
}

std::string temp_dir(const std::string& name) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() /
                       ("hmsbench-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::map<std::string, std::string> tree_hashes(const std::string& dir) {
  namespace fs = std::filesystem;
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      out[fs::relative(entry.path(), dir).string()] = sha256_hex(read_file(entry.path().string()));
    }
  }
  return out;
}

int cli(const std::string& args, std::string* output) {
#ifdef HMSBENCH_CLI_PATH
  const std::string capture = temp_dir("cli") + "/out.txt";
  const std::string command = std::string(HMSBENCH_CLI_PATH) + " " + args + " >" + capture + " 2>&1";
  const int status = std::system(command.c_str());
  if (output) {
    *output = read_file(capture);
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#else
  (void)args;
  (void)output;
  throw std::runtime_error("hmsbench CLI not built");
#endif
}

} // namespace fixtures
