#include "hmsbench/common/hash.hpp"
#include "hmsbench/control/types.hpp"
#include "hmsbench/harness/runner.hpp"
#include "hmsbench/il/message.hpp"
#include "hmsbench/kpi/engine.hpp"
#include "hmsbench/scenario/random_streams.hpp"
#include "hmsbench/scenario/scenario.hpp"

#include <benchmark/benchmark.h>

using namespace hmsbench;

namespace {

std::string data(const std::string& relative) {
  return read_file(std::string(HMSBENCH_DATA_DIR) + "/" + relative);
}

struct Cell {
  std::string model_text = data("minicell/model.json");
  emulation::ShopModel model = emulation::load_model(model_text);
  std::string hash = sha256_hex(model_text);
  std::vector<control::ProductOrder> orders = control::load_order_book(data("minicell/orders.json"));

  scenario::Scenario load(const std::string& name) const {
    return scenario::load_scenario(data("minicell/scenarios/" + name + ".json"),
                                   scenario::ScenarioContext::from(model, orders));
  }
};

const Cell& cell() {
  static const Cell c;
  return c;
}

il::InterfaceMessage sample_message() {
  il::InterfaceMessage m;
  m.direction = il::Direction::Notification;
  m.round = 17;
  m.time = 35;
  m.kind = "batch";
  m.body = json::parse(R"({"events":[{"kind":"shuttle-departed","seq":41,"shuttle":"S1",
    "from":"IN","to":"M2","order":"O1","t":35},{"kind":"op-started","seq":42,"machine":"M1",
    "order":"O2","op":"A","t":35}]})");
  m.corr = "n17";
  return m;
}

void BM_Encode(benchmark::State& state) {
  const auto m = sample_message();
  for (auto _ : state) {
    benchmark::DoNotOptimize(il::encode(m));
  }
}
BENCHMARK(BM_Encode);

void BM_Decode(benchmark::State& state) {
  const auto line = il::encode(sample_message());
  for (auto _ : state) {
    benchmark::DoNotOptimize(il::decode(line));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * line.size()));
}
BENCHMARK(BM_Decode);

void BM_UniformDraw(benchmark::State& state) {
  auto gen = scenario::make_stream(42, "golden", "d_u");
  for (auto _ : state) {
    benchmark::DoNotOptimize(scenario::uniform_int(gen, 10, 20));
  }
}
BENCHMARK(BM_UniformDraw);

void BM_Run(benchmark::State& state, const char* name) {
  const auto sc = cell().load(name);
  harness::RunSpec spec{"bench", &cell().model, cell().hash, &cell().orders, &sc, 1};
  for (auto _ : state) {
    auto out = harness::run_one(spec, {});
    benchmark::DoNotOptimize(out.report.makespan);
  }
}
BENCHMARK_CAPTURE(BM_Run, null, "null")->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Run, ps9, "ps9")->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Run, supply_shortage, "supply-shortage")->Unit(benchmark::kMicrosecond);

void BM_RecomputeFromLog(benchmark::State& state) {
  const auto sc = cell().load("ps9");
  harness::RunSpec spec{"bench", &cell().model, cell().hash, &cell().orders, &sc, 1};
  const auto out = harness::run_one(spec, {});
  const kpi::RunInfo info{out.report.run_id, out.report.scenario_id, out.report.seed};
  for (auto _ : state) {
    benchmark::DoNotOptimize(kpi::recompute_from_log(out.session_log, info));
  }
}
BENCHMARK(BM_RecomputeFromLog)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
