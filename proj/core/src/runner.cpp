#include "hmsbench/harness/runner.hpp"

#include "hmsbench/control/endpoint.hpp"
#include "hmsbench/emulation/kernel.hpp"
#include "hmsbench/il/process.hpp"
#include "hmsbench/il/session.hpp"
#include "hmsbench/kpi/engine.hpp"
#include "hmsbench/scenario/manager.hpp"

#include <atomic>
#include <deque>
#include <exception>
#include <memory>
#include <set>
#include <thread>

namespace hmsbench::harness {

namespace {

struct Outcome {
  RunStatus status = RunStatus::Ok;
  std::string reason;

  void fail(RunStatus s, std::string why) {
    if (status == RunStatus::Ok) {
      status = s;
      reason = std::move(why);
    }
  }
};

} // namespace

std::string_view to_string(RunStatus status) {
  switch (status) {
  case RunStatus::Ok:
    return "ok";
  case RunStatus::Invalid:
    return "invalid";
  case RunStatus::Aborted:
    return "aborted";
  }
  return "?";
}

std::string run_id(std::string_view scenario_id, std::uint64_t seed) {
  return std::string(scenario_id) + "_s" + std::to_string(seed);
}

RunOutput run_one(const RunSpec& spec, const RunOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  const scenario::Scenario& sc = *spec.scenario;
  const std::string id = run_id(sc.id, spec.seed);

  RunOutput out;
  out.record.suite = spec.suite_name;
  out.record.scenario = sc.id;
  out.record.category = sc.category;
  out.record.seed = spec.seed;
  out.record.log_path = "logs/" + id + ".il1";
  out.record.report_path = "reports/" + id + ".json";

  const kpi::RunInfo info{id, sc.id, spec.seed};
  Outcome outcome;

  emulation::Emulator emu(*spec.model);
  std::unique_ptr<control::ReferenceControl> control;
  std::unique_ptr<control::ControlEndpoint> endpoint;
  std::unique_ptr<il::Transport> transport;
  il::ProcessTransport* process = nullptr;

  il::SessionConfig config;
  config.role = il::Role::Emulation;
  config.model_hash = spec.model_hash;
  config.run = {{"run", id}, {"scenario", sc.id}, {"seed", spec.seed}};
  config.timeout = options.timeout;

  std::optional<scenario::ScenarioManager> manager;
  if (options.scenario_manager) {
    manager.emplace(sc, spec.seed);
  }
  std::optional<kpi::KpiEngine> engine;
  if (options.taps) {
    engine.emplace(info);
  }
  auto tap = [&](const il::TaggedRecord& r) {
    if (options.observer) {
      options.observer->ingest(r);
    }
    if (engine) {
      engine->ingest(r);
    }
  };

  il::SessionLog log;
  bool closed = false;
  try {
    if (options.deployment == ControlDeployment::Process) {
      auto p = std::make_unique<il::ProcessTransport>(options.control_command);
      process = p.get();
      transport = std::move(p);
    } else {
      control = std::make_unique<control::ReferenceControl>(
          *spec.model, *spec.orders, options.timing ? control::wall_clock() : control::LatencyClock{});
      il::SessionConfig control_config = config;
      control_config.role = il::Role::Control;
      control_config.run = json::object();
      endpoint = std::make_unique<control::ControlEndpoint>(*control, control_config);
      transport = std::make_unique<il::LoopbackTransport>(
          [ep = endpoint.get()](std::string_view line) { return ep->handle(line); });
    }

    il::Session session = il::Session::open(*transport, config, &log);
    std::vector<emulation::SimEvent> batch;
    std::set<Tick> wakeups;
    try {
      for (;;) {
        std::vector<control::ControlDirective> directives;
        if (manager) {
          std::deque<emulation::SimEvent> todo(batch.begin(), batch.end());
          auto apply = [&](const std::vector<scenario::Firing>& firings) {
            for (const auto& firing : firings) {
              for (const auto& action : firing.actions) {
                if (const auto* inj = std::get_if<emulation::Injection>(&action)) {
                  for (auto& e : emu.apply_injection(*inj)) {
                    todo.push_back(e);
                    batch.push_back(std::move(e));
                  }
                } else {
                  directives.push_back(std::get<control::ControlDirective>(action));
                }
              }
            }
          };
          apply(manager->on_time(emu.clock()));
          while (!todo.empty()) {
            const emulation::SimEvent e = todo.front();
            todo.pop_front();
            apply(manager->on_event(e));
            apply(manager->on_time(emu.clock()));
          }
        }
        for (const auto& e : batch) {
          tap(il::TaggedRecord{il::StreamTag::Flow1, e.time, e.seq, e});
        }

        il::RoundReply reply = session.exchange_round(emu.clock(), batch, directives);
        for (const auto& r : reply.taps) {
          tap(r);
        }
        for (std::size_t i = 0; i < reply.acks.size(); ++i) {
          if (!reply.acks[i].ok) {
            out.warnings.push_back("t=" + std::to_string(emu.clock()) + " directive " +
                                   std::string(control::to_string(directives[i].kind)) +
                                   " refused: " + reply.acks[i].error);
          }
        }

        const std::optional<Tick> deadline = manager ? manager->next_deadline() : std::nullopt;
        if (reply.commands.empty() && !emu.has_pending() && !deadline) {
          if (!emu.all_orders_terminal()) {
            outcome.fail(RunStatus::Aborted, "stalled at t=" + std::to_string(emu.clock()) +
                                                 " with unfinished orders");
          }
          break;
        }
        if (session.round() >= options.round_cap) {
          outcome.fail(RunStatus::Aborted,
                       "round cap " + std::to_string(options.round_cap) + " exceeded");
          break;
        }
        if (deadline && *deadline > emu.clock() && wakeups.insert(*deadline).second) {
          emu.schedule_wakeup(*deadline);
        }
        batch = emu.advance(reply.commands);
        if (emu.clock() > options.cap) {
          outcome.fail(RunStatus::Aborted, "tick cap " + std::to_string(options.cap) +
                                               " exceeded at t=" + std::to_string(emu.clock()));
          break;
        }
      }
      for (const auto& r : session.finish(emu.clock())) {
        tap(r);
      }
      closed = true;
    } catch (const emulation::KernelError& e) {
      outcome.fail(RunStatus::Invalid, std::string("emulation: ") + e.what());
    } catch (const kpi::KpiError& e) {
      outcome.fail(RunStatus::Invalid, std::string("kpi: ") + e.what());
    }
  } catch (const il::SessionError& e) {
    outcome.fail(RunStatus::Invalid, std::string("session: ") + e.what());
  } catch (const std::exception& e) {
    outcome.fail(RunStatus::Invalid, e.what());
  }
  if (process) {
    const int status = process->wait();
    if (status != 0 && closed) {
      outcome.fail(RunStatus::Invalid, "control process exited with " + std::to_string(status));
    }
  }

  out.session_log = log.text();
  out.command_log = log.command_log();
  for (const auto& w : emu.warnings()) {
    out.warnings.push_back(w);
  }
  if (manager) {
    for (const auto& w : manager->warnings()) {
      out.warnings.push_back(w);
    }
  }

  std::optional<kpi::KpiReport> oracle;
  if (closed) {
    try {
      oracle = kpi::recompute_from_log(out.session_log, info);
    } catch (const std::exception& e) {
      outcome.fail(RunStatus::Invalid, std::string("recompute: ") + e.what());
    }
  }
  if (engine) {
    engine->close();
    out.report = engine->finalize();
    if (oracle) {
      const auto diffs = kpi::report_differences(out.report, *oracle);
      for (const auto& d : diffs) {
        out.report.issues.push_back("oracle mismatch: " + d);
      }
      if (!diffs.empty()) {
        out.report.valid = false;
      }
    }
  } else if (oracle) {
    out.report = *oracle;
  } else {
    out.report.run_id = info.run_id;
    out.report.scenario_id = info.scenario_id;
    out.report.seed = info.seed;
  }
  if (!out.report.valid) {
    outcome.fail(RunStatus::Invalid, out.report.issues.empty() ? "invalid report"
                                                               : out.report.issues.front());
  }
  if (outcome.status != RunStatus::Ok) {
    out.report.valid = false;
    const std::string note = std::string(to_string(outcome.status)) + ": " + outcome.reason;
    if (std::find(out.report.issues.begin(), out.report.issues.end(), outcome.reason) ==
        out.report.issues.end()) {
      out.report.issues.push_back(note);
    }
  }
  out.record.status = outcome.status;
  out.record.reason = outcome.reason;
  out.record.wall_clock = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - started);
  return out;
}

std::vector<RunOutput> run_suite(const BenchmarkSuite& suite, const RunOptions& options,
                                 unsigned jobs) {
  std::vector<RunSpec> specs;
  for (const auto& sc : suite.scenarios) {
    for (std::uint64_t seed : suite.seeds) {
      specs.push_back(RunSpec{suite.name, &suite.model, suite.model_hash, &suite.orders,
                              &sc.scenario, seed});
    }
  }
  std::vector<RunOutput> results(specs.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, specs.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < specs.size(); ++i) {
      results[i] = run_one(specs[i], options);
    }
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < specs.size(); i = next++) {
          results[i] = run_one(specs[i], options);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) {
    t.join();
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  return results;
}

} // namespace hmsbench::harness
