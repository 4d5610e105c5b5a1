// Copyright 2026 The SAFLA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "safla/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "safla/assurance.hpp"
#include "safla/extractor.hpp"
#include "safla/flow_model.hpp"
#include "safla/intent_store.hpp"
#include "safla/log.hpp"
#include "safla/network_graph.hpp"
#include "safla/rng.hpp"
#include "safla/simnet.hpp"

namespace safla::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& out_path, const std::string& data) {
  if (out_path.empty()) {
    std::cout << data;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error("cannot write '" + out_path + "'");
  out << data;
}

std::string fmt_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

struct MetricRow {
  std::string scenario;
  uint64_t seed = 0;
  int64_t step = 0;
  std::string metric;
  double value = 0.0;
};

std::string metrics_to_text(const std::vector<MetricRow>& rows,
                            const std::string& format) {
  if (format == "json") {
    Json arr = Json::array();
    for (const MetricRow& r : rows) {
      Json row = Json::object();
      row["scenario"] = r.scenario;
      row["seed"] = r.seed;
      row["step"] = r.step;
      row["metric"] = r.metric;
      row["value"] = r.value;
      arr.push_back(std::move(row));
    }
    return arr.dump(2) + "\n";
  }
  std::string out = "scenario,seed,step,metric,value\n";
  for (const MetricRow& r : rows) {
    out += r.scenario + "," + std::to_string(r.seed) + "," +
           std::to_string(r.step) + "," + r.metric + "," + fmt_value(r.value) +
           "\n";
  }
  return out;
}

/// Median of `repeat` samples of fn's wall time; each sample amortizes over
/// enough inner runs to stay above timer noise.
double median_seconds(int repeat, const std::function<void()>& fn) {
  using clock = std::chrono::steady_clock;
  auto once = [&fn] {
    auto t0 = clock::now();
    fn();
    return std::chrono::duration<double>(clock::now() - t0).count();
  };
  double estimate = once();
  int inner = 1;
  if (estimate < 5e-4)
    inner = std::min(1000, static_cast<int>(5e-4 / std::max(estimate, 1e-8)) + 1);
  std::vector<double> samples;
  samples.reserve(repeat);
  for (int r = 0; r < repeat; ++r) {
    auto t0 = clock::now();
    for (int i = 0; i < inner; ++i) fn();
    samples.push_back(
        std::chrono::duration<double>(clock::now() - t0).count() / inner);
  }
  std::sort(samples.begin(), samples.end());
  return samples[samples.size() / 2];
}

struct LoadedWorld {
  SimNetwork net;
  IntentRepository intents;
  ScenarioSpec spec;  // populated when built from a scenario
  bool from_scenario = false;
};

/// Loads either a saved simulator state or a scenario spec, depending on
/// which flag the user supplied. Scenario faults are applied immediately,
/// ordered by step.
LoadedWorld load_world(const std::string& state_path,
                       const std::string& scenario_path,
                       const std::string& intents_path,
                       std::optional<uint64_t> seed_override) {
  LoadedWorld world;
  if (!state_path.empty() && !scenario_path.empty())
    throw Error("--state and --scenario are mutually exclusive");
  if (!state_path.empty()) {
    world.net = SimNetwork::from_state_json(
        jsonutil::parse_document(read_file(state_path)));
    if (intents_path.empty()) throw Error("--intents is required");
    world.intents = load_repository(read_file(intents_path));
    return world;
  }
  if (scenario_path.empty()) throw Error("need --state or --scenario");
  world.spec = ScenarioSpec::parse(read_file(scenario_path));
  if (seed_override) world.spec.seed = *seed_override;
  world.from_scenario = true;
  Scenario scenario = build_scenario(world.spec);
  world.net = std::move(scenario.net);
  world.intents = std::move(scenario.intents);
  if (!intents_path.empty())
    world.intents = load_repository(read_file(intents_path));

  std::vector<FaultSpec> faults = world.spec.faults;
  std::stable_sort(faults.begin(), faults.end(),
                   [](const FaultSpec& x, const FaultSpec& y) {
                     return x.at_step < y.at_step;
                   });
  size_t index = 0;
  for (const FaultSpec& fault : faults) {
    uint64_t fseed = Rng::derive(world.spec.seed, 100 + index++);
    if (fault.kind == FaultSpec::Kind::kHijack)
      inject_hijack(world.net, world.intents, fault.percent, fseed);
    else
      fail_nodes(world.net, fault.percent, fseed);
  }
  return world;
}

ScenarioSpec mesh_spec(int rows, int cols, int intents, uint64_t seed) {
  ScenarioSpec spec;
  spec.topology.kind = TopologySpec::Kind::kMesh;
  spec.topology.rows = rows;
  spec.topology.cols = cols;
  spec.intent_count = intents;
  spec.seed = seed;
  return spec;
}

ScenarioSpec star_spec(int hosts, int intents, uint64_t seed) {
  ScenarioSpec spec;
  spec.topology.kind = TopologySpec::Kind::kStar;
  spec.topology.hosts = hosts;
  spec.intent_count = intents;
  spec.seed = seed;
  return spec;
}

/// Topology used for an n-switch recovery benchmark point.
ScenarioSpec recovery_spec(int switches, int intents, uint64_t seed) {
  if (switches == 1) return star_spec(12, intents, seed);
  if (switches % 10 == 0) return mesh_spec(10, switches / 10, intents, seed);
  return mesh_spec(1, switches, intents, seed);
}

int cmd_extract(const std::string& tables_path, const std::string& topo_path,
                const std::string& out_path) {
  std::vector<FlowTable> tables = parse_flow_tables(read_file(tables_path));
  NetworkGraph graph = build_network_graph(read_file(topo_path));
  ExtractionResult extraction = extract(tables, graph);

  Json out = Json::object();
  Json tuples = Json::array();
  for (const EndpointTuple& t : extraction.tuples) tuples.push_back(t.to_json());
  out["tuples"] = std::move(tuples);
  Json diagnostics = Json::array();
  for (const ExtractedIntent& g : extraction.intents)
    if (!g.valid) diagnostics.push_back(g.to_json());
  out["diagnostics"] = std::move(diagnostics);
  Json functional = Json::array();
  for (const auto& [sw, entry] : extraction.functional) {
    Json row = Json::object();
    row["switch"] = sw;
    row["entry_index"] = entry.entry_index;
    functional.push_back(std::move(row));
  }
  out["functional"] = std::move(functional);
  write_output(out_path, out.dump(2) + "\n");
  return 0;
}

int cmd_check(const std::string& tables_path, const std::string& topo_path,
              const std::string& intents_path, const std::string& out_path) {
  std::vector<FlowTable> tables = parse_flow_tables(read_file(tables_path));
  NetworkGraph graph = build_network_graph(read_file(topo_path));
  LoadDiagnostics diagnostics;
  IntentRepository intents =
      load_repository(read_file(intents_path), &diagnostics);
  for (const auto& [a, b] : diagnostics.duplicate_semantics)
    log::warn("intents '" + a + "' and '" + b + "' have identical semantics");

  ConsistencyReport report =
      consistency_check(extract(tables, graph).tuples, intents);
  write_output(out_path, report.to_json().dump(2) + "\n");
  return report.consistent ? 0 : 2;
}

int cmd_remediate(const std::string& state_path,
                  const std::string& scenario_path,
                  const std::string& intents_path, const std::string& out_path,
                  const std::string& save_state_path,
                  std::optional<uint64_t> seed, double export_latency_ms) {
  LoadedWorld world = load_world(state_path, scenario_path, intents_path, seed);
  world.net.set_export_latency_per_switch(export_latency_ms / 1000.0);
  CycleReport cycle =
      assurance_cycle(world.net, world.intents, world.net.graph());
  write_output(out_path, cycle.to_json().dump(2) + "\n");
  if (!save_state_path.empty())
    write_output(save_state_path, world.net.state_to_json().dump(2) + "\n");
  return 0;
}

int cmd_assure(const std::string& state_path, const std::string& scenario_path,
               const std::string& intents_path, const std::string& out_path,
               int cycles, double period, std::optional<uint64_t> seed,
               double export_latency_ms) {
  LoadedWorld world = load_world(state_path, scenario_path, intents_path, seed);
  world.net.set_export_latency_per_switch(export_latency_ms / 1000.0);
  Json reports = Json::array();
  for (int c = 0; c < cycles; ++c) {
    CycleReport cycle =
        assurance_cycle(world.net, world.intents, world.net.graph());
    reports.push_back(cycle.to_json());
    world.net.advance_clock(period);
  }
  write_output(out_path, reports.dump(2) + "\n");
  return 0;
}

int cmd_sim_run(const std::string& scenario_path, const std::string& out_path,
                const std::string& events_path,
                const std::string& save_state_path,
                const std::string& save_intents_path, int steps, bool assure,
                int period, std::optional<uint64_t> seed,
                const std::string& format, double export_latency_ms) {
  ScenarioSpec spec = ScenarioSpec::parse(read_file(scenario_path));
  if (seed) spec.seed = *seed;
  Scenario scenario = build_scenario(spec);
  SimNetwork& net = scenario.net;
  net.set_export_latency_per_switch(export_latency_ms / 1000.0);

  int last_fault_step = 0;
  for (const FaultSpec& f : spec.faults)
    last_fault_step = std::max(last_fault_step, f.at_step);
  int total_steps = steps > 0 ? steps : last_fault_step + 1;

  const std::string name = spec.topology.name();
  std::vector<MetricRow> rows;
  for (int step = 0; step < total_steps; ++step) {
    for (size_t i = 0; i < spec.faults.size(); ++i) {
      const FaultSpec& fault = spec.faults[i];
      if (fault.at_step != step) continue;
      uint64_t fseed = Rng::derive(spec.seed, 100 + i);
      if (fault.kind == FaultSpec::Kind::kHijack)
        inject_hijack(net, scenario.intents, fault.percent, fseed);
      else
        fail_nodes(net, fault.percent, fseed);
    }
    rows.push_back(MetricRow{name, spec.seed, step, "survival",
                             survival_rate(net, scenario.intents)});
    if (assure && period > 0 && step % period == 0) {
      CycleReport cycle =
          assurance_cycle(net, scenario.intents, net.graph());
      net.log_event(Json{{"clock", net.clock()},
                         {"event", "cycle"},
                         {"applied", cycle.applied},
                         {"matched", cycle.report.matched.size()},
                         {"extraneous", cycle.report.extraneous.size()},
                         {"missing", cycle.report.missing.size()},
                         {"post_consistent", cycle.post_check.consistent}});
      rows.push_back(MetricRow{name, spec.seed, step, "survival_post",
                               survival_rate(net, scenario.intents)});
    }
    net.advance_clock(1.0);
  }
  write_output(out_path, metrics_to_text(rows, format));
  if (!events_path.empty()) write_output(events_path, net.event_log_jsonl());
  if (!save_state_path.empty())
    write_output(save_state_path, net.state_to_json().dump(2) + "\n");
  if (!save_intents_path.empty())
    write_output(save_intents_path, save_repository(scenario.intents));
  return 0;
}

int cmd_bench_extraction(const std::string& range, int step, int repeat,
                         uint64_t seed, const std::string& out_path,
                         const std::string& format) {
  int lo = 10, hi = 100;
  if (!range.empty()) {
    auto pos = range.find("..");
    if (pos == std::string::npos) {
      lo = hi = std::stoi(range);
    } else {
      lo = std::stoi(range.substr(0, pos));
      hi = std::stoi(range.substr(pos + 2));
    }
  }
  if (lo < 1 || hi < lo || step < 1) throw Error("bad --intents range");

  std::vector<MetricRow> rows;
  for (int n = lo; n <= hi; n += step) {
    Scenario scenario =
        build_scenario(mesh_spec(10, 10, n, Rng::derive(seed, n)));
    std::vector<FlowTable> tables = scenario.net.export_flow_tables();
    const NetworkGraph& graph = scenario.net.graph();
    double median = median_seconds(
        repeat, [&tables, &graph] { (void)extract(tables, graph); });
    rows.push_back(
        MetricRow{"bench_extraction_mesh10x10", seed, n, "extract_median_s",
                  median});
  }
  write_output(out_path, metrics_to_text(rows, format));
  return 0;
}

int cmd_bench_recovery(const std::string& switches_list, int intents,
                       int repeat, uint64_t seed, const std::string& out_path,
                       const std::string& format, double export_latency_ms) {
  std::vector<int> sizes;
  std::stringstream ss(switches_list);
  std::string item;
  while (std::getline(ss, item, ',')) sizes.push_back(std::stoi(item));
  if (sizes.empty()) throw Error("empty --switches list");

  std::vector<MetricRow> rows;
  for (int n : sizes) {
    std::vector<double> samples;
    for (int r = 0; r < repeat; ++r) {
      Scenario scenario = build_scenario(recovery_spec(n, intents, seed));
      scenario.net.set_export_latency_per_switch(export_latency_ms / 1000.0);
      inject_hijack(scenario.net, scenario.intents, 100.0,
                    Rng::derive(seed, 7000 + r));
      CycleReport cycle = assurance_cycle(scenario.net, scenario.intents,
                                          scenario.net.graph());
      if (!cycle.post_check.consistent)
        log::warn("recovery bench at " + std::to_string(n) +
                  " switches did not converge");
      samples.push_back(cycle.elapsed_s);
    }
    std::sort(samples.begin(), samples.end());
    rows.push_back(MetricRow{"bench_recovery", seed, n, "cycle_median_s",
                             samples[samples.size() / 2]});
  }
  write_output(out_path, metrics_to_text(rows, format));
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{
      "safla: bottom-up intent extraction, consistency checking, and "
      "self-healing remediation for SDN flow tables.\n"
      "Survival probes instantiate ANY intent slots with fixed defaults "
      "(proto tcp, dst_port 80, src_port 40000, vlan 0). Log verbosity via "
      "SAFLA_LOG=error|warn|info|debug."};
  app.require_subcommand(1);

  std::string tables_path, topo_path, intents_path, scenario_path, state_path;
  std::string out_path, events_path, save_state_path, save_intents_path;
  std::string format = "csv";
  std::string intents_range = "10..100", switches_list = "1,50,100,200,400";
  std::optional<uint64_t> seed_override;
  uint64_t seed = 0;
  int cycles = 1, period = 1, steps = 0, repeat = 5, range_step = 10;
  int bench_intents = 60;
  double period_s = 1.0, export_latency_ms = 2.0;
  bool assure_flag = false;

  auto add_io = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "Output path (default stdout)");
  };
  auto add_latency = [&](CLI::App* cmd) {
    cmd->add_option("--export-latency-ms", export_latency_ms,
                    "Modeled per-switch flow-table export latency "
                    "(milliseconds, default 2.0)");
  };

  CLI::App* extract_cmd = app.add_subcommand(
      "extract", "Extract deployed endpoint tuples from flow tables");
  extract_cmd->add_option("--tables", tables_path, "Flow-table document")
      ->required();
  extract_cmd->add_option("--topology", topo_path, "Topology document")
      ->required();
  add_io(extract_cmd);

  CLI::App* check_cmd = app.add_subcommand(
      "check",
      "Check extracted tuples against the intent repository "
      "(exit 0 consistent, 2 inconsistent, 1 error)");
  check_cmd->add_option("--tables", tables_path, "Flow-table document")
      ->required();
  check_cmd->add_option("--topology", topo_path, "Topology document")
      ->required();
  check_cmd->add_option("--intents", intents_path, "Intent repository")
      ->required();
  add_io(check_cmd);

  CLI::App* remediate_cmd = app.add_subcommand(
      "remediate", "Run one assurance cycle against a simulator state");
  remediate_cmd->add_option("--state", state_path, "Simulator state file");
  remediate_cmd->add_option("--scenario", scenario_path,
                            "Scenario file (faults applied before the cycle)");
  remediate_cmd->add_option("--intents", intents_path, "Intent repository");
  remediate_cmd->add_option("--seed", seed_override,
                            "Override the scenario seed");
  remediate_cmd->add_option("--save-state", save_state_path,
                            "Write the post-cycle state here");
  add_io(remediate_cmd);
  add_latency(remediate_cmd);

  CLI::App* assure_cmd = app.add_subcommand(
      "assure", "Run the assurance loop for --cycles iterations");
  assure_cmd->add_option("--state", state_path, "Simulator state file");
  assure_cmd->add_option("--scenario", scenario_path, "Scenario file");
  assure_cmd->add_option("--intents", intents_path, "Intent repository");
  assure_cmd->add_option("--cycles", cycles, "Cycle count (default 1)");
  assure_cmd->add_option(
      "--period", period_s,
      "Simulated seconds the clock advances between cycles (default 1)");
  assure_cmd->add_option("--seed", seed_override, "Override the scenario seed");
  add_io(assure_cmd);
  add_latency(assure_cmd);

  CLI::App* sim_cmd = app.add_subcommand("sim", "Scenario simulator");
  CLI::App* sim_run_cmd = sim_cmd->add_subcommand(
      "run", "Execute a scenario step by step and emit metrics");
  sim_run_cmd->add_option("--scenario", scenario_path, "Scenario file")
      ->required();
  sim_run_cmd->add_option("--steps", steps,
                          "Steps to run (default: last fault step + 1)");
  sim_run_cmd->add_flag("--assure", assure_flag,
                        "Run the assurance loop while stepping");
  sim_run_cmd->add_option("--period", period,
                          "Assurance period in simulated steps (default 1)");
  sim_run_cmd->add_option("--seed", seed_override,
                          "Override the scenario seed");
  sim_run_cmd->add_option("--events", events_path,
                          "Write the event log (JSON lines) here");
  sim_run_cmd->add_option("--save-state", save_state_path,
                          "Write the final simulator state here");
  sim_run_cmd->add_option("--save-intents", save_intents_path,
                          "Write the scenario's intent repository here");
  sim_run_cmd->add_option("--format", format, "Metrics format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  add_io(sim_run_cmd);
  add_latency(sim_run_cmd);

  CLI::App* bench_cmd = app.add_subcommand("bench", "Benchmark harnesses");
  CLI::App* bench_extraction_cmd = bench_cmd->add_subcommand(
      "extraction", "Extraction time over an intent-count grid, Mesh(10,10)");
  bench_extraction_cmd->add_option("--intents", intents_range,
                                   "Grid, e.g. 10..100 (default)");
  bench_extraction_cmd->add_option("--step", range_step,
                                   "Grid step (default 10)");
  bench_extraction_cmd->add_option("--repeat", repeat,
                                   "Samples per point (default 5)");
  bench_extraction_cmd->add_option("--seed", seed, "Base seed (default 0)");
  bench_extraction_cmd
      ->add_option("--format", format, "Metrics format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  add_io(bench_extraction_cmd);

  CLI::App* bench_recovery_cmd = bench_cmd->add_subcommand(
      "recovery",
      "Hijack detection+remediation cycle time over a switch-count grid");
  bench_recovery_cmd->add_option("--switches", switches_list,
                                 "Comma list (default 1,50,100,200,400)");
  bench_recovery_cmd->add_option("--intents", bench_intents,
                                 "Intent count (default 60)");
  bench_recovery_cmd->add_option("--repeat", repeat,
                                 "Samples per point (default 5)");
  bench_recovery_cmd->add_option("--seed", seed, "Base seed (default 0)");
  bench_recovery_cmd->add_option("--format", format, "Metrics format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  add_io(bench_recovery_cmd);
  add_latency(bench_recovery_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (extract_cmd->parsed())
      return cmd_extract(tables_path, topo_path, out_path);
    if (check_cmd->parsed())
      return cmd_check(tables_path, topo_path, intents_path, out_path);
    if (remediate_cmd->parsed())
      return cmd_remediate(state_path, scenario_path, intents_path, out_path,
                           save_state_path, seed_override, export_latency_ms);
    if (assure_cmd->parsed())
      return cmd_assure(state_path, scenario_path, intents_path, out_path,
                        cycles, period_s, seed_override, export_latency_ms);
    if (sim_cmd->parsed() && sim_run_cmd->parsed())
      return cmd_sim_run(scenario_path, out_path, events_path, save_state_path,
                         save_intents_path, steps, assure_flag, period,
                         seed_override, format, export_latency_ms);
    if (bench_cmd->parsed() && bench_extraction_cmd->parsed())
      return cmd_bench_extraction(intents_range, range_step, repeat, seed,
                                  out_path, format);
    if (bench_cmd->parsed() && bench_recovery_cmd->parsed())
      return cmd_bench_recovery(switches_list, bench_intents, repeat, seed,
                                out_path, format, export_latency_ms);
    std::cerr << "no subcommand given\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace safla::cli
