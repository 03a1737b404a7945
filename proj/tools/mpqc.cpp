// Copyright 2026 The mpqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// mpqc command-line driver.
//
//   mpqc partition   --device D [-m 4]
//   mpqc compile     --program P.qasm --device D [-m 4] --out-dir DIR
//   mpqc orchestrate MANIFEST... [--strategy S] [--crosstalk X] [--seed N]
//   mpqc run         FILE... --device D [--shots N] [--selection SEL] [--csv C]
//   mpqc bench       --sweep K --device D [-m 4] --out report.csv
//
// JSON goes to --out when given, stdout otherwise. Errors print to stderr
// and exit with status 1; usage errors exit with CLI11's status.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mpqc/bench.hpp"
#include "mpqc/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace mpqc::cli {
namespace {

void emit(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json(out, j);
  }
}

std::optional<CrosstalkMap> maybe_crosstalk(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return load_crosstalk(path);
}

// partition ------------------------------------------------------------------

struct PartitionArgs {
  std::string device;
  int unit_size{4};
  std::string out;
};

void run_partition(const PartitionArgs& a) {
  const auto g = load_calibration(a.device);
  const auto ug = generate_compute_units(g, a.unit_size);
  json units = json::array();
  for (const auto& u : ug.units) {
    units.push_back(
        {{"id", u.id}, {"qubits", u.qubits}, {"utility", u.utility}, {"residual", u.residual}});
  }
  json edges = json::array();
  for (auto [x, y] : ug.edges) edges.push_back({x, y});
  emit({{"device", a.device},
        {"num_qubits", g.num_qubits()},
        {"unit_size", ug.unit_size},
        {"full_units", ug.num_full_units()},
        {"units", units},
        {"edges", edges}},
       a.out);
}

// compile --------------------------------------------------------------------

struct CompileArgs {
  std::string program;
  std::string device;
  int unit_size{4};
  std::string out_dir;
  unsigned workers{0};
};

void run_compile(const CompileArgs& a) {
  const auto c = load_qasm(a.program);
  const auto g = load_calibration(a.device);
  const auto start = std::chrono::steady_clock::now();
  const auto ug = generate_compute_units(g, a.unit_size);
  const auto p = compile_multi_version(c, ug, g, {}, a.workers ? a.workers : default_workers());
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  const auto manifest = write_process(a.out_dir, c, p, a.unit_size);
  std::cout << manifest.string() << '\n';
  std::cerr << p.program_name << ": " << p.size() << " executables in " << elapsed.count()
            << " s\n";
}

// orchestrate ----------------------------------------------------------------

struct OrchestrateArgs {
  std::vector<std::string> manifests;
  std::string strategy{"small_first"};
  std::string crosstalk;
  std::uint64_t seed{0};
  double timeout_ms{10000.0};
  std::string objective{"index_sum"};
  bool vanilla{false};
  double compile_reference{0.0};
  std::string out;
};

std::vector<Process> load_processes(const std::vector<std::string>& manifests) {
  std::vector<Process> procs;
  for (const auto& m : manifests) procs.push_back(read_process(m).process);
  return procs;
}

void run_orchestrate(const OrchestrateArgs& a) {
  const auto procs = load_processes(a.manifests);
  const auto xt = maybe_crosstalk(a.crosstalk);
  const Strategy s = parse_strategy(a.strategy);
  Selection sel;
  if (s == Strategy::brute_force) {
    if (xt) throw ValidationError("the crosstalk filter applies to the greedy strategies only");
    BruteForceOptions opts;
    opts.timeout = std::chrono::nanoseconds(static_cast<std::int64_t>(a.timeout_ms * 1e6));
    if (a.objective == "relative_position") {
      opts.objective = Objective::relative_position;
    } else if (a.objective != "index_sum") {
      throw ValidationError("unknown objective: " + a.objective);
    }
    sel = select_brute_force(procs, opts);
  } else {
    HeuristicOptions opts;
    opts.seed = a.seed;
    opts.crosstalk = xt ? &*xt : nullptr;
    opts.shuffle_executables = a.vanilla;
    sel = select_heuristic(procs, s, opts);
  }
  json j = selection_to_json(sel, procs);
  json files = json::array();
  for (std::size_t i = 0; i < sel.chosen.size(); ++i) {
    const auto manifest = read_json(a.manifests[sel.chosen[i].process]);
    files.push_back((fs::path(a.manifests[sel.chosen[i].process]).parent_path() /
                     manifest.at("executables").at(sel.chosen[i].index).at("file").get<std::string>())
                        .string());
  }
  j["files"] = files;
  j["conflict_free"] = selection_is_conflict_free(sel, procs, xt ? &*xt : nullptr);
  if (a.compile_reference > 0.0) {
    const auto r = orchestration_cost_report(sel, procs, std::chrono::duration<double>(a.compile_reference));
    j["crf"] = r.crf;
    j["candidate_bound"] = r.candidate_bound;
  }
  emit(j, a.out);
}

// run ------------------------------------------------------------------------

struct RunArgs {
  std::vector<std::string> inputs;
  std::string device;
  std::uint64_t shots{1U << 14};
  std::uint64_t seed{0};
  std::uint64_t trajectories{512};
  double cycle_ns{300.0};
  std::string crosstalk;
  std::string selection;
  std::string out;
  std::string csv;
};

struct Loaded {
  std::string file;
  Executable exe;
};

std::vector<Loaded> load_inputs(const RunArgs& a) {
  std::vector<std::size_t> ranks(a.inputs.size(), 0);
  if (!a.selection.empty()) {
    const auto sel = read_json(a.selection);
    for (const auto& c : sel.at("chosen")) {
      const auto p = c.at("process").get<std::size_t>();
      if (p >= ranks.size()) throw ValidationError("selection names process " + std::to_string(p));
      ranks[p] = c.at("rank").get<std::size_t>() - 1;
    }
  }
  std::vector<Loaded> out;
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    const auto doc = read_json(a.inputs[i]);
    if (doc.contains("executables")) {
      auto lp = read_process(a.inputs[i]);
      if (ranks[i] >= lp.process.size()) throw ValidationError(a.inputs[i] + ": rank out of range");
      out.push_back({lp.files[ranks[i]].string(), lp.process.executables[ranks[i]]});
    } else {
      out.push_back({a.inputs[i], executable_from_json(doc)});
    }
  }
  return out;
}

void run_run(const RunArgs& a) {
  const auto g = load_calibration(a.device);
  const auto xt = maybe_crosstalk(a.crosstalk);
  const auto execs = load_inputs(a);
  std::set<int> claimed;
  for (const auto& l : execs) {
    for (int q : l.exe.region.qubits) {
      if (q < 0 || q >= g.num_qubits()) throw ValidationError(l.file + ": qubit outside the device");
      if (!claimed.insert(q).second) {
        throw ValidationError(l.file + ": region overlaps another co-running executable");
      }
    }
  }
  json results = json::array();
  std::ofstream csv;
  if (!a.csv.empty()) {
    csv.open(a.csv);
    if (!csv) throw Error("cannot write " + a.csv);
    csv << "program,file,shots,seed,fidelity,swaps,d_in,d_out,qpu_time_ns\n";
    csv.precision(10);
  }
  for (std::size_t i = 0; i < execs.size(); ++i) {
    const auto& e = execs[i].exe;
    NoiseSpec spec;
    spec.shots = a.shots;
    spec.seed = a.seed + i;
    spec.trajectories = a.trajectories;
    if (xt) {
      spec.crosstalk = xt;
      for (std::size_t j = 0; j < execs.size(); ++j) {
        if (j == i) continue;
        for (int q : execs[j].exe.region.qubits) spec.co_running.push_back(q);
      }
    }
    const auto ideal = simulate_executable_ideal(e);
    const auto noisy = simulate_noisy(e, spec, g);
    const double f = fidelity(ideal, noisy);
    const double qpu_ns = estimate_qpu_time(e, std::chrono::duration<double, std::nano>(a.cycle_ns), a.shots).count();
    results.push_back({{"program", e.program_name},
                       {"file", execs[i].file},
                       {"units", e.region.unit_ids},
                       {"fidelity", f},
                       {"qpu_time_ns", qpu_ns},
                       {"ideal", distribution_to_json(ideal)},
                       {"noisy", distribution_to_json(noisy)}});
    if (csv.is_open()) {
      csv << e.program_name << ',' << detail::csv_escape(execs[i].file) << ',' << a.shots << ','
          << spec.seed << ',' << f << ',' << e.swaps << ',' << e.d_in << ',' << e.d_out << ','
          << qpu_ns << '\n';
    }
  }
  emit({{"device", a.device}, {"shots", a.shots}, {"seed", a.seed}, {"results", results}}, a.out);
}

// bench ----------------------------------------------------------------------

struct BenchArgs {
  std::string sweep{"unit_size"};
  std::string device;
  std::string benchmarks{"benchmarks"};
  int unit_size{4};
  std::string strategy{"random"};
  std::string mode{"aware"};
  std::uint64_t seed{1};
  std::uint64_t shots{1U << 14};
  std::uint64_t trajectories{512};
  std::size_t groups{10};
  std::size_t group_size{2};
  int max_qubits{kMaxSimQubits};
  std::vector<double> values;
  std::string crosstalk;
  bool no_simulate{false};
  bool ranking{false};
  unsigned workers{0};
  std::string out;
  std::string summary;
};

void run_bench(const BenchArgs& a) {
  const auto g = load_calibration(a.device);
  const auto suite = load_suite(a.benchmarks);
  SweepConfig sc;
  sc.kind = parse_sweep(a.sweep);
  sc.device_tag = fs::path(a.device).stem().string();
  sc.max_program_qubits = a.max_qubits;
  sc.groups = a.groups;
  sc.group_size = a.group_size;
  sc.values = a.values;
  sc.base.unit_size = a.unit_size;
  sc.base.strategy = parse_strategy(a.strategy);
  sc.base.mode = parse_mode(a.mode);
  sc.base.seed = a.seed;
  sc.base.shots = a.shots;
  sc.base.trajectories = a.trajectories;
  sc.base.simulate = !a.no_simulate;
  sc.base.crosstalk = maybe_crosstalk(a.crosstalk);
  sc.base.workers = a.workers ? a.workers : default_workers();
  const auto result = run_sweep(suite, g, sc);

  std::ofstream csv(a.out);
  if (!csv) throw Error("cannot write " + a.out);
  write_csv(csv, result);

  std::optional<RankingResult> ranking;
  if (a.ranking) {
    const auto small = suite.filtered(a.max_qubits);  // the context keeps a reference
    ExperimentContext ctx(small, g, a.unit_size, sc.base.workers);
    ranking = ranking_correlation(ctx, g, sc.base, sc.device_tag);
  }
  auto summary_path = a.summary;
  if (summary_path.empty()) summary_path = fs::path(a.out).replace_extension(".summary.json").string();
  write_json(summary_path, summary_json(result, ranking));
  std::cerr << "wrote " << a.out << " and " << summary_path << '\n';
}

}  // namespace
}  // namespace mpqc::cli

int main(int argc, char** argv) {
  using namespace mpqc::cli;
  CLI::App app{"Multi-version compilation and runtime orchestration for multiprogrammed QPUs"};
  app.require_subcommand(1);

  PartitionArgs pa;
  auto* part = app.add_subcommand("partition", "Split a device into compute units");
  part->add_option("--device", pa.device, "Calibration JSON")->required()->check(CLI::ExistingFile);
  part->add_option("-m,--unit-size", pa.unit_size, "Qubits per compute unit")->check(CLI::PositiveNumber);
  part->add_option("-o,--out", pa.out, "Output JSON (default stdout)");

  CompileArgs ca;
  auto* comp = app.add_subcommand("compile", "Compile one program into ranked executables");
  comp->add_option("--program", ca.program, "OpenQASM 2 file")->required()->check(CLI::ExistingFile);
  comp->add_option("--device", ca.device, "Calibration JSON")->required()->check(CLI::ExistingFile);
  comp->add_option("-m,--unit-size", ca.unit_size, "Qubits per compute unit")->check(CLI::PositiveNumber);
  comp->add_option("--out-dir", ca.out_dir, "Directory for executables and the manifest")->required();
  comp->add_option("--workers", ca.workers, "Worker threads (default MPQC_WORKERS)");

  OrchestrateArgs oa;
  auto* orch = app.add_subcommand("orchestrate", "Pick one executable per process");
  orch->add_option("manifests", oa.manifests, "Process manifests")->required()->check(CLI::ExistingFile);
  orch->add_option("--strategy", oa.strategy, "random, small_first, large_first or brute_force");
  orch->add_option("--crosstalk", oa.crosstalk, "Crosstalk map JSON")->check(CLI::ExistingFile);
  orch->add_option("--seed", oa.seed, "Seed for the random strategy");
  orch->add_option("--timeout-ms", oa.timeout_ms, "Brute-force time limit")->check(CLI::PositiveNumber);
  orch->add_option("--objective", oa.objective, "index_sum or relative_position");
  orch->add_flag("--vanilla", oa.vanilla, "Ignore the cost ranking (shuffle executables)");
  orch->add_option("--compile-reference", oa.compile_reference,
                   "Online compile time in seconds, to report the reduction factor");
  orch->add_option("-o,--out", oa.out, "Output JSON (default stdout)");

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Simulate co-running executables");
  run->add_option("inputs", ra.inputs, "Executable files or process manifests")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--device", ra.device, "Calibration JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--shots", ra.shots, "Shots per executable")->check(CLI::PositiveNumber);
  run->add_option("--seed", ra.seed, "Simulation seed");
  run->add_option("--trajectories", ra.trajectories, "Error trajectories (0 = one per shot)");
  run->add_option("--cycle-ns", ra.cycle_ns, "Layer time for the QPU time estimate")
      ->check(CLI::PositiveNumber);
  run->add_option("--crosstalk", ra.crosstalk, "Crosstalk map JSON")->check(CLI::ExistingFile);
  run->add_option("--selection", ra.selection, "Selection report choosing manifest versions")
      ->check(CLI::ExistingFile);
  run->add_option("-o,--out", ra.out, "Output JSON (default stdout)");
  run->add_option("--csv", ra.csv, "Per-program CSV");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Run a seeded fidelity sweep");
  bench->add_option("--sweep", ba.sweep, "unit_size, concurrency, variation or crosstalk");
  bench->add_option("--device", ba.device, "Calibration JSON")->required()->check(CLI::ExistingFile);
  bench->add_option("--benchmarks", ba.benchmarks, "Suite directory with suite.txt")
      ->check(CLI::ExistingDirectory);
  bench->add_option("-m,--unit-size", ba.unit_size, "Qubits per compute unit")->check(CLI::PositiveNumber);
  bench->add_option("--strategy", ba.strategy, "Orchestration strategy");
  bench->add_option("--mode", ba.mode, "aware, vanilla or oracle");
  bench->add_option("--seed", ba.seed, "Experiment seed");
  bench->add_option("--shots", ba.shots, "Shots per executable")->check(CLI::PositiveNumber);
  bench->add_option("--trajectories", ba.trajectories, "Error trajectories (0 = one per shot)");
  bench->add_option("--groups", ba.groups, "Groups per point")->check(CLI::PositiveNumber);
  bench->add_option("--group-size", ba.group_size, "Programs per group")->check(CLI::PositiveNumber);
  bench->add_option("--max-qubits", ba.max_qubits, "Leave out wider programs");
  bench->add_option("--values", ba.values, "Swept values (default per sweep)");
  bench->add_option("--crosstalk", ba.crosstalk, "Crosstalk map JSON")->check(CLI::ExistingFile);
  bench->add_flag("--no-simulate", ba.no_simulate, "Record orchestration outcomes only");
  bench->add_flag("--ranking", ba.ranking, "Add cost-rank vs fidelity correlations to the summary");
  bench->add_option("--workers", ba.workers, "Worker threads (default MPQC_WORKERS)");
  bench->add_option("-o,--out", ba.out, "CSV report")->required();
  bench->add_option("--summary", ba.summary, "JSON summary (default <out>.summary.json)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*part) run_partition(pa);
    if (*comp) run_compile(ca);
    if (*orch) run_orchestrate(oa);
    if (*run) run_run(ra);
    if (*bench) run_bench(ba);
  } catch (const mpqc::Error& e) {
    std::cerr << "mpqc: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "mpqc: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
