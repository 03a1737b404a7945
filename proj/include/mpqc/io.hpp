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

// JSON artifacts exchanged between the offline compiler and the runtime:
//
//   executable   {"program", "num_qubits", "num_clbits", "region": {"units",
//                 "qubits"}, "layout", "final_layout", "swaps", "d_in",
//                 "d_out", "cost": {"depth_ratio", "region_utility"},
//                 "gates": [{"op", "qubits", "params"?, "clbit"?}, ...]}
//   process      {"program", "num_qubits", "unit_size", "source_qasm",
//                 "executables": [{"rank", "file", "units", "cost"}, ...]}
//                 with entries ordered by rank (1 = best).

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mpqc/circuit.hpp"
#include "mpqc/compiler.hpp"
#include "mpqc/error.hpp"
#include "mpqc/orchestrator.hpp"
#include "mpqc/partition.hpp"
#include "mpqc/qasm.hpp"
#include "mpqc/simulator.hpp"

namespace mpqc {

using nlohmann::json;

inline json gate_to_json(const Gate& g) {
  json j{{"op", std::string(op_name(g.op))}, {"qubits", g.qubits}};
  if (!g.params.empty()) j["params"] = g.params;
  if (g.op == OpCode::measure) j["clbit"] = g.clbit;
  return j;
}

inline Gate gate_from_json(const json& j) {
  const auto name = j.at("op").get<std::string>();
  const auto op = op_from_name(name);
  if (!op) throw UnsupportedError("gate '" + name + "'");
  Gate g;
  g.op = *op;
  g.qubits = j.at("qubits").get<std::vector<int>>();
  if (j.contains("params")) g.params = j.at("params").get<std::vector<double>>();
  if (j.contains("clbit")) g.clbit = j.at("clbit").get<int>();
  return g;
}

inline json cost_to_json(const Cost& c) {
  return {{"depth_ratio", c.depth_ratio}, {"region_utility", c.region_utility}};
}

inline json region_to_json(const Region& r) {
  return {{"units", r.unit_ids}, {"qubits", r.qubits}};
}

inline json executable_to_json(const Executable& e) {
  json gates = json::array();
  for (const auto& g : e.routed_gates) gates.push_back(gate_to_json(g));
  return {{"program", e.program_name},
          {"num_qubits", e.num_qubits},
          {"num_clbits", e.num_clbits},
          {"region", region_to_json(e.region)},
          {"layout", e.layout},
          {"final_layout", e.final_layout},
          {"swaps", e.swaps},
          {"d_in", e.d_in},
          {"d_out", e.d_out},
          {"cost", cost_to_json(e.cost)},
          {"gates", gates}};
}

inline Executable executable_from_json(const json& j) {
  try {
    Executable e;
    e.program_name = j.at("program").get<std::string>();
    e.num_qubits = j.at("num_qubits").get<int>();
    e.num_clbits = j.at("num_clbits").get<int>();
    e.region.unit_ids = j.at("region").at("units").get<std::vector<int>>();
    e.region.qubits = j.at("region").at("qubits").get<std::vector<int>>();
    e.layout = j.at("layout").get<Layout>();
    e.final_layout = j.at("final_layout").get<Layout>();
    e.swaps = j.at("swaps").get<int>();
    e.d_in = j.at("d_in").get<int>();
    e.d_out = j.at("d_out").get<int>();
    e.cost.depth_ratio = j.at("cost").at("depth_ratio").get<double>();
    e.cost.region_utility = j.at("cost").at("region_utility").get<double>();
    for (const auto& g : j.at("gates")) e.routed_gates.push_back(gate_from_json(g));
    return e;
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("malformed executable: ") + ex.what());
  }
}

inline json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

/// Writes one executable file per version plus `<program>.process.json`.
/// Returns the manifest path.
inline std::filesystem::path write_process(const std::filesystem::path& dir,
                                           const Circuit& source, const Process& p,
                                           int unit_size) {
  std::filesystem::create_directories(dir);
  json entries = json::array();
  for (std::size_t i = 0; i < p.executables.size(); ++i) {
    const auto& e = p.executables[i];
    const std::string file = p.program_name + ".v" + std::to_string(i + 1) + ".json";
    write_json(dir / file, executable_to_json(e));
    entries.push_back({{"rank", i + 1},
                       {"file", file},
                       {"units", e.region.unit_ids},
                       {"cost", cost_to_json(e.cost)}});
  }
  const auto manifest = dir / (p.program_name + ".process.json");
  write_json(manifest, {{"program", p.program_name},
                        {"num_qubits", p.num_qubits},
                        {"unit_size", unit_size},
                        {"source_qasm", to_qasm(source)},
                        {"executables", entries}});
  return manifest;
}

struct LoadedProcess {
  Process process;
  Circuit source;
  std::vector<std::filesystem::path> files;  // executable paths by rank
};

inline LoadedProcess read_process(const std::filesystem::path& manifest) {
  const json j = read_json(manifest);
  LoadedProcess out;
  try {
    out.process.program_name = j.at("program").get<std::string>();
    out.process.num_qubits = j.at("num_qubits").get<int>();
    out.source = parse_qasm(j.at("source_qasm").get<std::string>(), out.process.program_name);
    for (const auto& entry : j.at("executables")) {
      const auto path = manifest.parent_path() / entry.at("file").get<std::string>();
      out.process.executables.push_back(executable_from_json(read_json(path)));
      out.files.push_back(path);
    }
  } catch (const json::exception& ex) {
    throw ValidationError(manifest.string() + ": malformed process manifest: " + ex.what());
  }
  if (out.process.executables.empty()) {
    throw ValidationError(manifest.string() + ": process has no executables");
  }
  return out;
}

inline json distribution_to_json(const Distribution& d) {
  json probs = json::object();
  for (const auto& [k, p] : d.probs) probs[d.label(k)] = p;
  return {{"width", d.width}, {"probabilities", probs}};
}

inline json selection_to_json(const Selection& sel, std::span<const Process> processes) {
  json chosen = json::array();
  for (std::size_t i = 0; i < sel.chosen.size(); ++i) {
    const auto& c = sel.chosen[i];
    const auto& e = sel.executable(processes, i);
    chosen.push_back({{"process", c.process},
                      {"program", processes[c.process].program_name},
                      {"rank", c.index + 1},
                      {"versions", processes[c.process].size()},
                      {"units", e.region.unit_ids},
                      {"cost", cost_to_json(e.cost)}});
  }
  return {{"strategy", std::string(strategy_name(sel.strategy))},
          {"index_sum", sel.index_sum},
          {"elapsed_ns", sel.elapsed.count()},
          {"evaluations", sel.evaluations},
          {"order", sel.order},
          {"chosen", chosen}};
}

}  // namespace mpqc
