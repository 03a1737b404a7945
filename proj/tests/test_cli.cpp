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

// Drives the mpqc binary end to end through a temporary directory.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <catch_amalgamated.hpp>

#include "mpqc/bench.hpp"
#include "mpqc/io.hpp"
#include "test_util.hpp"

using namespace mpqc;
namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("mpqc_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string operator/(const std::string& f) const { return (dir / f).string(); }
};

std::string device() { return test::device_path("heavyhex27"); }
std::string program(const std::string& name) {
  return (test::benchmark_dir() / (name + ".qasm")).string();
}

/// Runs the CLI with stdout/stderr captured to files; returns the exit code.
int mpqc_cli(const std::string& args, const Workspace& ws, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(MPQC_CLI_PATH) + " " + args + " > " + (ws / "stdout") +
                          " 2> " + (ws / "stderr");
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string compile(const Workspace& ws, const std::string& name) {
  REQUIRE(mpqc_cli("compile --program " + program(name) + " --device " + device() +
                       " -m 4 --out-dir " + (ws / "out"),
                   ws) == 0);
  auto path = slurp(ws / "stdout");
  while (!path.empty() && path.back() == '\n') path.pop_back();
  return path;
}

}  // namespace

TEST_CASE("partition reports units and edges", "[cli]") {
  Workspace ws;
  REQUIRE(mpqc_cli("partition --device " + device() + " -m 4 -o " + (ws / "p.json"), ws) == 0);
  const auto j = read_json(ws / "p.json");
  CHECK(j["unit_size"] == 4);
  CHECK(j["full_units"] == 6);
  const auto ug = generate_compute_units(load_calibration(device()), 4);
  REQUIRE(j["units"].size() == ug.units.size());
  for (std::size_t i = 0; i < ug.units.size(); ++i) {
    CHECK(j["units"][i]["qubits"].get<std::vector<int>>() == ug.units[i].qubits);
    CHECK(j["units"][i]["utility"].get<double>() == Catch::Approx(ug.units[i].utility));
  }
  CHECK(j["edges"].size() == ug.edges.size());
}

TEST_CASE("compile, orchestrate and run chain together", "[cli]") {
  Workspace ws;
  const auto a = compile(ws, "deutsch_n2");
  const auto b = compile(ws, "fredkin_n3");
  const auto c = compile(ws, "cat_state_n4");
  CHECK(fs::exists(a));
  const auto loaded = read_process(a);
  CHECK(loaded.process.program_name == "deutsch_n2");
  CHECK(loaded.process.size() == 6);

  const std::string manifests = a + " " + b + " " + c;
  for (const std::string strategy : {"random", "small_first", "large_first", "brute_force"}) {
    REQUIRE(mpqc_cli("orchestrate " + manifests + " --strategy " + strategy + " -o " + (ws / "sel.json"),
                     ws) == 0);
    const auto sel = read_json(ws / "sel.json");
    CHECK(sel["strategy"] == strategy);
    CHECK(sel["conflict_free"] == true);
    CHECK(sel["chosen"].size() == 3);
    CHECK(sel["files"].size() == 3);
  }

  REQUIRE(mpqc_cli("run " + manifests + " --selection " + (ws / "sel.json") + " --device " + device() +
                       " --shots 2048 --seed 5 --csv " + (ws / "run.csv") + " -o " + (ws / "run.json"),
                   ws) == 0);
  const auto run = read_json(ws / "run.json");
  REQUIRE(run["results"].size() == 3);
  for (const auto& r : run["results"]) {
    const double f = r["fidelity"].get<double>();
    CHECK(f > 0.5);
    CHECK(f <= 1.0);
    double total = 0.0;
    for (const auto& [k, p] : r["noisy"]["probabilities"].items()) total += p.get<double>();
    CHECK(total == Catch::Approx(1.0).margin(1e-9));
  }
  const auto csv = slurp(ws / "run.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  // Same seed, same numbers.
  REQUIRE(mpqc_cli("run " + manifests + " --selection " + (ws / "sel.json") + " --device " + device() +
                       " --shots 2048 --seed 5 -o " + (ws / "run2.json"),
                   ws) == 0);
  CHECK(read_json(ws / "run2.json")["results"] == run["results"]);
}

TEST_CASE("run rejects overlapping executables", "[cli][errors]") {
  Workspace ws;
  const auto a = compile(ws, "deutsch_n2");
  // Rank 1 twice claims the same region.
  CHECK(mpqc_cli("run " + a + " " + a + " --device " + device(), ws) == 1);
  CHECK(slurp(ws / "stderr").find("overlaps") != std::string::npos);
}

TEST_CASE("crosstalk map flows through orchestrate", "[cli][crosstalk]") {
  Workspace ws;
  const auto a = compile(ws, "deutsch_n2");
  const auto b = compile(ws, "fredkin_n3");
  const auto map = random_crosstalk_map(load_calibration(device()), 0.5, 3);
  write_json(ws / "xt.json", crosstalk_to_json(map));
  REQUIRE(mpqc_cli("orchestrate " + a + " " + b + " --strategy small_first --crosstalk " + (ws / "xt.json") +
                       " -o " + (ws / "sel.json"),
                   ws) == 0);
  CHECK(read_json(ws / "sel.json")["conflict_free"] == true);
  REQUIRE(mpqc_cli("run " + a + " " + b + " --selection " + (ws / "sel.json") + " --device " + device() +
                       " --crosstalk " + (ws / "xt.json") + " --shots 512 -o " + (ws / "r.json"),
                   ws) == 0);
}

TEST_CASE("bench writes csv and summary", "[cli][bench]") {
  Workspace ws;
  REQUIRE(mpqc_cli("bench --sweep unit_size --values 2 4 --device " + device() + " --benchmarks " +
                       test::benchmark_dir().string() + " --groups 3 --max-qubits 5 --shots 512" +
                       " --trajectories 16 --ranking -o " + (ws / "r.csv"),
                   ws, "MPQC_WORKERS=2") == 0);
  const auto csv = slurp(ws / "r.csv");
  CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  const auto summary = read_json(ws / "r.summary.json");
  CHECK(summary["sweep"] == "unit_size");
  REQUIRE(summary["points"].size() == 2);
  CHECK(summary["points"][1]["unit_size"] == 4);
  CHECK(summary["ranking_spearman"].contains("mean"));
}

TEST_CASE("bad invocations fail cleanly", "[cli][errors]") {
  Workspace ws;
  CHECK(mpqc_cli("", ws) != 0);
  CHECK(mpqc_cli("partition", ws) != 0);
  CHECK(mpqc_cli("partition --device " + (ws / "missing.json"), ws) != 0);
  std::ofstream(ws / "bad.qasm") << "OPENQASM 2.0;\nqreg q[2];\nfoo q[0];\n";
  CHECK(mpqc_cli("compile --program " + (ws / "bad.qasm") + " --device " + device() + " --out-dir " +
                     (ws / "o"),
                 ws) == 1);
  CHECK_FALSE(slurp(ws / "stderr").empty());
  const auto a = compile(ws, "deutsch_n2");
  CHECK(mpqc_cli("orchestrate " + a + " --strategy fastest", ws) == 1);
  CHECK(mpqc_cli("bench --sweep noise --device " + device() + " -o " + (ws / "x.csv"), ws) != 0);
}
