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

#include <random>
#include <set>
#include <sstream>

#include <catch_amalgamated.hpp>

#include "mpqc/bench.hpp"
#include "test_util.hpp"

using namespace mpqc;

namespace {

const Suite& suite() {
  static const Suite s = load_suite(test::benchmark_dir());
  return s;
}

const DeviceGraph& device27() {
  static const DeviceGraph g = load_calibration(test::device_path("heavyhex27"));
  return g;
}

ExperimentConfig quick_config() {
  ExperimentConfig cfg;
  cfg.shots = 1024;
  cfg.trajectories = 32;
  cfg.workers = 1;
  return cfg;
}

ExperimentReport report_with(int ok, int failed) {
  ExperimentReport r;
  for (int i = 0; i < ok + failed; ++i) {
    GroupRecord g;
    g.group.id = static_cast<std::size_t>(i);
    g.success = i < ok;
    r.records.push_back(g);
  }
  return r;
}

}  // namespace

TEST_CASE("suite loads in table order", "[bench]") {
  REQUIRE(suite().size() == 30);
  CHECK(suite()[1].name() == "adder_n4");
  for (const auto& c : suite().programs) {
    CHECK(c.num_qubits() >= 2);
    CHECK(c.num_qubits() <= 10);
  }
  const auto small = suite().filtered(4);
  for (const auto& c : small.programs) CHECK(c.num_qubits() <= 4);
  CHECK(small.size() < suite().size());
}

TEST_CASE("binomial matches pascal's triangle", "[bench][oracle]") {
  std::vector<std::vector<std::uint64_t>> pascal(31);
  for (std::size_t n = 0; n <= 30; ++n) {
    pascal[n].assign(n + 1, 1);
    for (std::size_t k = 1; k < n; ++k) pascal[n][k] = pascal[n - 1][k - 1] + pascal[n - 1][k];
  }
  for (std::size_t n = 0; n <= 30; ++n) {
    for (std::size_t k = 0; k <= n; ++k) CHECK(binomial(n, k) == pascal[n][k]);
    CHECK(binomial(n, n + 1) == 0);
  }
}

TEST_CASE("group generation", "[bench]") {
  const auto full = generate_groups(30, 30, 1, 3);
  REQUIRE(full.size() == 1);
  CHECK(full[0].members.size() == 30);
  CHECK_THROWS_AS(generate_groups(30, 30, 2, 3), ValidationError);
  CHECK_THROWS_AS(generate_groups(30, 31, 1, 3), ValidationError);
  CHECK_THROWS_AS(generate_groups(30, 2, 0, 3), ValidationError);

  const auto pairs = generate_groups(30, 2, 30, 7);
  REQUIRE(pairs.size() == 30);
  std::set<std::vector<std::size_t>> distinct;
  for (const auto& g : pairs) {
    CHECK(g.members.size() == 2);
    CHECK(std::is_sorted(g.members.begin(), g.members.end()));
    CHECK(g.members[0] != g.members[1]);
    CHECK(g.members[1] < 30);
    distinct.insert(g.members);
  }
  CHECK(distinct.size() == 30);

  const auto again = generate_groups(30, 2, 30, 7);
  for (std::size_t i = 0; i < 30; ++i) CHECK(again[i].members == pairs[i].members);
  for (std::size_t m = 2; m <= 10; ++m) {
    const auto gs = generate_groups(30, m, 30, 11);
    std::set<std::vector<std::size_t>> seen;
    for (const auto& g : gs) seen.insert(g.members);
    CHECK(seen.size() == 30);
  }
  // Every subset of a tiny suite.
  CHECK(generate_groups(5, 2, 10, 1).size() == 10);

  BenchmarkGroup g{0, {0, 4, 12}};
  CHECK(g.label() == "1_5_13");
}

TEST_CASE("spearman correlation", "[bench][oracle]") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + rng() % 12;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = u(rng);
      y[i] = x[i] * 0.5 + u(rng);
    }
    // Distinct values: closed form 1 - 6 sum d^2 / (n (n^2 - 1)).
    auto rank = [](const std::vector<double>& v) {
      std::vector<double> r(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) {
        r[i] = 1.0 + static_cast<double>(std::count_if(v.begin(), v.end(),
                                                       [&](double w) { return w < v[i]; }));
      }
      return r;
    };
    const auto rx = rank(x), ry = rank(y);
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
    const double nn = static_cast<double>(n);
    CHECK(*spearman(x, y) == Catch::Approx(1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0))).margin(1e-12));
  }
  CHECK(*spearman({1, 2, 3}, {10, 20, 30}) == Catch::Approx(1.0));
  CHECK(*spearman({1, 2, 3}, {3, 2, 1}) == Catch::Approx(-1.0));
  CHECK_FALSE(spearman({1, 1, 1}, {1, 2, 3}).has_value());
  CHECK_FALSE(spearman({1}, {1}).has_value());
  CHECK(average_ranks({5, 1, 5, 3}) == std::vector<double>{3.5, 1.0, 3.5, 2.0});
}

TEST_CASE("success ratio arithmetic", "[bench]") {
  CHECK(success_ratio(report_with(10, 0)) == 1.0);
  CHECK(success_ratio(report_with(8, 22)) == Catch::Approx(0.2667).margin(1e-4));
  CHECK(success_ratio(report_with(26, 4)) == Catch::Approx(26.0 / 30.0));
  CHECK_THROWS_AS(success_ratio(ExperimentReport{}), ValidationError);
}

TEST_CASE("fidelity experiment records every group", "[bench]") {
  const auto small = suite().filtered(6);
  ExperimentContext ctx(small, device27(), 4, 1);
  const auto groups = generate_groups(small.size(), 2, 6, 5);
  auto cfg = quick_config();
  for (auto mode : {Mode::aware, Mode::vanilla, Mode::oracle}) {
    cfg.mode = mode;
    const auto rep = run_fidelity_experiment(ctx, groups, device27(), cfg, "heavyhex27");
    REQUIRE(rep.records.size() == groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i) {
      const auto& r = rep.records[i];
      CHECK(r.group.id == groups[i].id);
      CHECK(r.group.members == groups[i].members);
      CHECK(r.programs.size() == 2);
      if (r.success) {
        CHECK(r.fidelities.size() == 2);
        for (double f : r.fidelities) {
          CHECK(f > 0.0);
          CHECK(f <= 1.0);
        }
      } else {
        CHECK_FALSE(r.error.empty());
      }
      if (mode == Mode::oracle) CHECK(r.ranks == std::vector<std::size_t>{1, 1});
    }
    // Deterministic given the configuration.
    const auto again = run_fidelity_experiment(ctx, groups, device27(), cfg, "heavyhex27");
    for (std::size_t i = 0; i < groups.size(); ++i) {
      CHECK(again.records[i].fidelities == rep.records[i].fidelities);
      CHECK(again.records[i].ranks == rep.records[i].ranks);
    }
    CHECK(rep.mode == mode_name(mode));
    CHECK(parse_mode(mode_name(mode)) == mode);
  }
  CHECK_THROWS_AS(parse_mode("sequential"), ValidationError);
}

TEST_CASE("parallel and serial experiments agree", "[bench]") {
  const auto small = suite().filtered(5);
  ExperimentContext ctx(small, device27(), 4, 1);
  const auto groups = generate_groups(small.size(), 3, 5, 2);
  auto cfg = quick_config();
  const auto serial = run_fidelity_experiment(ctx, groups, device27(), cfg);
  cfg.workers = 4;
  ExperimentContext ctx2(small, device27(), 4, 4);
  const auto parallel = run_fidelity_experiment(ctx2, groups, device27(), cfg);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    CHECK(serial.records[i].success == parallel.records[i].success);
    CHECK(serial.records[i].fidelities == parallel.records[i].fidelities);
  }
}

TEST_CASE("groups that cannot fit are recorded as failures", "[bench]") {
  // Eight-qubit path, unit size 4: two units for three programs.
  const auto g = test::path_device(8);
  const auto small = suite().filtered(4);
  ExperimentContext ctx(small, g, 4, 1);
  const auto groups = generate_groups(small.size(), 3, 4, 1);
  auto cfg = quick_config();
  cfg.simulate = false;
  cfg.strategy = Strategy::small_first;
  const auto rep = run_fidelity_experiment(ctx, groups, g, cfg);
  REQUIRE(rep.records.size() == 4);
  for (const auto& r : rep.records) {
    CHECK_FALSE(r.success);
    CHECK_FALSE(r.error.empty());
  }
  CHECK(success_ratio(rep) == 0.0);
}

TEST_CASE("greedy feasibility implies exhaustive feasibility", "[bench][property]") {
  ExperimentContext ctx(suite(), device27(), 2, 1);
  auto cfg = quick_config();
  cfg.simulate = false;
  for (std::size_t m = 2; m <= 10; m += 2) {
    const auto groups = generate_groups(suite().size(), m, 15, 40 + m);
    cfg.strategy = Strategy::small_first;
    const auto greedy = run_fidelity_experiment(ctx, groups, device27(), cfg);
    cfg.strategy = Strategy::brute_force;
    cfg.brute_force_timeout = std::chrono::hours(1);
    const auto exhaustive = run_fidelity_experiment(ctx, groups, device27(), cfg);
    for (std::size_t i = 0; i < groups.size(); ++i) {
      if (greedy.records[i].success) {
        CHECK(exhaustive.records[i].success);
        CHECK(exhaustive.records[i].index_sum <= greedy.records[i].index_sum);
      }
    }
  }
}

TEST_CASE("unit size sweep covers every size", "[bench][sweep]") {
  SweepConfig sc;
  sc.kind = SweepKind::unit_size;
  sc.base = quick_config();
  sc.base.simulate = false;
  sc.groups = 3;
  const auto r = run_sweep(suite(), device27(), sc);
  REQUIRE(r.points.size() == 11);
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    CHECK(r.points[i].value == static_cast<double>(i + 2));
    CHECK(r.points[i].report.unit_size == static_cast<int>(i + 2));
    CHECK(r.points[i].report.records.size() == 3);
  }
}

TEST_CASE("zero variation reproduces matched calibration", "[bench][sweep]") {
  SweepConfig sc;
  sc.kind = SweepKind::variation;
  sc.base = quick_config();
  sc.max_program_qubits = 6;
  sc.groups = 3;
  sc.values = {0.0, 0.1};
  const auto r = run_sweep(suite(), device27(), sc);
  REQUIRE(r.points.size() == 2);

  const auto small = suite().filtered(6);
  ExperimentContext ctx(small, device27(), 4, 1);
  const auto groups = generate_groups(small.size(), 2, 3, sc.base.seed);
  const auto matched = run_fidelity_experiment(ctx, groups, device27(), sc.base);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    CHECK(r.points[0].report.records[i].fidelities == matched.records[i].fidelities);
  }
  CHECK_THROWS_AS(run_sweep(suite(), device27(), [&] {
                    auto bad = sc;
                    bad.values = {-0.1};
                    return bad;
                  }()),
                  ValidationError);
}

TEST_CASE("crosstalk sweep selections pass the audit", "[bench][sweep][crosstalk]") {
  SweepConfig sc;
  sc.kind = SweepKind::crosstalk;
  sc.base = quick_config();
  sc.max_program_qubits = 6;
  sc.groups = 6;
  sc.base.crosstalk = random_crosstalk_map(device27(), 0.3, 4);
  const auto r = run_sweep(suite(), device27(), sc);
  REQUIRE(r.points.size() == 2);
  CHECK(r.points[0].value == 0.0);
  CHECK(r.points[1].value == 1.0);

  // Rebuild the processes to map ranks back to regions.
  const auto small = suite().filtered(6);
  ExperimentContext ctx(small, device27(), 4, 1);
  const auto& xt = *sc.base.crosstalk;
  for (const auto& rec : r.points[1].report.records) {
    if (!rec.success) continue;
    std::vector<Process> procs;
    Selection sel;
    for (std::size_t j = 0; j < rec.group.members.size(); ++j) {
      procs.push_back(ctx.process(rec.group.members[j]));
      sel.chosen.push_back({j, rec.ranks[j] - 1});
    }
    CHECK(selection_is_conflict_free(sel, procs, &xt));
  }
}

TEST_CASE("concurrency sweep emits every strategy", "[bench][sweep]") {
  SweepConfig sc;
  sc.kind = SweepKind::concurrency;
  sc.base = quick_config();
  sc.base.simulate = false;
  sc.groups = 4;
  sc.values = {2, 4};
  const auto r = run_sweep(suite(), device27(), sc);
  CHECK(r.points.size() == 2 * sc.strategies.size());
  std::set<std::string> strategies;
  for (const auto& p : r.points) strategies.insert(p.report.strategy);
  CHECK(strategies.size() == 4);
}

TEST_CASE("csv and summary output", "[bench]") {
  SweepConfig sc;
  sc.kind = SweepKind::crosstalk;
  sc.base = quick_config();
  sc.max_program_qubits = 4;
  sc.groups = 2;
  sc.device_tag = "dev,27";
  const auto r = run_sweep(suite(), device27(), sc);
  std::ostringstream os;
  write_csv(os, r);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == kCsvHeader);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.rfind("crosstalk,", 0) == 0);
    CHECK(line.find("\"dev,27\"") != std::string::npos);
  }
  CHECK(rows == 4);

  RankingResult ranking;
  ranking.programs = {"a", "b"};
  ranking.correlations = {0.5, 1.0};
  const auto j = summary_json(r, ranking);
  CHECK(j["sweep"] == "crosstalk");
  CHECK(j["points"].size() == 2);
  CHECK(j["points"][0].contains("success_ratio"));
  CHECK(j["ranking_spearman"]["mean"].get<double>() == Catch::Approx(0.75));
  CHECK(parse_sweep(sweep_name(SweepKind::variation)) == SweepKind::variation);
  CHECK_THROWS_AS(parse_sweep("noise"), ValidationError);
}

TEST_CASE("ranking correlation covers multi-version programs", "[bench]") {
  const auto small = suite().filtered(4);
  ExperimentContext ctx(small, device27(), 4, 1);
  const auto r = ranking_correlation(ctx, device27(), quick_config());
  CHECK(r.programs.size() == r.correlations.size());
  CHECK_FALSE(r.programs.empty());
  for (double c : r.correlations) {
    CHECK(c >= -1.0 - 1e-12);
    CHECK(c <= 1.0 + 1e-12);
  }
}
