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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include <catch_amalgamated.hpp>

#include "mpqc/device.hpp"
#include "test_util.hpp"

using namespace mpqc;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

nlohmann::json ring4_doc() {
  return {{"num_qubits", 4},
          {"links", {{0, 1, 0.01}, {1, 2, 0.02}, {2, 3, 0.01}, {3, 0, 0.03}}},
          {"qubit_errors", {1e-4, 1e-4, 1e-4, 1e-4}},
          {"readout_errors", {0.01, 0.02, 0.01, 0.02}}};
}

std::string write_temp(const nlohmann::json& doc, const std::string& name) {
  const auto path = std::filesystem::temp_directory_path() / ("mpqc_test_" + name + ".json");
  std::ofstream(path) << doc.dump();
  return path.string();
}

// Pearson correlation of ranks, used as an independent Spearman oracle.
double rank_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto x, auto y) { return v[x] < v[y]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = (i + j) / 2.0;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / ra.size();
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / rb.size();
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("four-qubit ring calibration file", "[device]") {
  const auto g = load_calibration(write_temp(ring4_doc(), "ring4"));
  CHECK(g.num_qubits() == 4);
  CHECK(g.num_links() == 4);
  CHECK(g.linked(3, 0));
  CHECK(g.linked(0, 3));
  CHECK_FALSE(g.linked(0, 2));
  CHECK(g.link_error(*g.find_link(1, 2)) == 0.02);
  CHECK(g.readout_error(1) == 0.02);
}

TEST_CASE("bundled devices", "[device]") {
  const auto g27 = load_calibration(test::device_path("heavyhex27"));
  CHECK(g27.num_qubits() == 27);
  CHECK(g27.num_links() == 28);
  const auto g65 = load_calibration(test::device_path("heavyhex65"));
  CHECK(g65.num_qubits() == 65);
  CHECK(g65.num_links() == 72);
  for (const auto* g : {&g27, &g65}) {
    for (int q = 0; q < g->num_qubits(); ++q) CHECK(g->degree(q) <= 3);
  }
}

TEST_CASE("calibration json round trip", "[device]") {
  const auto g = parse_calibration(ring4_doc());
  const auto again = parse_calibration(calibration_to_json(g));
  CHECK(again.links() == g.links());
  CHECK(again.link_errors() == g.link_errors());
  CHECK(again.readout_errors() == g.readout_errors());
}

TEST_CASE("calibration validation errors", "[device][errors]") {
  auto doc = ring4_doc();
  doc["links"][1][2] = 1.2;
  CHECK_THROWS_WITH(parse_calibration(doc), ContainsSubstring("probability out of range"));

  doc = ring4_doc();
  doc["links"][0][2] = 0.0;
  CHECK_THROWS_WITH(parse_calibration(doc), ContainsSubstring("probability out of range"));

  doc = ring4_doc();
  doc["readout_errors"][0] = 1.0;
  CHECK_THROWS_WITH(parse_calibration(doc), ContainsSubstring("probability out of range"));

  doc = ring4_doc();
  doc.erase("qubit_errors");
  CHECK_THROWS_WITH(parse_calibration(doc), ContainsSubstring("missing field: qubit_errors"));

  doc = ring4_doc();
  doc["links"] = {{0, 1, 0.01}, {2, 3, 0.01}};
  CHECK_THROWS_WITH(parse_calibration(doc), ContainsSubstring("disconnected topology"));

  doc = ring4_doc();
  doc["links"].push_back({1, 0, 0.02});
  CHECK_THROWS_WITH(parse_calibration(doc), ContainsSubstring("duplicate link"));

  doc = ring4_doc();
  doc["links"].push_back({2, 2, 0.02});
  CHECK_THROWS_AS(parse_calibration(doc), ValidationError);

  doc = ring4_doc();
  doc["links"].push_back({1, 9, 0.02});
  CHECK_THROWS_AS(parse_calibration(doc), ValidationError);

  doc = ring4_doc();
  doc["qubit_errors"] = {0.1};
  CHECK_THROWS_AS(parse_calibration(doc), ValidationError);

  CHECK_THROWS_AS(load_calibration("/nonexistent/device.json"), Error);
}

TEST_CASE("utility formula", "[device]") {
  // Qubit 0 has one link of error 0.01; qubit 1 has three of 0.01.
  const auto g = test::uniform_device(4, {{0, 1}, {1, 2}, {1, 3}}, 0.01);
  CHECK_THAT(qubit_utility(g, 0), WithinRel(100.0, 1e-12));
  CHECK_THAT(qubit_utility(g, 1), WithinRel(100.0, 1e-12));
  // Leaves with identical incident link sets.
  CHECK(qubit_utility(g, 2) == qubit_utility(g, 3));
  CHECK_THROWS_AS(qubit_utility(g, 4), ValidationError);

  const DeviceGraph h(3, {{0, 1}, {1, 2}}, {0.01, 0.03}, {0, 0, 0}, {0, 0, 0});
  CHECK_THAT(qubit_utility(h, 1), WithinRel(2.0 / 0.04, 1e-12));
}

TEST_CASE("utility is scale covariant", "[device][property]") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = test::random_connected_device(5 + static_cast<int>(rng() % 20), rng);
    const double c = 0.1 + (rng() % 100) / 50.0;
    auto errors = g.link_errors();
    for (auto& e : errors) e *= c;
    if (*std::max_element(errors.begin(), errors.end()) >= 1.0) continue;
    const auto h = g.with_link_errors(errors);
    for (int q = 0; q < g.num_qubits(); ++q) {
      CHECK_THAT(qubit_utility(h, q), WithinRel(qubit_utility(g, q) / c, 1e-12));
    }
  }
}

TEST_CASE("variation with vanishing sigma is the identity", "[device]") {
  const auto g = load_calibration(test::device_path("heavyhex27"));
  const auto h = apply_variation(g, VariationModel(0.0, 1e-15, 5));
  REQUIRE(h.num_links() == g.num_links());
  for (std::size_t i = 0; i < g.num_links(); ++i) {
    CHECK_THAT(h.link_error(i), WithinRel(g.link_error(i), 1e-12));
  }
}

TEST_CASE("variation is deterministic per seed and keeps topology", "[device]") {
  const auto g = load_calibration(test::device_path("heavyhex65"));
  const auto a = apply_variation(g, VariationModel(0.0, 0.3, 42));
  const auto b = apply_variation(g, VariationModel(0.0, 0.3, 42));
  const auto c = apply_variation(g, VariationModel(0.0, 0.3, 43));
  CHECK(a.link_errors() == b.link_errors());
  CHECK(a.link_errors() != c.link_errors());
  CHECK(a.links() == g.links());
  CHECK(a.qubit_errors() == g.qubit_errors());
}

TEST_CASE("variation clamps into the open unit interval", "[device][property]") {
  const auto g = test::path_device(200, 0.5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto h = apply_variation(g, VariationModel(0.0, 3.0, seed));
    for (double e : h.link_errors()) {
      CHECK(e > 0.0);
      CHECK(e <= kMaxScaledError);
    }
  }
}

TEST_CASE("median variation factor is one", "[device][oracle]") {
  constexpr int n = 100001;
  const auto g = test::path_device(n, 0.01);
  const auto h = apply_variation(g, VariationModel(0.0, 0.25, 9));
  std::vector<double> factors;
  for (std::size_t i = 0; i < h.num_links(); ++i) factors.push_back(h.link_error(i) / 0.01);
  std::nth_element(factors.begin(), factors.begin() + factors.size() / 2, factors.end());
  CHECK_THAT(factors[factors.size() / 2], WithinAbs(1.0, 0.02));
}

TEST_CASE("log-normal fit", "[device]") {
  const std::vector<double> two{1.0, std::exp(2.0)};
  const auto v = fit_lognormal(two);
  CHECK_THAT(v.mu, WithinAbs(1.0, 1e-12));
  CHECK_THAT(v.sigma, WithinAbs(1.0, 1e-12));

  const std::vector<double> constant(5, 0.02);
  const auto flat = fit_lognormal(constant);
  CHECK_THAT(flat.mu, WithinAbs(std::log(0.02), 1e-12));
  CHECK(flat.sigma == kSigmaFloor);

  CHECK_THROWS_AS(fit_lognormal(std::vector<double>{1.0}), ValidationError);
  CHECK_THROWS_AS(fit_lognormal(std::vector<double>{1.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(fit_lognormal(std::vector<double>{1.0, -2.0}), ValidationError);
  CHECK_THROWS_AS(VariationModel(0.0, 0.0), ValidationError);
}

TEST_CASE("log-normal fit recovers generating parameters", "[device][oracle]") {
  std::mt19937_64 rng(17);
  std::lognormal_distribution<double> d(0.1, 0.3);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = d(rng);
  const auto v = fit_lognormal(xs);
  CHECK_THAT(v.mu, WithinAbs(0.1, 0.01));
  CHECK_THAT(v.sigma, WithinAbs(0.3, 0.01));
}

TEST_CASE("utility ranking survives small variation", "[device][property]") {
  const auto g = load_calibration(test::device_path("heavyhex27"));
  const auto base = qubit_utilities(g);
  double total = 0.0;
  constexpr int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    const auto h = apply_variation(g, VariationModel(0.0, 0.1, static_cast<std::uint64_t>(s)));
    total += rank_correlation(base, qubit_utilities(h));
  }
  CHECK(total / seeds >= 0.9);
}
