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

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mpqc/device.hpp"
#include "mpqc/error.hpp"

namespace mpqc {

/// Device links with high crosstalk and the factor by which they amplify the
/// two-qubit error of a neighbouring CNOT while another program runs across
/// them.
class CrosstalkMap {
 public:
  CrosstalkMap() = default;

  void flag(Link link, double amplification) {
    if (!(amplification >= 1.0)) {
      throw ValidationError("crosstalk amplification must be >= 1");
    }
    factors_[link] = amplification;
  }

  bool empty() const { return factors_.empty(); }
  std::size_t size() const { return factors_.size(); }
  bool flagged(int a, int b) const { return factors_.count(Link(a, b)) != 0; }
  double amplification(int a, int b) const {
    const auto it = factors_.find(Link(a, b));
    return it == factors_.end() ? 1.0 : it->second;
  }
  const std::map<Link, double>& entries() const { return factors_; }

  /// Largest amplification over flagged links with one end in `qubits` and
  /// the other in `others` (membership vectors indexed by device qubit).
  double max_amplification(std::span<const int> qubits,
                           const std::vector<char>& others) const {
    double f = 1.0;
    for (const auto& [link, factor] : factors_) {
      for (int q : qubits) {
        if (!link.touches(q)) continue;
        const auto o = static_cast<std::size_t>(link.other(q));
        if (o < others.size() && others[o]) f = std::max(f, factor);
      }
    }
    return f;
  }

 private:
  std::map<Link, double> factors_;
};

/// Flags each device link independently with probability `fraction`; flagged
/// links get an amplification drawn uniformly from [lo, hi].
inline CrosstalkMap random_crosstalk_map(const DeviceGraph& g, double fraction,
                                         std::uint64_t seed, double lo = 2.0,
                                         double hi = 5.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_real_distribution<double> factor(lo, hi);
  CrosstalkMap map;
  for (const auto& l : g.links()) {
    const bool hit = coin(rng) < fraction;
    const double f = factor(rng);
    if (hit) map.flag(l, f);
  }
  return map;
}

/// {"links": [[a, b, amplification], ...]}
inline nlohmann::json crosstalk_to_json(const CrosstalkMap& map) {
  nlohmann::json links = nlohmann::json::array();
  for (const auto& [l, f] : map.entries()) links.push_back({l.a, l.b, f});
  return {{"links", links}};
}

inline CrosstalkMap crosstalk_from_json(const nlohmann::json& doc) {
  if (!doc.contains("links")) throw ValidationError("missing field: links");
  CrosstalkMap map;
  try {
    for (const auto& e : doc.at("links")) {
      if (!e.is_array() || e.size() != 3) {
        throw ValidationError("crosstalk entries must be [a, b, amplification]");
      }
      map.flag(Link(e[0].get<int>(), e[1].get<int>()), e[2].get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed crosstalk map: ") + e.what());
  }
  return map;
}

inline CrosstalkMap load_crosstalk(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open crosstalk map " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return crosstalk_from_json(doc);
}

}  // namespace mpqc
