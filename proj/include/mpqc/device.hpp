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
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mpqc/error.hpp"

namespace mpqc {

/// Undirected coupling between two physical qubits, stored with a < b.
struct Link {
  int a{0};
  int b{0};

  Link() = default;
  Link(int x, int y) : a(std::min(x, y)), b(std::max(x, y)) {}

  bool touches(int q) const { return a == q || b == q; }
  int other(int q) const { return q == a ? b : a; }

  friend auto operator<=>(const Link&, const Link&) = default;
};

/// Calibrated device graph: physical qubits, undirected links weighted by
/// two-qubit error, plus per-qubit gate and readout errors. Immutable once
/// constructed; the constructor enforces connectivity and probability ranges.
class DeviceGraph {
 public:
  struct Neighbor {
    int qubit;
    std::size_t link;
  };

  DeviceGraph() = default;

  DeviceGraph(int num_qubits, std::vector<Link> links,
              std::vector<double> link_errors,
              std::vector<double> qubit_errors,
              std::vector<double> readout_errors)
      : num_qubits_(num_qubits),
        links_(std::move(links)),
        link_errors_(std::move(link_errors)),
        qubit_errors_(std::move(qubit_errors)),
        readout_errors_(std::move(readout_errors)) {
    validate();
    index();
  }

  int num_qubits() const { return num_qubits_; }
  std::size_t num_links() const { return links_.size(); }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<double>& link_errors() const { return link_errors_; }
  double link_error(std::size_t link) const { return link_errors_[link]; }
  double qubit_error(int q) const { return qubit_errors_[idx(q)]; }
  double readout_error(int q) const { return readout_errors_[idx(q)]; }
  const std::vector<double>& qubit_errors() const { return qubit_errors_; }
  const std::vector<double>& readout_errors() const { return readout_errors_; }

  std::span<const Neighbor> neighbors(int q) const { return adjacency_[idx(q)]; }
  int degree(int q) const { return static_cast<int>(adjacency_[idx(q)].size()); }

  /// Index of the link joining a and b, if any.
  std::optional<std::size_t> find_link(int a, int b) const {
    if (a < 0 || b < 0 || a >= num_qubits_ || b >= num_qubits_) {
      return std::nullopt;
    }
    for (const auto& nb : adjacency_[idx(a)]) {
      if (nb.qubit == b) return nb.link;
    }
    return std::nullopt;
  }

  bool linked(int a, int b) const { return find_link(a, b).has_value(); }

  /// Same topology, replaced two-qubit error rates.
  DeviceGraph with_link_errors(std::vector<double> errors) const {
    return DeviceGraph(num_qubits_, links_, std::move(errors), qubit_errors_,
                       readout_errors_);
  }

  DeviceGraph with_qubit_errors(std::vector<double> qubit_errors,
                                std::vector<double> readout_errors) const {
    return DeviceGraph(num_qubits_, links_, link_errors_,
                       std::move(qubit_errors), std::move(readout_errors));
  }

 private:
  static std::size_t idx(int q) { return static_cast<std::size_t>(q); }

  void validate() const {
    if (num_qubits_ < 1) throw ValidationError("device needs at least 1 qubit");
    if (link_errors_.size() != links_.size()) {
      throw ValidationError("link error count does not match link count");
    }
    if (qubit_errors_.size() != idx(num_qubits_) ||
        readout_errors_.size() != idx(num_qubits_)) {
      throw ValidationError("per-qubit error arrays must have num_qubits entries");
    }
    std::vector<Link> sorted = links_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ValidationError("duplicate link");
    }
    for (std::size_t i = 0; i < links_.size(); ++i) {
      const auto& l = links_[i];
      if (l.a == l.b) throw ValidationError("self-loop link");
      if (l.a < 0 || l.b >= num_qubits_) {
        throw ValidationError("link endpoint out of range");
      }
      const double e = link_errors_[i];
      if (!(e > 0.0 && e < 1.0)) {
        throw ValidationError(
            "probability out of range: link error " + std::to_string(e));
      }
    }
    for (double e : qubit_errors_) {
      if (!(e >= 0.0 && e < 1.0)) {
        throw ValidationError(
            "probability out of range: qubit error " + std::to_string(e));
      }
    }
    for (double e : readout_errors_) {
      if (!(e >= 0.0 && e < 1.0)) {
        throw ValidationError(
            "probability out of range: readout error " + std::to_string(e));
      }
    }
    // Connectivity.
    std::vector<std::vector<int>> adj(idx(num_qubits_));
    for (const auto& l : links_) {
      adj[idx(l.a)].push_back(l.b);
      adj[idx(l.b)].push_back(l.a);
    }
    std::vector<bool> seen(idx(num_qubits_), false);
    std::queue<int> bfs;
    bfs.push(0);
    seen[0] = true;
    int reached = 1;
    while (!bfs.empty()) {
      const int q = bfs.front();
      bfs.pop();
      for (int n : adj[idx(q)]) {
        if (!seen[idx(n)]) {
          seen[idx(n)] = true;
          ++reached;
          bfs.push(n);
        }
      }
    }
    if (reached != num_qubits_) throw ValidationError("disconnected topology");
  }

  void index() {
    adjacency_.assign(idx(num_qubits_), {});
    for (std::size_t i = 0; i < links_.size(); ++i) {
      adjacency_[idx(links_[i].a)].push_back({links_[i].b, i});
      adjacency_[idx(links_[i].b)].push_back({links_[i].a, i});
    }
    for (auto& nbs : adjacency_) {
      std::sort(nbs.begin(), nbs.end(),
                [](const Neighbor& x, const Neighbor& y) { return x.qubit < y.qubit; });
    }
  }

  int num_qubits_{0};
  std::vector<Link> links_;
  std::vector<double> link_errors_;
  std::vector<double> qubit_errors_;
  std::vector<double> readout_errors_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

/// Builds a device from a calibration document:
///   {"num_qubits": n, "links": [[a, b, err], ...],
///    "qubit_errors": [...], "readout_errors": [...]}
inline DeviceGraph parse_calibration(const nlohmann::json& doc) {
  for (const char* field : {"num_qubits", "links", "qubit_errors", "readout_errors"}) {
    if (!doc.contains(field)) {
      throw ValidationError(std::string("missing field: ") + field);
    }
  }
  try {
    const int n = doc.at("num_qubits").get<int>();
    std::vector<Link> links;
    std::vector<double> errors;
    for (const auto& entry : doc.at("links")) {
      if (!entry.is_array() || entry.size() != 3) {
        throw ValidationError("link entries must be [a, b, two_qubit_error]");
      }
      links.emplace_back(entry[0].get<int>(), entry[1].get<int>());
      errors.push_back(entry[2].get<double>());
    }
    return DeviceGraph(n, std::move(links), std::move(errors),
                       doc.at("qubit_errors").get<std::vector<double>>(),
                       doc.at("readout_errors").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed calibration: ") + e.what());
  }
}

inline DeviceGraph load_calibration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open calibration file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return parse_calibration(doc);
}

inline nlohmann::json calibration_to_json(const DeviceGraph& g) {
  nlohmann::json links = nlohmann::json::array();
  for (std::size_t i = 0; i < g.num_links(); ++i) {
    links.push_back({g.links()[i].a, g.links()[i].b, g.link_error(i)});
  }
  return {{"num_qubits", g.num_qubits()},
          {"links", links},
          {"qubit_errors", g.qubit_errors()},
          {"readout_errors", g.readout_errors()}};
}

/// Quality score of a qubit: number of incident links divided by the sum of
/// their two-qubit errors. Zero for an isolated qubit.
inline double qubit_utility(const DeviceGraph& g, int q) {
  if (q < 0 || q >= g.num_qubits()) {
    throw ValidationError("qubit " + std::to_string(q) + " out of range");
  }
  double sum = 0.0;
  for (const auto& nb : g.neighbors(q)) sum += g.link_error(nb.link);
  return g.degree(q) == 0 ? 0.0 : g.degree(q) / sum;
}

inline std::vector<double> qubit_utilities(const DeviceGraph& g) {
  std::vector<double> out(static_cast<std::size_t>(g.num_qubits()));
  for (int q = 0; q < g.num_qubits(); ++q) {
    out[static_cast<std::size_t>(q)] = qubit_utility(g, q);
  }
  return out;
}

/// Log-normal scale-factor distribution for day-to-day calibration drift.
struct VariationModel {
  double mu{0.0};
  double sigma{0.1};
  std::uint64_t seed{0};

  VariationModel() = default;
  VariationModel(double m, double s, std::uint64_t sd = 0)
      : mu(m), sigma(s), seed(sd) {
    if (!(s > 0.0)) throw ValidationError("log-normal sigma must be > 0");
  }
};

inline constexpr double kMaxScaledError = 0.999;

/// Multiplies every link error by an independent log-normal(mu, sigma) draw,
/// clamped to (0, 0.999]. Link order fixes the draw order, so the result is
/// a pure function of (g, v).
inline DeviceGraph apply_variation(const DeviceGraph& g, const VariationModel& v) {
  std::mt19937_64 rng(v.seed);
  std::lognormal_distribution<double> scale(v.mu, v.sigma);
  std::vector<double> errors = g.link_errors();
  for (auto& e : errors) {
    e = std::min(e * scale(rng), kMaxScaledError);
    e = std::max(e, std::numeric_limits<double>::min());
  }
  return g.with_link_errors(std::move(errors));
}

inline constexpr double kSigmaFloor = std::numeric_limits<double>::epsilon();

/// Maximum-likelihood log-normal fit: mu is the mean of the log-samples and
/// sigma their population standard deviation. Constant data has no spread;
/// sigma is floored at machine epsilon and a warning is written to stderr.
inline VariationModel fit_lognormal(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw ValidationError("log-normal fit needs at least 2 samples");
  }
  double sum = 0.0;
  for (double x : samples) {
    if (!(x > 0.0)) {
      throw ValidationError("log-normal fit needs positive samples");
    }
    sum += std::log(x);
  }
  const double n = static_cast<double>(samples.size());
  const double mu = sum / n;
  double sq = 0.0;
  for (double x : samples) {
    const double d = std::log(x) - mu;
    sq += d * d;
  }
  double sigma = std::sqrt(sq / n);
  // Rounding in mu can leave a few ulps of spread on identical samples.
  const bool constant = std::all_of(samples.begin(), samples.end(),
                                    [&](double x) { return x == samples.front(); });
  if (constant || !(sigma > kSigmaFloor)) {
    std::cerr << "warning: log-normal fit on constant samples; sigma floored"
              << std::endl;
    sigma = kSigmaFloor;
  }
  return VariationModel(mu, sigma);
}

}  // namespace mpqc
