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
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "mpqc/circuit.hpp"
#include "mpqc/device.hpp"
#include "mpqc/error.hpp"
#include "mpqc/parallel.hpp"
#include "mpqc/partition.hpp"

namespace mpqc {

/// Logical qubit -> physical qubit.
using Layout = std::vector<int>;

/// Executable cost: post/pre compilation depth ratio, then region utility.
struct Cost {
  double depth_ratio{1.0};
  double region_utility{0.0};

  friend bool operator==(const Cost&, const Cost&) = default;
};

/// Strict weak order on costs: smaller depth ratio first; among equal ratios
/// the region with larger utility ranks first.
inline bool cost_less(const Cost& a, const Cost& b) {
  if (a.depth_ratio != b.depth_ratio) return a.depth_ratio < b.depth_ratio;
  return a.region_utility > b.region_utility;
}

/// A program routed onto one region. routed_gates use physical qubit indices
/// and contain only CNOTs between linked qubits (inserted swaps are already
/// expanded to three CNOTs).
struct Executable {
  std::string program_name;
  int num_qubits{0};
  int num_clbits{0};
  Region region;
  Layout layout;        // before the first gate
  Layout final_layout;  // after the last gate
  std::vector<Gate> routed_gates;
  int swaps{0};
  int d_in{0};
  int d_out{0};
  Cost cost;
};

/// A program's executables ordered best-first by cost_less.
struct Process {
  std::string program_name;
  int num_qubits{0};
  std::vector<Executable> executables;

  std::size_t size() const { return executables.size(); }
};

struct RouterOptions {
  int lookahead{20};        // extended-set size in two-qubit gates
  double lookahead_weight{0.5};
  double decay_step{0.001};
  int decay_reset{5};       // swaps between decay resets
  int layout_passes{3};     // forward/reverse refinement rounds
};

struct RoutingResult {
  std::vector<Gate> gates;  // physical operands
  Layout final_layout;
  int swaps{0};
};

namespace detail {

/// SABRE-style router confined to the qubits of one region. Works on local
/// indices 0..R-1 and translates to device indices on emission.
class RegionRouter {
 public:
  RegionRouter(const Region& rg, const DeviceGraph& g, RouterOptions opts)
      : phys_(rg.qubits), opts_(opts) {
    const auto r = phys_.size();
    local_.assign(static_cast<std::size_t>(g.num_qubits()), -1);
    for (std::size_t i = 0; i < r; ++i) local_[static_cast<std::size_t>(phys_[i])] = static_cast<int>(i);
    adj_.assign(r, {});
    adjacent_.assign(r, std::vector<char>(r, 0));

    // Link weight -ln(1 - e), normalized to mean 1 over region links and
    // blended with a unit hop so distance still tracks swap count.
    std::vector<std::pair<std::pair<int, int>, double>> edges;
    double mean = 0.0;
    for (std::size_t i = 0; i < g.num_links(); ++i) {
      const auto& l = g.links()[i];
      const int a = local_[static_cast<std::size_t>(l.a)];
      const int b = local_[static_cast<std::size_t>(l.b)];
      if (a < 0 || b < 0) continue;
      const double w = -std::log1p(-g.link_error(i));
      edges.push_back({{a, b}, w});
      mean += w;
    }
    if (!edges.empty()) mean /= static_cast<double>(edges.size());
    constexpr double inf = std::numeric_limits<double>::infinity();
    dist_.assign(r, std::vector<double>(r, inf));
    for (std::size_t i = 0; i < r; ++i) dist_[i][i] = 0.0;
    for (const auto& [ab, w] : edges) {
      const auto a = static_cast<std::size_t>(ab.first);
      const auto b = static_cast<std::size_t>(ab.second);
      adj_[a].push_back(ab.second);
      adj_[b].push_back(ab.first);
      adjacent_[a][b] = adjacent_[b][a] = 1;
      const double d = 0.5 + 0.5 * (mean > 0.0 ? w / mean : 1.0);
      dist_[a][b] = dist_[b][a] = std::min(dist_[a][b], d);
    }
    for (auto& nbs : adj_) std::sort(nbs.begin(), nbs.end());
    for (std::size_t k = 0; k < r; ++k) {
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) {
          dist_[i][j] = std::min(dist_[i][j], dist_[i][k] + dist_[k][j]);
        }
      }
    }
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < r; ++j) {
        if (!std::isfinite(dist_[i][j])) {
          throw ValidationError("region is not connected");
        }
      }
    }
  }

  std::size_t size() const { return phys_.size(); }
  int to_local(int physical) const { return local_[static_cast<std::size_t>(physical)]; }
  int to_physical(int local) const { return phys_[static_cast<std::size_t>(local)]; }
  double distance(int a, int b) const {
    return dist_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
  }
  bool adjacent(int a, int b) const {
    return adjacent_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] != 0;
  }

  /// Routes `gates` (logical operands over `num_logical` qubits) from the local
  /// layout `l2p`. Emits physical gates when `emit` is set.
  /// Measurements are held back and emitted after everything else, read from
  /// the final positions. A measured qubit takes no further gates, so this
  /// preserves semantics and keeps later SWAPs from disturbing its state.
  RoutingResult run(const std::vector<Gate>& all_gates, int num_logical,
                    std::vector<int> l2p, bool emit) const {
    std::vector<Gate> gates;
    std::vector<Gate> measures;
    for (const auto& g : all_gates) {
      (g.op == OpCode::measure ? measures : gates).push_back(g);
    }
    const auto r = phys_.size();
    const auto ng = gates.size();
    std::vector<int> p2l(r, -1);
    for (int q = 0; q < num_logical; ++q) p2l[static_cast<std::size_t>(l2p[static_cast<std::size_t>(q)])] = q;

    // Dependency DAG: each gate waits on the previous gate of every operand.
    std::vector<std::vector<std::size_t>> succ(ng);
    std::vector<int> pending(ng, 0);
    {
      std::vector<long> last(static_cast<std::size_t>(num_logical), -1);
      for (std::size_t i = 0; i < ng; ++i) {
        for (int q : gates[i].qubits) {
          auto& prev = last[static_cast<std::size_t>(q)];
          if (prev >= 0) {
            auto& s = succ[static_cast<std::size_t>(prev)];
            if (s.empty() || s.back() != i) {
              s.push_back(i);
              ++pending[i];
            }
          }
          prev = static_cast<long>(i);
        }
      }
    }
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < ng; ++i) {
      if (pending[i] == 0) front.push_back(i);
    }

    RoutingResult out;
    std::vector<double> decay(r, 1.0);
    int swaps_since_reset = 0;
    int swaps_since_progress = 0;
    const int valve = 3 * static_cast<int>(r) + 10;

    auto loc = [&](int logical) { return l2p[static_cast<std::size_t>(logical)]; };
    auto executable = [&](const Gate& gate) {
      return !gate.is_two_qubit() || adjacent(loc(gate.qubits[0]), loc(gate.qubits[1]));
    };
    auto emit_gate = [&](const Gate& gate) {
      if (!emit) return;
      Gate pg = gate;
      for (auto& q : pg.qubits) q = to_physical(loc(q));
      out.gates.push_back(std::move(pg));
    };
    auto apply_swap = [&](int a, int b) {
      if (emit) append_swap_as_cnots(out.gates, to_physical(a), to_physical(b));
      const int qa = p2l[static_cast<std::size_t>(a)];
      const int qb = p2l[static_cast<std::size_t>(b)];
      p2l[static_cast<std::size_t>(a)] = qb;
      p2l[static_cast<std::size_t>(b)] = qa;
      if (qa >= 0) l2p[static_cast<std::size_t>(qa)] = b;
      if (qb >= 0) l2p[static_cast<std::size_t>(qb)] = a;
      ++out.swaps;
    };

    while (!front.empty()) {
      // Drain the front, always emitting the lowest-index executable gate,
      // so unblocked stretches keep their source order.
      bool any = false;
      for (;;) {
        const auto it = std::find_if(front.begin(), front.end(),
                                     [&](std::size_t i) { return executable(gates[i]); });
        if (it == front.end()) break;
        const std::size_t i = *it;
        front.erase(it);
        emit_gate(gates[i]);
        any = true;
        for (std::size_t s : succ[i]) {
          if (--pending[s] == 0) front.insert(std::upper_bound(front.begin(), front.end(), s), s);
        }
      }
      if (front.empty()) break;
      if (any) {
        swaps_since_progress = 0;
        std::fill(decay.begin(), decay.end(), 1.0);
      }

      if (swaps_since_progress >= valve) {
        // Move the first blocked gate's operands together along a shortest path.
        const Gate& gate = gates[front.front()];
        int a = loc(gate.qubits[0]);
        const int b = loc(gate.qubits[1]);
        while (!adjacent(a, b)) {
          int step = -1;
          for (int n : adj_[static_cast<std::size_t>(a)]) {
            if (step < 0 || distance(n, b) < distance(step, b)) step = n;
          }
          apply_swap(a, step);
          a = step;
        }
        swaps_since_progress = 0;
        continue;
      }

      const auto extended = extended_set(gates, succ, pending, front);
      std::pair<int, int> best{-1, -1};
      double best_score = std::numeric_limits<double>::infinity();
      for (int p : front_qubits(gates, front, l2p)) {
        for (int n : adj_[static_cast<std::size_t>(p)]) {
          const int a = std::min(p, n);
          const int b = std::max(p, n);
          const double score = swap_score(gates, front, extended, l2p, a, b, decay);
          if (score < best_score - 1e-12 ||
              (std::abs(score - best_score) <= 1e-12 && std::pair(a, b) < best)) {
            best_score = score;
            best = {a, b};
          }
        }
      }
      apply_swap(best.first, best.second);
      ++swaps_since_progress;
      decay[static_cast<std::size_t>(best.first)] += opts_.decay_step;
      decay[static_cast<std::size_t>(best.second)] += opts_.decay_step;
      if (++swaps_since_reset >= opts_.decay_reset) {
        swaps_since_reset = 0;
        std::fill(decay.begin(), decay.end(), 1.0);
      }
    }
    for (const auto& m : measures) emit_gate(m);
    out.final_layout = std::move(l2p);
    return out;
  }

 private:
  std::vector<int> front_qubits(const std::vector<Gate>& gates,
                                const std::vector<std::size_t>& front,
                                const std::vector<int>& l2p) const {
    std::vector<int> qs;
    for (std::size_t i : front) {
      for (int q : gates[i].qubits) qs.push_back(l2p[static_cast<std::size_t>(q)]);
    }
    std::sort(qs.begin(), qs.end());
    qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
    return qs;
  }

  // Two-qubit successors of the front layer in topological order, up to the
  // lookahead size.
  std::vector<std::size_t> extended_set(const std::vector<Gate>& gates,
                                        const std::vector<std::vector<std::size_t>>& succ,
                                        std::vector<int> pending,
                                        const std::vector<std::size_t>& front) const {
    std::vector<std::size_t> out;
    std::vector<std::size_t> layer = front;
    const auto limit = static_cast<std::size_t>(opts_.lookahead);
    while (!layer.empty() && out.size() < limit) {
      std::vector<std::size_t> next;
      for (std::size_t i : layer) {
        for (std::size_t s : succ[i]) {
          if (--pending[s] == 0) next.push_back(s);
        }
      }
      std::sort(next.begin(), next.end());
      for (std::size_t s : next) {
        if (gates[s].is_two_qubit() && out.size() < limit) out.push_back(s);
      }
      layer = std::move(next);
    }
    return out;
  }

  double swap_score(const std::vector<Gate>& gates, const std::vector<std::size_t>& front,
                    const std::vector<std::size_t>& extended, const std::vector<int>& l2p,
                    int a, int b, const std::vector<double>& decay) const {
    auto pos = [&](int logical) {
      const int p = l2p[static_cast<std::size_t>(logical)];
      return p == a ? b : p == b ? a : p;
    };
    double f = 0.0;
    int nf = 0;
    for (std::size_t i : front) {
      if (!gates[i].is_two_qubit()) continue;
      f += distance(pos(gates[i].qubits[0]), pos(gates[i].qubits[1]));
      ++nf;
    }
    double e = 0.0;
    for (std::size_t i : extended) {
      e += distance(pos(gates[i].qubits[0]), pos(gates[i].qubits[1]));
    }
    double score = nf ? f / nf : 0.0;
    if (!extended.empty()) {
      score += opts_.lookahead_weight * e / static_cast<double>(extended.size());
    }
    return score * std::max(decay[static_cast<std::size_t>(a)], decay[static_cast<std::size_t>(b)]);
  }

  std::vector<int> phys_;
  std::vector<int> local_;
  std::vector<std::vector<int>> adj_;
  std::vector<std::vector<char>> adjacent_;
  std::vector<std::vector<double>> dist_;
  RouterOptions opts_;
};

// Greedy placement: most-interacting logical qubit on the region's best qubit,
// then each next qubit where it sits closest to its placed partners.
inline std::vector<int> seed_layout(const Circuit& c, const RegionRouter& router,
                                    const std::vector<double>& utility) {
  const int k = c.num_qubits();
  const auto r = static_cast<int>(router.size());
  const auto counts = interaction_counts(c);
  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> weight(static_cast<std::size_t>(k), 0);
  for (int q = 0; q < k; ++q) {
    const auto& row = counts[static_cast<std::size_t>(q)];
    weight[static_cast<std::size_t>(q)] = std::accumulate(row.begin(), row.end(), 0);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return weight[static_cast<std::size_t>(a)] > weight[static_cast<std::size_t>(b)];
  });

  auto util = [&](int local) {
    return utility[static_cast<std::size_t>(router.to_physical(local))];
  };
  std::vector<int> l2p(static_cast<std::size_t>(k), -1);
  std::vector<char> used(static_cast<std::size_t>(r), 0);
  std::vector<int> placed;
  for (int q : order) {
    int best = -1;
    double best_partner = 0.0;
    double best_spread = 0.0;
    for (int p = 0; p < r; ++p) {
      if (used[static_cast<std::size_t>(p)]) continue;
      double partner = 0.0;
      double spread = 0.0;
      for (int other : placed) {
        const double d = router.distance(p, l2p[static_cast<std::size_t>(other)]);
        partner += counts[static_cast<std::size_t>(q)][static_cast<std::size_t>(other)] * d;
        spread += d;
      }
      const bool better =
          best < 0 || partner < best_partner - 1e-12 ||
          (std::abs(partner - best_partner) <= 1e-12 &&
           (spread < best_spread - 1e-12 ||
            (std::abs(spread - best_spread) <= 1e-12 && util(p) > util(best))));
      if (better) {
        best = p;
        best_partner = partner;
        best_spread = spread;
      }
    }
    l2p[static_cast<std::size_t>(q)] = best;
    used[static_cast<std::size_t>(best)] = 1;
    placed.push_back(q);
  }
  return l2p;
}

inline std::vector<int> to_local_layout(const Layout& layout, const RegionRouter& router) {
  std::vector<int> out;
  for (int p : layout) {
    const int l = router.to_local(p);
    if (l < 0) throw ValidationError("layout maps outside the region");
    out.push_back(l);
  }
  return out;
}

inline Layout to_physical_layout(const std::vector<int>& local, const RegionRouter& router) {
  Layout out;
  for (int l : local) out.push_back(router.to_physical(l));
  return out;
}

inline void check_fits(const Circuit& c, const Region& rg) {
  if (static_cast<std::size_t>(c.num_qubits()) > rg.qubits.size()) {
    throw ValidationError(
        "region too small: " + std::to_string(rg.qubits.size()) + " qubits for a " +
        std::to_string(c.num_qubits()) + "-qubit program");
  }
}

}  // namespace detail

/// Reverse-traversal layout search: from a greedy placement, alternately route
/// the circuit forward and backward, keeping each backward pass's final layout
/// as the next candidate. Returns the candidate with the fewest forward swaps
/// (earliest on ties). Deterministic.
inline Layout initial_layout(const Circuit& c, const Region& rg, const DeviceGraph& g,
                             const RouterOptions& opts = {}) {
  detail::check_fits(c, rg);
  const Circuit flat = decompose_swaps(c);
  const detail::RegionRouter router(rg, g, opts);
  const auto utility = qubit_utilities(g);

  std::vector<Gate> reversed(flat.gates().rbegin(), flat.gates().rend());
  std::vector<int> candidate = detail::seed_layout(flat, router, utility);
  std::vector<int> best = candidate;
  int best_swaps = router.run(flat.gates(), flat.num_qubits(), candidate, false).swaps;
  for (int pass = 0; pass < opts.layout_passes && best_swaps > 0; ++pass) {
    const auto fwd = router.run(flat.gates(), flat.num_qubits(), candidate, false);
    const auto bwd = router.run(reversed, flat.num_qubits(), fwd.final_layout, false);
    candidate = bwd.final_layout;
    const int swaps = router.run(flat.gates(), flat.num_qubits(), candidate, false).swaps;
    if (swaps < best_swaps) {
      best_swaps = swaps;
      best = candidate;
    }
  }
  return detail::to_physical_layout(best, router);
}

/// Inserts swaps (as three CNOTs each) so every CNOT acts on a linked pair,
/// using only qubits of `rg`. Source swaps are expanded first.
inline RoutingResult route(const Circuit& c, const Region& rg, const DeviceGraph& g,
                           const Layout& layout, const RouterOptions& opts = {}) {
  detail::check_fits(c, rg);
  if (layout.size() != static_cast<std::size_t>(c.num_qubits())) {
    throw ValidationError("layout size does not match circuit width");
  }
  const Circuit flat = decompose_swaps(c);
  const detail::RegionRouter router(rg, g, opts);
  auto local = detail::to_local_layout(layout, router);
  {
    std::vector<int> sorted = local;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ValidationError("layout is not injective");
    }
  }
  auto result = router.run(flat.gates(), flat.num_qubits(), std::move(local), true);
  result.final_layout = detail::to_physical_layout(result.final_layout, router);
  return result;
}

inline double region_utility(const Region& rg, const DeviceGraph& g) {
  double sum = 0.0;
  for (int q : rg.qubits) sum += qubit_utility(g, q);
  return sum;
}

inline Executable compile_on_region(const Circuit& c, const Region& rg,
                                    const DeviceGraph& g, const RouterOptions& opts = {}) {
  const Layout layout = initial_layout(c, rg, g, opts);
  auto routed = route(c, rg, g, layout, opts);

  Executable e;
  e.program_name = c.name();
  e.num_qubits = c.num_qubits();
  e.num_clbits = c.num_clbits();
  e.region = rg;
  e.layout = layout;
  e.final_layout = std::move(routed.final_layout);
  e.routed_gates = std::move(routed.gates);
  e.swaps = routed.swaps;
  e.d_in = circuit_depth(decompose_swaps(c));
  e.d_out = gate_list_depth(e.routed_gates, g.num_qubits());
  e.cost.depth_ratio = e.d_in == 0 ? 1.0 : static_cast<double>(e.d_out) / e.d_in;
  e.cost.region_utility = region_utility(rg, g);
  return e;
}

/// Stable sort of executables best-first.
inline void rank_executables(std::vector<Executable>& execs) {
  std::stable_sort(execs.begin(), execs.end(), [](const Executable& a, const Executable& b) {
    return cost_less(a.cost, b.cost);
  });
}

inline int units_needed(int num_qubits, int unit_size) {
  return std::max(1, (num_qubits + unit_size - 1) / unit_size);
}

/// Compiles `c` on every candidate region of ceil(k/m) units that can hold it
/// and returns the ranked process. Regions are compiled independently.
inline Process compile_multi_version(const Circuit& c, const UnitGraph& ug,
                                     const DeviceGraph& g, const RouterOptions& opts = {},
                                     unsigned workers = default_workers()) {
  const int r = units_needed(c.num_qubits(), ug.unit_size);
  if (static_cast<std::size_t>(r) > ug.num_full_units()) {
    throw Error("no feasible region: " + c.name() + " needs " + std::to_string(r) +
                " compute units, device has " + std::to_string(ug.num_full_units()));
  }
  std::vector<Region> regions;
  for (auto& rg : enumerate_regions(ug, r)) {
    if (region_qubit_count(rg) >= static_cast<std::size_t>(c.num_qubits())) {
      regions.push_back(std::move(rg));
    }
  }
  if (regions.empty()) throw Error("no feasible region for " + c.name());

  Process p;
  p.program_name = c.name();
  p.num_qubits = c.num_qubits();
  p.executables.resize(regions.size());
  parallel_for(
      regions.size(),
      [&](std::size_t i) { p.executables[i] = compile_on_region(c, regions[i], g, opts); },
      workers);
  rank_executables(p.executables);
  return p;
}

}  // namespace mpqc
