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

// Runtime executable selection: pick one pre-compiled executable per process
// so that no two selections share a compute unit, preferring low ranks.

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mpqc/compiler.hpp"
#include "mpqc/crosstalk.hpp"
#include "mpqc/device.hpp"
#include "mpqc/error.hpp"

namespace mpqc {

enum class Strategy { random, small_first, large_first, brute_force };

inline std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::random:
      return "random";
    case Strategy::small_first:
      return "small_first";
    case Strategy::large_first:
      return "large_first";
    case Strategy::brute_force:
      return "brute_force";
  }
  return "?";
}

inline Strategy parse_strategy(std::string_view name) {
  for (auto s : {Strategy::random, Strategy::small_first, Strategy::large_first,
                 Strategy::brute_force}) {
    if (strategy_name(s) == name) return s;
  }
  throw ValidationError("unknown strategy: " + std::string(name));
}

struct Choice {
  std::size_t process{0};
  std::size_t index{0};  // 0-based rank within the process
};

struct Selection {
  std::vector<Choice> chosen;  // one per process, in input order
  std::size_t index_sum{0};    // sum of 1-based ranks
  Strategy strategy{Strategy::random};
  std::chrono::nanoseconds elapsed{0};
  std::uint64_t evaluations{0};  // executables (heuristic) or full combinations (brute force)
  std::uint64_t nodes{0};        // search nodes visited (brute force)
  std::vector<std::size_t> order;  // process traversal order

  const Executable& executable(std::span<const Process> processes, std::size_t i) const {
    return processes[chosen[i].process].executables[chosen[i].index];
  }
};

struct HeuristicOptions {
  std::uint64_t seed{0};  // process shuffle for Strategy::random
  const CrosstalkMap* crosstalk{nullptr};
  /// Also shuffle each process's executables before the greedy pass, which
  /// ignores the cost ranking (the fidelity-unaware comparator).
  bool shuffle_executables{false};
};

namespace detail {

inline std::size_t max_unit_id(std::span<const Process> processes) {
  std::size_t n = 0;
  for (const auto& p : processes) {
    if (p.executables.empty()) throw ValidationError("process " + p.program_name + " is empty");
    for (const auto& e : p.executables) {
      for (int u : e.region.unit_ids) n = std::max(n, static_cast<std::size_t>(u) + 1);
    }
  }
  return n;
}

inline std::size_t max_qubit(std::span<const Process> processes) {
  std::size_t n = 0;
  for (const auto& p : processes) {
    for (const auto& e : p.executables) {
      for (int q : e.region.qubits) n = std::max(n, static_cast<std::size_t>(q) + 1);
    }
  }
  return n;
}

}  // namespace detail

/// Traversal order for the greedy strategies. small_first/large_first sort by
/// program width and keep submission order among equals.
inline std::vector<std::size_t> traversal_order(std::span<const Process> processes,
                                                Strategy strategy, std::uint64_t seed) {
  std::vector<std::size_t> order(processes.size());
  std::iota(order.begin(), order.end(), 0);
  auto width = [&](std::size_t i) { return processes[i].num_qubits; };
  switch (strategy) {
    case Strategy::random: {
      std::mt19937_64 rng(seed);
      std::shuffle(order.begin(), order.end(), rng);
      break;
    }
    case Strategy::small_first:
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return width(a) < width(b); });
      break;
    case Strategy::large_first:
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return width(a) > width(b); });
      break;
    case Strategy::brute_force:
      break;
  }
  return order;
}

/// Greedy selection: walk processes in strategy order and take, for each,
/// the best-ranked executable whose compute units are all unclaimed. With a
/// crosstalk map, executables joined to an already-claimed qubit by a
/// flagged link are skipped as well. Inspects at most sum(K_i) executables.
/// Throws ConflictError naming the first process left without a choice.
inline Selection select_heuristic(std::span<const Process> processes, Strategy strategy,
                                  const HeuristicOptions& opts = {}) {
  if (strategy == Strategy::brute_force) {
    throw ValidationError("brute_force is not a greedy strategy");
  }
  const auto start = std::chrono::steady_clock::now();
  Selection sel;
  sel.strategy = strategy;
  sel.order = traversal_order(processes, strategy, opts.seed);
  std::vector<char> claimed_units(detail::max_unit_id(processes), 0);
  std::vector<char> claimed_qubits;
  if (opts.crosstalk) claimed_qubits.assign(detail::max_qubit(processes), 0);
  std::mt19937_64 version_rng(opts.seed ^ 0x5bd1e995ULL);

  sel.chosen.resize(processes.size());
  for (std::size_t pi : sel.order) {
    const auto& proc = processes[pi];
    std::vector<std::size_t> versions(proc.size());
    std::iota(versions.begin(), versions.end(), 0);
    if (opts.shuffle_executables) std::shuffle(versions.begin(), versions.end(), version_rng);

    std::optional<std::size_t> pick;
    for (std::size_t vi : versions) {
      const auto& exec = proc.executables[vi];
      ++sel.evaluations;
      const bool unit_clash = std::any_of(
          exec.region.unit_ids.begin(), exec.region.unit_ids.end(),
          [&](int u) { return claimed_units[static_cast<std::size_t>(u)] != 0; });
      if (unit_clash) continue;
      if (opts.crosstalk &&
          opts.crosstalk->max_amplification(exec.region.qubits, claimed_qubits) > 1.0) {
        continue;
      }
      pick = vi;
      break;
    }
    if (!pick) throw ConflictError(pi, proc.program_name);
    const auto& exec = proc.executables[*pick];
    for (int u : exec.region.unit_ids) claimed_units[static_cast<std::size_t>(u)] = 1;
    if (opts.crosstalk) {
      for (int q : exec.region.qubits) claimed_qubits[static_cast<std::size_t>(q)] = 1;
    }
    sel.chosen[pi] = {pi, *pick};
    sel.index_sum += *pick + 1;
  }
  sel.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::steady_clock::now() - start);
  return sel;
}

enum class Objective {
  index_sum,          // minimize sum of ranks
  relative_position,  // minimize sum of rank / K_i
};

struct BruteForceOptions {
  std::chrono::nanoseconds timeout{std::chrono::seconds(10)};
  /// Bound partial objectives against the incumbent. Disabling it evaluates
  /// every one of the prod(K_i) combinations.
  bool prune{true};
  Objective objective{Objective::index_sum};
};

/// Exhaustive minimum of the objective over conflict-free combinations; ties
/// go to the lexicographically smallest rank vector. Throws InfeasibleError if
/// no combination is conflict-free and TimeoutError past the deadline.
inline Selection select_brute_force(std::span<const Process> processes,
                                    const BruteForceOptions& opts = {}) {
  const auto start = std::chrono::steady_clock::now();
  const auto deadline = start + opts.timeout;
  const std::size_t m = processes.size();
  const std::size_t units = detail::max_unit_id(processes);

  auto weight = [&](std::size_t p, std::size_t idx) {
    const double rank = static_cast<double>(idx + 1);
    return opts.objective == Objective::index_sum
               ? rank
               : rank / static_cast<double>(processes[p].size());
  };
  // Smallest possible contribution of processes [p, m).
  std::vector<double> tail(m + 1, 0.0);
  for (std::size_t p = m; p-- > 0;) tail[p] = tail[p + 1] + weight(p, 0);

  std::vector<int> owner(units, 0);  // claim counts, for the no-prune path
  std::vector<std::size_t> current(m, 0);
  std::vector<std::size_t> best;
  double best_score = std::numeric_limits<double>::infinity();
  Selection sel;
  sel.strategy = Strategy::brute_force;

  auto free_units = [&](const Executable& e) {
    return std::none_of(e.region.unit_ids.begin(), e.region.unit_ids.end(),
                        [&](int u) { return owner[static_cast<std::size_t>(u)] != 0; });
  };
  auto claim = [&](const Executable& e, int delta) {
    for (int u : e.region.unit_ids) owner[static_cast<std::size_t>(u)] += delta;
  };
  constexpr double eps = 1e-12;

  std::function<void(std::size_t, double, bool)> dfs = [&](std::size_t p, double partial,
                                                           bool valid) {
    if ((++sel.nodes & 1023U) == 0 && std::chrono::steady_clock::now() > deadline) {
      throw TimeoutError("brute-force orchestration exceeded its timeout");
    }
    if (p == m) {
      ++sel.evaluations;
      if (valid && partial < best_score - eps) {
        best_score = partial;
        best = current;
      }
      return;
    }
    for (std::size_t i = 0; i < processes[p].size(); ++i) {
      const double score = partial + weight(p, i);
      if (opts.prune && score + tail[p + 1] >= best_score - eps) break;
      const auto& e = processes[p].executables[i];
      const bool ok = free_units(e);
      if (opts.prune && !ok) continue;
      claim(e, 1);
      current[p] = i;
      dfs(p + 1, score, valid && ok);
      claim(e, -1);
    }
  };
  dfs(0, 0.0, true);

  if (best.empty() && m > 0) {
    throw InfeasibleError("no conflict-free combination of executables exists");
  }
  sel.order.resize(m);
  std::iota(sel.order.begin(), sel.order.end(), 0);
  for (std::size_t p = 0; p < m; ++p) {
    sel.chosen.push_back({p, best[p]});
    sel.index_sum += best[p] + 1;
  }
  sel.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::steady_clock::now() - start);
  return sel;
}

struct OrchestrationReport {
  double crf{0.0};  // reference compile time / orchestration time
  std::chrono::nanoseconds elapsed{0};
  std::uint64_t evaluations{0};
  std::uint64_t candidate_bound{0};  // sum(K_i) for greedy, prod(K_i) for brute force
};

inline constexpr std::chrono::nanoseconds kTimerResolution{1};

inline OrchestrationReport orchestration_cost_report(
    const Selection& sel, std::span<const Process> processes,
    std::chrono::duration<double> compile_time_reference) {
  if (!(compile_time_reference.count() > 0.0)) {
    throw ValidationError("reference compile time must be positive");
  }
  OrchestrationReport r;
  r.elapsed = std::max(sel.elapsed, kTimerResolution);
  r.evaluations = sel.evaluations;
  r.crf = compile_time_reference.count() / std::chrono::duration<double>(r.elapsed).count();
  if (sel.strategy == Strategy::brute_force) {
    std::uint64_t prod = 1;
    for (const auto& p : processes) {
      prod = prod > UINT64_MAX / std::max<std::uint64_t>(1, p.size()) ? UINT64_MAX : prod * p.size();
    }
    r.candidate_bound = prod;
  } else {
    for (const auto& p : processes) r.candidate_bound += p.size();
  }
  return r;
}

/// True iff no two selected executables share a unit and, with a crosstalk
/// map, no flagged link joins the qubits of two different selections.
inline bool selection_is_conflict_free(const Selection& sel, std::span<const Process> processes,
                                       const CrosstalkMap* crosstalk = nullptr) {
  for (std::size_t i = 0; i < sel.chosen.size(); ++i) {
    for (std::size_t j = i + 1; j < sel.chosen.size(); ++j) {
      const auto& a = sel.executable(processes, i);
      const auto& b = sel.executable(processes, j);
      for (int u : a.region.unit_ids) {
        if (std::find(b.region.unit_ids.begin(), b.region.unit_ids.end(), u) !=
            b.region.unit_ids.end()) {
          return false;
        }
      }
      if (!crosstalk) continue;
      for (const auto& [link, f] : crosstalk->entries()) {
        auto in = [](const std::vector<int>& qs, int q) {
          return std::binary_search(qs.begin(), qs.end(), q);
        };
        if ((in(a.region.qubits, link.a) && in(b.region.qubits, link.b)) ||
            (in(a.region.qubits, link.b) && in(b.region.qubits, link.a))) {
          return false;
        }
      }
    }
  }
  return true;
}

}  // namespace mpqc
