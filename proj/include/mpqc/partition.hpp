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
#include <functional>
#include <numeric>
#include <queue>
#include <string>
#include <utility>
#include <unordered_set>
#include <vector>

#include "mpqc/device.hpp"
#include "mpqc/error.hpp"

namespace mpqc {

struct ComputeUnit {
  int id{0};
  std::vector<int> qubits;  // sorted
  double utility{0.0};      // sum of member qubit utilities
  bool residual{false};     // undersized leftover, never a region on its own
};

/// Device abstraction: compute units, the unit adjacency graph and the
/// qubit -> unit map.
struct UnitGraph {
  int unit_size{0};
  std::vector<ComputeUnit> units;
  std::vector<std::pair<int, int>> edges;  // (i, j) with i < j, sorted
  std::vector<int> qubit_to_unit;

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(units.size());
    for (auto [a, b] : edges) {
      adj[static_cast<std::size_t>(a)].push_back(b);
      adj[static_cast<std::size_t>(b)].push_back(a);
    }
    return adj;
  }

  std::size_t num_full_units() const {
    return static_cast<std::size_t>(std::count_if(
        units.begin(), units.end(), [](const ComputeUnit& u) { return !u.residual; }));
  }
};

/// A group of H-connected compute units that hosts one program.
struct Region {
  std::vector<int> unit_ids;  // sorted
  std::vector<int> qubits;    // sorted union of member-unit qubits

  friend bool operator==(const Region&, const Region&) = default;
};

inline std::size_t region_qubit_count(const Region& rg) { return rg.qubits.size(); }

namespace detail {

using Adjacency = std::vector<std::vector<int>>;

inline Adjacency device_adjacency(const DeviceGraph& g) {
  Adjacency adj(static_cast<std::size_t>(g.num_qubits()));
  for (int q = 0; q < g.num_qubits(); ++q) {
    for (const auto& nb : g.neighbors(q)) adj[static_cast<std::size_t>(q)].push_back(nb.qubit);
  }
  return adj;
}

/// Component sizes of the graph restricted to nodes with alive[v] == true.
inline std::vector<int> component_sizes(const Adjacency& adj,
                                        const std::vector<char>& alive) {
  std::vector<char> seen(adj.size(), 0);
  std::vector<int> sizes;
  std::vector<int> stack;
  for (std::size_t s = 0; s < adj.size(); ++s) {
    if (!alive[s] || seen[s]) continue;
    int size = 0;
    stack.assign(1, static_cast<int>(s));
    seen[s] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      ++size;
      for (int n : adj[static_cast<std::size_t>(v)]) {
        const auto ni = static_cast<std::size_t>(n);
        if (alive[ni] && !seen[ni]) {
          seen[ni] = 1;
          stack.push_back(n);
        }
      }
    }
    sizes.push_back(size);
  }
  return sizes;
}

inline std::vector<int> component_of(const Adjacency& adj,
                                     const std::vector<char>& alive, int root) {
  std::vector<int> comp{root};
  std::vector<char> seen(adj.size(), 0);
  seen[static_cast<std::size_t>(root)] = 1;
  for (std::size_t i = 0; i < comp.size(); ++i) {
    for (int n : adj[static_cast<std::size_t>(comp[i])]) {
      const auto ni = static_cast<std::size_t>(n);
      if (alive[ni] && !seen[ni]) {
        seen[ni] = 1;
        comp.push_back(n);
      }
    }
  }
  std::sort(comp.begin(), comp.end());
  return comp;
}

struct Grouping {
  std::vector<std::vector<int>> groups;     // full-size groups, creation order
  std::vector<std::vector<int>> fragments;  // undersized leftovers
};

/// Budget for the stranding-avoidance search, in candidate groups examined
/// over the whole partition.
inline constexpr int kGrowthBudget = 200000;

using WeightFn = std::function<std::vector<double>(const std::vector<char>&)>;

inline bool better_node(const std::vector<double>& w, int a, int b) {
  const auto ai = static_cast<std::size_t>(a);
  const auto bi = static_cast<std::size_t>(b);
  return w[ai] != w[bi] ? w[ai] > w[bi] : a < b;
}

inline int best_root(const std::vector<double>& w, const std::vector<char>& alive) {
  int root = -1;
  for (std::size_t v = 0; v < alive.size(); ++v) {
    if (alive[v] && (root < 0 || better_node(w, static_cast<int>(v), root))) {
      root = static_cast<int>(v);
    }
  }
  return root;
}

/// Enumerates connected sets of `size` alive nodes containing `root`, in
/// greedy preference order: the first set produced always extends by the
/// highest-weight frontier node. Each set is produced once. `visit` returns
/// true to stop; `budget` counts expanded partial sets.
inline bool enumerate_groups(const Adjacency& adj, const std::vector<char>& alive,
                             const std::vector<double>& w, int root, int size,
                             int& budget,
                             const std::function<bool(const std::vector<int>&)>& visit) {
  const auto n = adj.size();
  std::vector<int> chosen{root};
  std::vector<char> in_group(n, 0);
  in_group[static_cast<std::size_t>(root)] = 1;
  std::vector<char> banned(n, 0);

  std::function<bool()> dfs = [&]() -> bool {
    if (static_cast<int>(chosen.size()) == size) return visit(chosen);
    if (--budget < 0) return true;
    std::vector<int> frontier;
    for (int v : chosen) {
      for (int nb : adj[static_cast<std::size_t>(v)]) {
        const auto ni = static_cast<std::size_t>(nb);
        if (alive[ni] && !in_group[ni] && !banned[ni]) frontier.push_back(nb);
      }
    }
    std::sort(frontier.begin(), frontier.end(),
              [&](int a, int b) { return better_node(w, a, b); });
    frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
    std::vector<int> newly_banned;
    bool stop = false;
    for (int v : frontier) {
      const auto vi = static_cast<std::size_t>(v);
      in_group[vi] = 1;
      chosen.push_back(v);
      stop = dfs();
      chosen.pop_back();
      in_group[vi] = 0;
      if (stop) break;
      // Sets containing v are done; exclude v from the siblings.
      banned[vi] = 1;
      newly_banned.push_back(v);
    }
    for (int v : newly_banned) banned[static_cast<std::size_t>(v)] = 0;
    return stop;
  };
  return dfs();
}

/// Plain greedy growth, one group at a time; used when the search below
/// runs out of budget.
inline Grouping grow_groups_greedy(const Adjacency& adj, int size, const WeightFn& weights) {
  std::vector<char> alive(adj.size(), 1);
  std::size_t remaining = adj.size();
  Grouping out;
  while (remaining > 0) {
    const std::vector<double> w = weights(alive);
    const int root = best_root(w, alive);
    const std::vector<int> comp = component_of(adj, alive, root);
    std::vector<int> group;
    if (static_cast<int>(comp.size()) < size) {
      group = comp;
    } else {
      int budget = 1 << 30;
      enumerate_groups(adj, alive, w, root, size, budget, [&](const std::vector<int>& g) {
        group = g;
        return true;
      });
      std::sort(group.begin(), group.end());
    }
    for (int v : group) alive[static_cast<std::size_t>(v)] = 0;
    remaining -= group.size();
    (static_cast<int>(group.size()) < size ? out.fragments : out.groups)
        .push_back(std::move(group));
  }
  return out;
}

enum class RootRule {
  best_weight,       // highest weight first: the greedy growth order
  most_constrained,  // fewest live neighbours first, weight breaks ties
};

inline int pick_root(const Adjacency& adj, const std::vector<double>& w,
                     const std::vector<char>& alive, RootRule rule) {
  if (rule == RootRule::best_weight) return best_root(w, alive);
  int root = -1, root_deg = 0;
  for (std::size_t v = 0; v < alive.size(); ++v) {
    if (!alive[v]) continue;
    int deg = 0;
    for (int nb : adj[v]) deg += alive[static_cast<std::size_t>(nb)];
    const int vi = static_cast<int>(v);
    if (root < 0 || deg < root_deg || (deg == root_deg && better_node(w, vi, root))) {
      root = vi;
      root_deg = deg;
    }
  }
  return root;
}

/// Backtracking search for a partition into connected groups of `size` with
/// at most one undersized fragment. Each step places the root chosen by
/// `rule` in a group (or in the fragment) and recurses; a partial partition
/// is pruned as soon as two remaining components have sizes that are not
/// multiples of `size`, and live sets without a completion are remembered.
/// Returns false when no partition was found inside `budget`.
inline bool search_groups(const Adjacency& adj, int size, const WeightFn& weights,
                          RootRule rule, int budget, Grouping& out) {
  const auto n = adj.size();
  std::vector<char> alive(n, 1);
  out = Grouping{};
  std::unordered_set<std::string> dead;

  auto off_components = [&](const std::vector<char>& rest) {
    int off = 0;
    for (int s : component_sizes(adj, rest)) off += (s % size) != 0;
    return off;
  };

  std::function<bool(std::size_t)> solve;

  // Tries every connected set of `k` live nodes containing `root` as the next
  // group (or as the fragment).
  auto place = [&](const std::vector<double>& w, int root, int k, bool fragment,
                   std::size_t remaining) {
    bool solved = false;
    enumerate_groups(adj, alive, w, root, k, budget, [&](const std::vector<int>& g) {
      if (--budget < 0) return true;
      for (int v : g) alive[static_cast<std::size_t>(v)] = 0;
      auto& bucket = fragment ? out.fragments : out.groups;
      const int allowed = out.fragments.empty() && !fragment ? 1 : 0;
      if (off_components(alive) <= allowed) {
        std::vector<int> group = g;
        std::sort(group.begin(), group.end());
        bucket.push_back(std::move(group));
        if (solve(remaining - g.size())) {
          solved = true;
          return true;
        }
        bucket.pop_back();
      }
      for (int v : g) alive[static_cast<std::size_t>(v)] = 1;
      return budget < 0;
    });
    return solved;
  };

  auto expand = [&](std::size_t remaining) -> bool {
    const std::vector<double> w = weights(alive);
    const int root = pick_root(adj, w, alive, rule);
    const std::vector<int> comp = component_of(adj, alive, root);
    const int comp_size = static_cast<int>(comp.size());
    if (comp_size < size) {
      if (!out.fragments.empty()) return false;
      for (int v : comp) alive[static_cast<std::size_t>(v)] = 0;
      out.fragments.push_back(comp);
      if (solve(remaining - comp.size())) return true;
      out.fragments.pop_back();
      for (int v : comp) alive[static_cast<std::size_t>(v)] = 1;
      return false;
    }
    if (place(w, root, size, false, remaining)) return true;
    // The greedy order never puts a root in the fragment; the exhaustive
    // order must, when the root's component is the one left over.
    const int rest = comp_size % size;
    return rule == RootRule::most_constrained && rest != 0 && out.fragments.empty() &&
           budget >= 0 && place(w, root, rest, true, remaining);
  };

  solve = [&](std::size_t remaining) -> bool {
    if (remaining == 0) return true;
    std::string key(alive.begin(), alive.end());
    key.push_back(out.fragments.empty() ? 0 : 1);
    if (dead.count(key)) return false;
    if (expand(remaining)) return true;
    if (budget >= 0) dead.insert(std::move(key));
    return false;
  };

  return off_components(alive) <= 1 && solve(n);
}

/// Repeatedly takes the highest-weight remaining node as root and grows a
/// connected group of `size` nodes from it, preferring the highest-weight
/// frontier node (ties: lowest index). `weights` is called on the set of
/// remaining nodes before each group, so callers can recompute scores on the
/// residual graph.
///
/// Growth choices are backtracked across groups so that the leftovers end up
/// in at most one undersized fragment; the first solution found is the greedy
/// one whenever greedy does not strand nodes. If that order finds nothing
/// within budget, a most-constrained-first search takes over, and plain
/// greedy growth is the last resort.
inline Grouping grow_groups(const Adjacency& adj, int size, const WeightFn& weights) {
  Grouping out;
  if (search_groups(adj, size, weights, RootRule::best_weight, kGrowthBudget, out)) return out;
  if (search_groups(adj, size, weights, RootRule::most_constrained, kGrowthBudget, out)) return out;
  return grow_groups_greedy(adj, size, weights);
}

}  // namespace detail

/// Residual-graph utilities: for each live qubit, live incident links over the
/// sum of their errors; zero for dead or isolated qubits.
inline std::vector<double> residual_utilities(const DeviceGraph& g,
                                              const std::vector<char>& alive) {
  std::vector<double> u(static_cast<std::size_t>(g.num_qubits()), 0.0);
  for (int q = 0; q < g.num_qubits(); ++q) {
    if (!alive[static_cast<std::size_t>(q)]) continue;
    int deg = 0;
    double sum = 0.0;
    for (const auto& nb : g.neighbors(q)) {
      if (!alive[static_cast<std::size_t>(nb.qubit)]) continue;
      ++deg;
      sum += g.link_error(nb.link);
    }
    u[static_cast<std::size_t>(q)] = deg == 0 ? 0.0 : deg / sum;
  }
  return u;
}

/// Abstracts the device into compute units of `m` qubits and builds the unit
/// graph. Qubits that cannot fill a whole unit end up in an undersized unit
/// flagged `residual`.
inline UnitGraph generate_compute_units(const DeviceGraph& g, int m) {
  if (m < 1 || m > g.num_qubits()) {
    throw ValidationError("compute unit size must be in [1, num_qubits]");
  }
  const auto adj = detail::device_adjacency(g);
  const auto grouping = detail::grow_groups(
      adj, m, [&g](const std::vector<char>& alive) { return residual_utilities(g, alive); });

  const auto utility = qubit_utilities(g);
  UnitGraph ug;
  ug.unit_size = m;
  ug.qubit_to_unit.assign(static_cast<std::size_t>(g.num_qubits()), -1);
  auto emit = [&](const std::vector<int>& qubits, bool residual) {
    ComputeUnit u;
    u.id = static_cast<int>(ug.units.size());
    u.qubits = qubits;
    u.residual = residual;
    for (int q : qubits) {
      u.utility += utility[static_cast<std::size_t>(q)];
      ug.qubit_to_unit[static_cast<std::size_t>(q)] = u.id;
    }
    ug.units.push_back(std::move(u));
  };
  for (const auto& grp : grouping.groups) emit(grp, false);
  for (const auto& frag : grouping.fragments) emit(frag, true);

  for (const auto& l : g.links()) {
    int a = ug.qubit_to_unit[static_cast<std::size_t>(l.a)];
    int b = ug.qubit_to_unit[static_cast<std::size_t>(l.b)];
    if (a == b) continue;
    ug.edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(ug.edges.begin(), ug.edges.end());
  ug.edges.erase(std::unique(ug.edges.begin(), ug.edges.end()), ug.edges.end());
  return ug;
}

inline Region make_region(const UnitGraph& ug, std::vector<int> unit_ids) {
  Region rg;
  std::sort(unit_ids.begin(), unit_ids.end());
  for (int id : unit_ids) {
    const auto& qs = ug.units[static_cast<std::size_t>(id)].qubits;
    rg.qubits.insert(rg.qubits.end(), qs.begin(), qs.end());
  }
  std::sort(rg.qubits.begin(), rg.qubits.end());
  rg.unit_ids = std::move(unit_ids);
  return rg;
}

/// Candidate regions of `r` units. For r = 1 every full unit is a region; for
/// larger r the unit-growth procedure runs again on the unit graph with unit
/// utilities as node weights, so regions are pairwise disjoint.
inline std::vector<Region> enumerate_regions(const UnitGraph& ug, int r) {
  if (r < 1 || static_cast<std::size_t>(r) > ug.num_full_units()) {
    throw ValidationError(
        "region of " + std::to_string(r) + " units exceeds the " +
        std::to_string(ug.num_full_units()) + " available compute units");
  }
  std::vector<Region> out;
  if (r == 1) {
    for (const auto& u : ug.units) {
      if (!u.residual) out.push_back(make_region(ug, {u.id}));
    }
    return out;
  }
  std::vector<double> w;
  for (const auto& u : ug.units) w.push_back(u.utility);
  const auto grouping = detail::grow_groups(
      ug.adjacency(), r, [&w](const std::vector<char>&) { return w; });
  for (const auto& grp : grouping.groups) out.push_back(make_region(ug, grp));
  return out;
}

/// True iff the subgraph of g induced by `qubits` is connected.
inline bool induced_connected(const DeviceGraph& g, const std::vector<int>& qubits) {
  if (qubits.empty()) return false;
  std::vector<char> member(static_cast<std::size_t>(g.num_qubits()), 0);
  for (int q : qubits) member[static_cast<std::size_t>(q)] = 1;
  const auto adj = detail::device_adjacency(g);
  return detail::component_of(adj, member, qubits.front()).size() == qubits.size();
}

/// Number of connected induced subgraphs of g with exactly k qubits, counted
/// with the ESU extension-set enumeration (each subgraph once). Stops early
/// and returns `limit` once that many have been seen.
inline std::uint64_t count_connected_subgraphs(const DeviceGraph& g, int k,
                                               std::uint64_t limit = UINT64_MAX) {
  const auto adj = detail::device_adjacency(g);
  const int n = g.num_qubits();
  std::uint64_t count = 0;
  std::vector<int> sub;
  std::vector<char> in_sub(static_cast<std::size_t>(n), 0);
  std::vector<char> in_nbhd(static_cast<std::size_t>(n), 0);

  // extend(sub, ext, root): ext holds candidates with index > root that are
  // exclusive neighbours of the most recent additions.
  std::function<void(std::vector<int>, int)> extend = [&](std::vector<int> ext, int root) {
    if (count >= limit) return;
    if (static_cast<int>(sub.size()) == k) {
      ++count;
      return;
    }
    while (!ext.empty() && count < limit) {
      const int w = ext.back();
      ext.pop_back();
      std::vector<int> next_ext = ext;
      std::vector<int> added;
      for (int u : adj[static_cast<std::size_t>(w)]) {
        const auto ui = static_cast<std::size_t>(u);
        if (u > root && !in_sub[ui] && !in_nbhd[ui]) {
          next_ext.push_back(u);
          in_nbhd[ui] = 1;
          added.push_back(u);
        }
      }
      sub.push_back(w);
      in_sub[static_cast<std::size_t>(w)] = 1;
      extend(std::move(next_ext), root);
      in_sub[static_cast<std::size_t>(w)] = 0;
      sub.pop_back();
      for (int u : added) in_nbhd[static_cast<std::size_t>(u)] = 0;
    }
  };

  for (int v = 0; v < n && count < limit; ++v) {
    sub.assign(1, v);
    std::fill(in_sub.begin(), in_sub.end(), 0);
    std::fill(in_nbhd.begin(), in_nbhd.end(), 0);
    in_sub[static_cast<std::size_t>(v)] = 1;
    in_nbhd[static_cast<std::size_t>(v)] = 1;
    std::vector<int> ext;
    for (int u : adj[static_cast<std::size_t>(v)]) {
      if (u > v) {
        ext.push_back(u);
        in_nbhd[static_cast<std::size_t>(u)] = 1;
      }
    }
    extend(std::move(ext), v);
  }
  return std::min(count, limit);
}

}  // namespace mpqc
