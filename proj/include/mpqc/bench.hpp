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
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mpqc/circuit.hpp"
#include "mpqc/compiler.hpp"
#include "mpqc/crosstalk.hpp"
#include "mpqc/device.hpp"
#include "mpqc/error.hpp"
#include "mpqc/orchestrator.hpp"
#include "mpqc/parallel.hpp"
#include "mpqc/partition.hpp"
#include "mpqc/qasm.hpp"
#include "mpqc/simulator.hpp"

namespace mpqc {

// ---------------------------------------------------------------------------
// Suite and groups

/// Benchmark programs in suite order. Index i is benchmark ID i + 1.
struct Suite {
  std::vector<Circuit> programs;

  std::size_t size() const { return programs.size(); }
  const Circuit& operator[](std::size_t i) const { return programs[i]; }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& c : programs) out.push_back(c.name());
    return out;
  }
  /// Programs with at most `max_qubits` qubits, order preserved.
  Suite filtered(int max_qubits) const {
    Suite s;
    for (const auto& c : programs) {
      if (c.num_qubits() <= max_qubits) s.programs.push_back(c);
    }
    return s;
  }
};

/// Loads `dir/suite.txt` (one program name per line) and the matching
/// `<name>.qasm` files.
inline Suite load_suite(const std::filesystem::path& dir) {
  std::ifstream in(dir / "suite.txt");
  if (!in) throw Error("cannot open " + (dir / "suite.txt").string());
  Suite s;
  std::string name;
  while (std::getline(in, name)) {
    if (name.empty() || name[0] == '#') continue;
    s.programs.push_back(load_qasm((dir / (name + ".qasm")).string()));
  }
  if (s.programs.empty()) throw ValidationError("empty benchmark suite");
  return s;
}

struct BenchmarkGroup {
  std::size_t id{0};
  std::vector<std::size_t> members;  // suite indices, ascending

  /// ID_1_..._ID_M with 1-based suite indices.
  std::string label() const {
    std::string out;
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (i) out += '_';
      out += std::to_string(members[i] + 1);
    }
    return out;
  }
};

/// C(n, k), saturating at UINT64_MAX.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(r);
}

/// `count` distinct M-subsets of a suite of `suite_size` programs, drawn
/// with a seeded generator. Throws if fewer than `count` subsets exist.
inline std::vector<BenchmarkGroup> generate_groups(std::size_t suite_size, std::size_t m,
                                                   std::size_t count, std::uint64_t seed) {
  if (m < 1 || m > suite_size) {
    throw ValidationError("group size " + std::to_string(m) + " outside [1, " +
                          std::to_string(suite_size) + "]");
  }
  if (count < 1) throw ValidationError("group count must be >= 1");
  const std::uint64_t total = binomial(suite_size, m);
  if (total < count) {
    throw ValidationError("only " + std::to_string(total) + " distinct groups of size " +
                          std::to_string(m) + " exist, " + std::to_string(count) +
                          " requested");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> picked;
  if (total <= 4 * count) {
    // Dense regime: enumerate every subset and shuffle.
    std::vector<std::vector<std::size_t>> all;
    std::vector<std::size_t> cur(m);
    std::iota(cur.begin(), cur.end(), 0);
    while (true) {
      all.push_back(cur);
      std::size_t i = m;
      while (i-- > 0 && cur[i] == suite_size - m + i) {
      }
      if (i == static_cast<std::size_t>(-1)) break;
      ++cur[i];
      for (std::size_t j = i + 1; j < m; ++j) cur[j] = cur[j - 1] + 1;
    }
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(count);
    picked = std::move(all);
  } else {
    std::set<std::vector<std::size_t>> seen;
    std::vector<std::size_t> pool(suite_size);
    std::iota(pool.begin(), pool.end(), 0);
    while (picked.size() < count) {
      std::vector<std::size_t> s;
      std::sample(pool.begin(), pool.end(), std::back_inserter(s), m, rng);
      if (seen.insert(s).second) picked.push_back(std::move(s));
    }
  }
  std::vector<BenchmarkGroup> groups;
  for (std::size_t i = 0; i < picked.size(); ++i) groups.push_back({i, std::move(picked[i])});
  return groups;
}

// ---------------------------------------------------------------------------
// Statistics

inline std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = rank;
    i = j + 1;
  }
  return r;
}

/// Spearman rank correlation with average ranks for ties. Returns nullopt
/// when either side is constant or fewer than two points are given.
inline std::optional<double> spearman(const std::vector<double>& x,
                                      const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("spearman: length mismatch");
  if (x.size() < 2) return std::nullopt;
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

inline double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// ---------------------------------------------------------------------------
// Experiments

enum class Mode { aware, vanilla, oracle };

inline std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::aware: return "aware";
    case Mode::vanilla: return "vanilla";
    case Mode::oracle: return "oracle";
  }
  return "?";
}

inline Mode parse_mode(std::string_view s) {
  if (s == "aware") return Mode::aware;
  if (s == "vanilla") return Mode::vanilla;
  if (s == "oracle") return Mode::oracle;
  throw ValidationError("unknown mode: " + std::string(s));
}

struct ExperimentConfig {
  int unit_size{4};
  Strategy strategy{Strategy::random};
  Mode mode{Mode::aware};
  std::uint64_t seed{1};
  std::uint64_t shots{1U << 14};
  /// Error trajectories per executable; 0 samples one per shot.
  std::uint64_t trajectories{512};
  /// Skip simulation and record orchestration outcomes only.
  bool simulate{true};
  /// Crosstalk present on the device during execution.
  std::optional<CrosstalkMap> crosstalk;
  /// Let the orchestrator avoid flagged links between co-running programs.
  bool crosstalk_aware{false};
  std::chrono::nanoseconds brute_force_timeout{std::chrono::seconds(10)};
  unsigned workers{default_workers()};
};

struct GroupRecord {
  BenchmarkGroup group;
  std::vector<std::string> programs;
  bool success{false};
  std::string error;
  std::vector<double> fidelities;  // one per member, suite order
  std::vector<std::size_t> ranks;  // 1-based executable rank per member
  std::size_t index_sum{0};
  std::uint64_t evaluations{0};
  std::chrono::nanoseconds orchestration{0};
  double mean_fidelity() const { return mean(fidelities); }
};

struct ExperimentReport {
  std::string device;
  std::string strategy;
  std::string mode;
  std::uint64_t seed{0};
  int unit_size{0};
  std::vector<GroupRecord> records;  // ordered by group id
};

/// SR: successful groups over evaluated groups.
inline double success_ratio(const ExperimentReport& r) {
  if (r.records.empty()) throw ValidationError("empty report");
  const auto ok = std::count_if(r.records.begin(), r.records.end(),
                                [](const GroupRecord& g) { return g.success; });
  return static_cast<double>(ok) / static_cast<double>(r.records.size());
}

/// Mean group fidelity over successful groups.
inline double mean_fidelity(const ExperimentReport& r) {
  std::vector<double> v;
  for (const auto& g : r.records) {
    if (g.success && g.fidelities.size()) v.push_back(g.mean_fidelity());
  }
  return mean(v);
}

/// Compiled processes and ideal distributions for one (device, unit size),
/// plus a memo of noise-only fidelities keyed by executable.
class ExperimentContext {
 public:
  ExperimentContext(const Suite& suite, const DeviceGraph& compile_device, int unit_size,
                    unsigned workers = default_workers())
      : suite_(suite), units_(generate_compute_units(compile_device, unit_size)) {
    processes_.resize(suite.size());
    ideal_.resize(suite.size());
    errors_.resize(suite.size());
    for (std::size_t i = 0; i < suite.size(); ++i) {
      try {
        processes_[i] = compile_multi_version(suite[i], units_, compile_device, {}, workers);
      } catch (const Error& e) {
        errors_[i] = e.what();
      }
    }
  }

  const Suite& suite() const { return suite_; }
  const UnitGraph& units() const { return units_; }
  bool compiled(std::size_t i) const { return errors_[i].empty(); }
  const std::string& compile_error(std::size_t i) const { return errors_[i]; }
  const Process& process(std::size_t i) const { return processes_[i]; }

  const Distribution& ideal(std::size_t i) {
    std::lock_guard lock(mu_);
    if (!ideal_[i]) ideal_[i] = simulate_ideal(suite_[i]);
    return *ideal_[i];
  }

  /// Fidelity of executable `v` of program `i` run on `device`. Results
  /// without crosstalk are memoized per (program, version, device tag).
  double fidelity_of(std::size_t i, std::size_t v, const DeviceGraph& device,
                     const std::string& device_tag, const ExperimentConfig& cfg,
                     const std::vector<int>& co_running) {
    const bool cacheable = !cfg.crosstalk || co_running.empty();
    const auto key = std::make_tuple(i, v, device_tag, cfg.seed, cfg.shots, cfg.trajectories);
    if (cacheable) {
      std::lock_guard lock(mu_);
      if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    const Executable& e = processes_[i].executables[v];
    NoiseSpec spec;
    spec.shots = cfg.shots;
    spec.trajectories = cfg.trajectories;
    // The seed depends on the program and its region only, so the same
    // executable sees the same error stream in every mode.
    std::uint64_t h = detail::splitmix64(cfg.seed ^ std::hash<std::string>{}(e.program_name));
    for (int u : e.region.unit_ids) h = detail::splitmix64(h ^ static_cast<std::uint64_t>(u));
    spec.seed = h;
    if (cfg.crosstalk && !co_running.empty()) {
      spec.crosstalk = cfg.crosstalk;
      spec.co_running = co_running;
    }
    const double f = fidelity(ideal(i), simulate_noisy(e, spec, device));
    if (cacheable) {
      std::lock_guard lock(mu_);
      memo_[key] = f;
    }
    return f;
  }

 private:
  const Suite& suite_;
  UnitGraph units_;
  std::vector<Process> processes_;
  std::vector<std::string> errors_;
  std::vector<std::optional<Distribution>> ideal_;
  std::mutex mu_;
  std::map<std::tuple<std::size_t, std::size_t, std::string, std::uint64_t, std::uint64_t,
                      std::uint64_t>,
           double>
      memo_;
};

namespace detail {

inline std::uint64_t group_seed(std::uint64_t seed, std::size_t group_id) {
  return splitmix64(seed ^ splitmix64(0x6a09e667f3bcc909ULL + group_id));
}

inline GroupRecord run_group(ExperimentContext& ctx, const BenchmarkGroup& group,
                             const DeviceGraph& run_device, const std::string& device_tag,
                             const ExperimentConfig& cfg) {
  GroupRecord rec;
  rec.group = group;
  for (auto i : group.members) rec.programs.push_back(ctx.suite()[i].name());
  for (auto i : group.members) {
    if (!ctx.compiled(i)) {
      rec.error = ctx.compile_error(i);
      return rec;
    }
  }
  std::vector<Process> procs;
  for (auto i : group.members) procs.push_back(ctx.process(i));

  // Chosen version per member.
  std::vector<std::size_t> version(group.members.size(), 0);
  if (cfg.mode == Mode::oracle) {
    rec.index_sum = group.members.size();
  } else {
    try {
      Selection sel;
      if (cfg.strategy == Strategy::brute_force) {
        BruteForceOptions opts;
        opts.timeout = cfg.brute_force_timeout;
        sel = select_brute_force(procs, opts);
      } else {
        HeuristicOptions opts;
        opts.seed = group_seed(cfg.seed, group.id);
        opts.shuffle_executables = cfg.mode == Mode::vanilla;
        if (cfg.crosstalk_aware && cfg.crosstalk) opts.crosstalk = &*cfg.crosstalk;
        sel = select_heuristic(procs, cfg.mode == Mode::vanilla ? Strategy::random : cfg.strategy,
                               opts);
      }
      for (const auto& c : sel.chosen) version[c.process] = c.index;
      rec.index_sum = sel.index_sum;
      rec.evaluations = sel.evaluations;
      rec.orchestration = sel.elapsed;
    } catch (const Error& e) {
      rec.error = e.what();
      return rec;
    }
  }
  for (auto v : version) rec.ranks.push_back(v + 1);

  if (cfg.simulate) {
    try {
      for (std::size_t j = 0; j < group.members.size(); ++j) {
        std::vector<int> others;
        if (cfg.mode != Mode::oracle) {
          for (std::size_t o = 0; o < group.members.size(); ++o) {
            if (o == j) continue;
            const auto& q = procs[o].executables[version[o]].region.qubits;
            others.insert(others.end(), q.begin(), q.end());
          }
        }
        rec.fidelities.push_back(
            ctx.fidelity_of(group.members[j], version[j], run_device, device_tag, cfg, others));
      }
    } catch (const Error& e) {
      rec.error = e.what();
      rec.fidelities.clear();
      return rec;
    }
  }
  rec.success = true;
  return rec;
}

}  // namespace detail

/// Orchestrates and simulates every group. Programs are compiled against the
/// context's device; `run_device` supplies the error rates seen at execution
/// (pass the same device for matched calibration). Failures are recorded in
/// the report, never dropped.
inline ExperimentReport run_fidelity_experiment(ExperimentContext& ctx,
                                                const std::vector<BenchmarkGroup>& groups,
                                                const DeviceGraph& run_device,
                                                const ExperimentConfig& cfg,
                                                const std::string& device_tag = "device") {
  ExperimentReport report;
  report.device = device_tag;
  report.strategy = std::string(strategy_name(cfg.strategy));
  report.mode = std::string(mode_name(cfg.mode));
  report.seed = cfg.seed;
  report.unit_size = ctx.units().unit_size;
  report.records.resize(groups.size());
  parallel_for(
      groups.size(),
      [&](std::size_t g) {
        report.records[g] = detail::run_group(ctx, groups[g], run_device, device_tag, cfg);
      },
      cfg.workers);
  return report;
}

/// Ranking validation: per program, Spearman correlation between predicted
/// order (rank 1 best) and measured order (highest fidelity first) over all
/// its executables. Programs with one version or constant fidelity are
/// skipped.
struct RankingResult {
  std::vector<std::string> programs;
  std::vector<double> correlations;
  double average() const { return mean(correlations); }
};

inline RankingResult ranking_correlation(ExperimentContext& ctx, const DeviceGraph& run_device,
                                         const ExperimentConfig& cfg,
                                         const std::string& device_tag = "device") {
  RankingResult out;
  for (std::size_t i = 0; i < ctx.suite().size(); ++i) {
    if (!ctx.compiled(i)) continue;
    const auto& p = ctx.process(i);
    if (p.size() < 2) continue;
    std::vector<double> predicted, measured;
    for (std::size_t v = 0; v < p.size(); ++v) {
      predicted.push_back(-static_cast<double>(v));
      measured.push_back(ctx.fidelity_of(i, v, run_device, device_tag, cfg, {}));
    }
    if (auto rho = spearman(predicted, measured)) {
      out.programs.push_back(p.program_name);
      out.correlations.push_back(*rho);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepKind { unit_size, concurrency, variation, crosstalk };

inline std::string_view sweep_name(SweepKind k) {
  switch (k) {
    case SweepKind::unit_size: return "unit_size";
    case SweepKind::concurrency: return "concurrency";
    case SweepKind::variation: return "variation";
    case SweepKind::crosstalk: return "crosstalk";
  }
  return "?";
}

inline SweepKind parse_sweep(std::string_view s) {
  if (s == "unit_size") return SweepKind::unit_size;
  if (s == "concurrency") return SweepKind::concurrency;
  if (s == "variation") return SweepKind::variation;
  if (s == "crosstalk") return SweepKind::crosstalk;
  throw ValidationError("unknown sweep: " + std::string(s));
}

struct SweepConfig {
  SweepKind kind{SweepKind::unit_size};
  ExperimentConfig base;
  std::string device_tag{"device"};
  /// Programs above this width are left out of the suite.
  int max_program_qubits{kMaxSimQubits};
  std::size_t group_size{2};
  std::size_t groups{10};
  /// Swept values: unit sizes, group sizes, sigmas, or crosstalk-aware
  /// off/on (0/1). Empty selects the defaults for the kind.
  std::vector<double> values;
  /// Strategies compared by the concurrency sweep.
  std::vector<Strategy> strategies{Strategy::random, Strategy::small_first,
                                   Strategy::large_first, Strategy::brute_force};
  /// Fraction of links flagged when no crosstalk map is configured.
  double crosstalk_fraction{0.3};
};

inline std::vector<double> default_sweep_values(SweepKind k) {
  switch (k) {
    case SweepKind::unit_size: return {2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    case SweepKind::concurrency: return {2, 3, 4, 5, 6, 7, 8, 9, 10};
    case SweepKind::variation: return {0.0, 0.05, 0.1, 0.2};
    case SweepKind::crosstalk: return {0, 1};
  }
  return {};
}

struct SweepPoint {
  double value{0.0};
  ExperimentReport report;
};

struct SweepResult {
  SweepKind kind{SweepKind::unit_size};
  std::vector<SweepPoint> points;
};

inline SweepResult run_sweep(const Suite& full_suite, const DeviceGraph& device,
                             const SweepConfig& sc) {
  const Suite suite = full_suite.filtered(sc.max_program_qubits);
  auto values = sc.values.empty() ? default_sweep_values(sc.kind) : sc.values;
  SweepResult out;
  out.kind = sc.kind;

  switch (sc.kind) {
    case SweepKind::unit_size: {
      const auto groups = generate_groups(suite.size(), sc.group_size, sc.groups, sc.base.seed);
      for (double v : values) {
        const int m = static_cast<int>(v);
        if (m < 1 || m > device.num_qubits()) {
          throw ValidationError("unit size " + std::to_string(m) + " out of range");
        }
        ExperimentContext ctx(suite, device, m, sc.base.workers);
        auto cfg = sc.base;
        cfg.unit_size = m;
        out.points.push_back({v, run_fidelity_experiment(ctx, groups, device, cfg, sc.device_tag)});
      }
      break;
    }
    case SweepKind::concurrency: {
      ExperimentContext ctx(suite, device, sc.base.unit_size, sc.base.workers);
      for (double v : values) {
        const auto m = static_cast<std::size_t>(v);
        const auto groups = generate_groups(suite.size(), m, sc.groups, sc.base.seed + m);
        for (auto s : sc.strategies) {
          auto cfg = sc.base;
          cfg.strategy = s;
          out.points.push_back(
              {v, run_fidelity_experiment(ctx, groups, device, cfg, sc.device_tag)});
        }
      }
      break;
    }
    case SweepKind::variation: {
      const auto groups = generate_groups(suite.size(), sc.group_size, sc.groups, sc.base.seed);
      ExperimentContext ctx(suite, device, sc.base.unit_size, sc.base.workers);
      for (double sigma : values) {
        if (sigma < 0.0) throw ValidationError("variation sigma must be >= 0");
        // Compile against the nominal calibration, execute on drifted errors.
        const DeviceGraph online =
            sigma == 0.0 ? device
                         : apply_variation(device, VariationModel(0.0, sigma, sc.base.seed));
        std::ostringstream tag;
        tag << sc.device_tag << "@sigma=" << sigma;
        out.points.push_back(
            {sigma, run_fidelity_experiment(ctx, groups, online, sc.base,
                                            sigma == 0.0 ? sc.device_tag : tag.str())});
      }
      break;
    }
    case SweepKind::crosstalk: {
      const auto groups = generate_groups(suite.size(), sc.group_size, sc.groups, sc.base.seed);
      ExperimentContext ctx(suite, device, sc.base.unit_size, sc.base.workers);
      auto cfg = sc.base;
      if (!cfg.crosstalk) {
        cfg.crosstalk = random_crosstalk_map(device, sc.crosstalk_fraction, sc.base.seed);
      }
      for (double v : values) {
        cfg.crosstalk_aware = v != 0.0;
        out.points.push_back({v, run_fidelity_experiment(ctx, groups, device, cfg, sc.device_tag)});
      }
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reporting

inline constexpr std::string_view kCsvHeader =
    "sweep,value,group,members,programs,device,unit_size,strategy,mode,seed,success,"
    "mean_fidelity,fidelities,ranks,index_sum,evaluations,orchestration_ns,error";

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

template <class T>
std::string join(const std::vector<T>& v, char sep) {
  std::ostringstream os;
  os.precision(10);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << sep;
    os << v[i];
  }
  return os.str();
}

}  // namespace detail

/// One row per (swept value, group). Lists inside a cell are ';'-separated.
inline void write_csv(std::ostream& os, const SweepResult& r) {
  os << kCsvHeader << '\n';
  os.precision(10);
  for (const auto& pt : r.points) {
    const auto& rep = pt.report;
    for (const auto& g : rep.records) {
      os << sweep_name(r.kind) << ',' << pt.value << ',' << g.group.id << ','
         << g.group.label() << ',' << detail::join(g.programs, ';') << ','
         << detail::csv_escape(rep.device) << ',' << rep.unit_size << ',' << rep.strategy << ','
         << rep.mode << ',' << rep.seed << ',' << (g.success ? 1 : 0) << ',';
      if (g.success && !g.fidelities.empty()) os << g.mean_fidelity();
      os << ',' << detail::join(g.fidelities, ';') << ',' << detail::join(g.ranks, ';') << ','
         << g.index_sum << ',' << g.evaluations << ',' << g.orchestration.count() << ','
         << detail::csv_escape(g.error) << '\n';
    }
  }
}

inline nlohmann::json summary_json(const SweepResult& r,
                                   const std::optional<RankingResult>& ranking = std::nullopt) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& pt : r.points) {
    std::vector<double> f;
    for (const auto& g : pt.report.records) {
      if (g.success && !g.fidelities.empty()) f.push_back(g.mean_fidelity());
    }
    points.push_back({{"value", pt.value},
                      {"strategy", pt.report.strategy},
                      {"mode", pt.report.mode},
                      {"unit_size", pt.report.unit_size},
                      {"groups", pt.report.records.size()},
                      {"success_ratio", success_ratio(pt.report)},
                      {"mean_fidelity", mean(f)},
                      {"std_fidelity", stddev(f)}});
  }
  nlohmann::json out{{"sweep", std::string(sweep_name(r.kind))}, {"points", points}};
  if (!r.points.empty()) {
    out["device"] = r.points.front().report.device;
    out["seed"] = r.points.front().report.seed;
  }
  if (ranking) {
    nlohmann::json per = nlohmann::json::object();
    for (std::size_t i = 0; i < ranking->programs.size(); ++i) {
      per[ranking->programs[i]] = ranking->correlations[i];
    }
    out["ranking_spearman"] = {{"mean", ranking->average()}, {"per_program", per}};
  }
  return out;
}

}  // namespace mpqc
