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

// Dense state-vector simulation. Noise is sampled as Pauli trajectories:
// single-qubit depolarizing after 1q gates, two-qubit depolarizing after
// CNOTs, classical bit flips at readout.

#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mpqc/circuit.hpp"
#include "mpqc/compiler.hpp"
#include "mpqc/crosstalk.hpp"
#include "mpqc/device.hpp"
#include "mpqc/error.hpp"

namespace mpqc {

inline constexpr int kMaxSimQubits = 14;

/// Outcome distribution over `width` classical bits. Key bit i is clbit i;
/// labels print clbit width-1 first.
struct Distribution {
  int width{0};
  std::map<std::uint64_t, double> probs;

  double total() const {
    double t = 0.0;
    for (const auto& [k, p] : probs) t += p;
    return t;
  }

  double operator[](std::uint64_t key) const {
    const auto it = probs.find(key);
    return it == probs.end() ? 0.0 : it->second;
  }

  std::string label(std::uint64_t key) const {
    std::string s(static_cast<std::size_t>(width), '0');
    for (int i = 0; i < width; ++i) {
      if ((key >> i) & 1U) s[static_cast<std::size_t>(width - 1 - i)] = '1';
    }
    return s;
  }

  static std::uint64_t key_of(const std::string& label) {
    std::uint64_t key = 0;
    for (char c : label) key = (key << 1) | (c == '1' ? 1U : 0U);
    return key;
  }
};

/// 1 - total variation distance. Outcomes missing from one side count as
/// probability zero.
inline double fidelity(const Distribution& p, const Distribution& q) {
  if (p.width != q.width) {
    throw ValidationError("distribution width mismatch: " + std::to_string(p.width) +
                          " vs " + std::to_string(q.width));
  }
  double tvd = 0.0;
  auto a = p.probs.begin();
  auto b = q.probs.begin();
  while (a != p.probs.end() || b != q.probs.end()) {
    if (b == q.probs.end() || (a != p.probs.end() && a->first < b->first)) {
      tvd += std::abs(a->second);
      ++a;
    } else if (a == p.probs.end() || b->first < a->first) {
      tvd += std::abs(b->second);
      ++b;
    } else {
      tvd += std::abs(a->second - b->second);
      ++a;
      ++b;
    }
  }
  return std::clamp(1.0 - 0.5 * tvd, 0.0, 1.0);
}

class StateVector {
 public:
  using amp = std::complex<double>;
  using Mat2 = std::array<amp, 4>;  // row-major

  explicit StateVector(int num_qubits)
      : n_(num_qubits), amps_(std::size_t{1} << num_qubits, amp(0.0, 0.0)) {
    amps_[0] = 1.0;
  }

  int num_qubits() const { return n_; }
  const std::vector<amp>& amplitudes() const { return amps_; }

  void apply(const Mat2& m, int q) {
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (i & bit) continue;
      const amp a0 = amps_[i];
      const amp a1 = amps_[i | bit];
      amps_[i] = m[0] * a0 + m[1] * a1;
      amps_[i | bit] = m[2] * a0 + m[3] * a1;
    }
  }

  void cx(int control, int target) {
    const std::size_t cb = std::size_t{1} << control;
    const std::size_t tb = std::size_t{1} << target;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if ((i & cb) && !(i & tb)) std::swap(amps_[i], amps_[i | tb]);
    }
  }

  void swap(int a, int b) {
    const std::size_t ab = std::size_t{1} << a;
    const std::size_t bb = std::size_t{1} << b;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if ((i & ab) && !(i & bb)) std::swap(amps_[i], amps_[(i ^ ab) | bb]);
    }
  }

  // 1 = X, 2 = Y, 3 = Z
  void pauli(int which, int q) {
    const std::size_t bit = std::size_t{1} << q;
    switch (which) {
      case 1:
        for (std::size_t i = 0; i < amps_.size(); ++i) {
          if (!(i & bit)) std::swap(amps_[i], amps_[i | bit]);
        }
        break;
      case 2:
        for (std::size_t i = 0; i < amps_.size(); ++i) {
          if (i & bit) continue;
          const amp a0 = amps_[i];
          amps_[i] = amp(0, -1) * amps_[i | bit];
          amps_[i | bit] = amp(0, 1) * a0;
        }
        break;
      case 3:
        for (std::size_t i = 0; i < amps_.size(); ++i) {
          if (i & bit) amps_[i] = -amps_[i];
        }
        break;
      default:
        break;
    }
  }

  std::vector<double> probabilities() const {
    std::vector<double> p(amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i) p[i] = std::norm(amps_[i]);
    return p;
  }

 private:
  int n_;
  std::vector<amp> amps_;
};

inline StateVector::Mat2 gate_matrix(OpCode op, const std::vector<double>& p) {
  using amp = StateVector::amp;
  const amp i(0.0, 1.0);
  auto u3 = [&](double theta, double phi, double lambda) {
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    return StateVector::Mat2{amp(c), -std::exp(i * lambda) * s, std::exp(i * phi) * s,
                             std::exp(i * (phi + lambda)) * c};
  };
  const double r = 1.0 / std::sqrt(2.0);
  switch (op) {
    case OpCode::u1:
      return {1.0, 0.0, 0.0, std::exp(i * p[0])};
    case OpCode::u2:
      return u3(M_PI / 2, p[0], p[1]);
    case OpCode::u3:
      return u3(p[0], p[1], p[2]);
    case OpCode::rx:
      return {std::cos(p[0] / 2), -i * std::sin(p[0] / 2), -i * std::sin(p[0] / 2),
              std::cos(p[0] / 2)};
    case OpCode::ry:
      return {std::cos(p[0] / 2), -std::sin(p[0] / 2), std::sin(p[0] / 2), std::cos(p[0] / 2)};
    case OpCode::rz:
      return {std::exp(-i * (p[0] / 2)), 0.0, 0.0, std::exp(i * (p[0] / 2))};
    case OpCode::h:
      return {r, r, r, -r};
    case OpCode::x:
      return {0.0, 1.0, 1.0, 0.0};
    case OpCode::y:
      return {0.0, -i, i, 0.0};
    case OpCode::z:
      return {1.0, 0.0, 0.0, -1.0};
    case OpCode::s:
      return {1.0, 0.0, 0.0, i};
    case OpCode::sdg:
      return {1.0, 0.0, 0.0, -i};
    case OpCode::t:
      return {1.0, 0.0, 0.0, std::exp(i * (M_PI / 4))};
    case OpCode::tdg:
      return {1.0, 0.0, 0.0, std::exp(-i * (M_PI / 4))};
    default:
      throw Error("no single-qubit matrix for " + std::string(op_name(op)));
  }
}

namespace detail {

/// A gate list compacted onto 0..n-1 plus the qubit -> clbit readout map.
struct CompactProgram {
  int num_qubits{0};
  std::vector<int> physical;  // compact index -> original index
  std::vector<Gate> gates;    // unitary gates only, compact operands
  std::vector<std::size_t> source_index;  // position of each gate in the input
  std::vector<std::pair<int, int>> readout;  // (compact qubit, clbit)
  int width{0};
};

inline void apply_gate(StateVector& sv, const Gate& g) {
  switch (g.kind()) {
    case GateKind::cnot:
      sv.cx(g.qubits[0], g.qubits[1]);
      break;
    case GateKind::swap:
      sv.swap(g.qubits[0], g.qubits[1]);
      break;
    case GateKind::single_qubit:
      sv.apply(gate_matrix(g.op, g.params), g.qubits[0]);
      break;
    default:
      break;
  }
}

/// `implicit` gives the qubit carrying logical bit i when the program has no
/// measurements; every logical qubit is then read out.
inline CompactProgram compact(const std::vector<Gate>& gates, int num_clbits,
                              const std::vector<int>& implicit) {
  CompactProgram out;
  std::vector<int> touched = implicit;
  for (const auto& g : gates) touched.insert(touched.end(), g.qubits.begin(), g.qubits.end());
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  if (static_cast<int>(touched.size()) > kMaxSimQubits) {
    throw Error("too many qubits to simulate: " + std::to_string(touched.size()) + " > " +
                std::to_string(kMaxSimQubits));
  }
  out.physical = touched;
  out.num_qubits = static_cast<int>(touched.size());
  auto local = [&](int q) {
    return static_cast<int>(std::lower_bound(touched.begin(), touched.end(), q) - touched.begin());
  };
  bool measured = false;
  std::map<int, int> clbit_source;  // last writer wins
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const auto& g = gates[i];
    if (g.op == OpCode::measure) {
      measured = true;
      clbit_source[g.clbit] = local(g.qubits[0]);
      continue;
    }
    if (g.op == OpCode::barrier) continue;
    Gate cg = g;
    for (auto& q : cg.qubits) q = local(q);
    out.gates.push_back(std::move(cg));
    out.source_index.push_back(i);
  }
  if (measured) {
    out.width = num_clbits;
    for (const auto& [c, q] : clbit_source) out.readout.emplace_back(q, c);
  } else {
    out.width = static_cast<int>(implicit.size());
    for (std::size_t i = 0; i < implicit.size(); ++i) {
      out.readout.emplace_back(local(implicit[i]), static_cast<int>(i));
    }
  }
  return out;
}

inline std::uint64_t readout_key(std::size_t basis, const CompactProgram& prog) {
  std::uint64_t key = 0;
  for (auto [q, c] : prog.readout) {
    if ((basis >> q) & 1U) key |= std::uint64_t{1} << c;
  }
  return key;
}

inline Distribution exact_distribution(const CompactProgram& prog) {
  StateVector sv(prog.num_qubits);
  for (const auto& g : prog.gates) apply_gate(sv, g);
  const auto probs = sv.probabilities();
  Distribution d;
  d.width = prog.width;
  for (std::size_t b = 0; b < probs.size(); ++b) {
    if (probs[b] == 0.0) continue;
    d.probs[readout_key(b, prog)] += probs[b];
  }
  return d;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::vector<int> identity_layout(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

}  // namespace detail

/// Exact noiseless output distribution of a logical circuit. Without
/// measurements every qubit is read out, qubit i into bit i.
inline Distribution simulate_ideal(const Circuit& c) {
  if (c.num_qubits() > kMaxSimQubits) {
    throw Error("too many qubits to simulate: " + std::to_string(c.num_qubits()));
  }
  const auto implicit = c.has_measurements() ? std::vector<int>{}
                                             : detail::identity_layout(c.num_qubits());
  auto prog = detail::compact(c.gates(), c.num_clbits(), implicit);
  // compact() drops qubits no gate touches; measured programs keep their
  // width through the clbits, so that is harmless.
  return detail::exact_distribution(prog);
}

/// Exact noiseless distribution of a routed executable, labelled by logical
/// clbits (or logical qubits through the final layout when unmeasured).
inline Distribution simulate_executable_ideal(const Executable& e) {
  const bool measured = std::any_of(e.routed_gates.begin(), e.routed_gates.end(),
                                    [](const Gate& g) { return g.op == OpCode::measure; });
  const auto prog = detail::compact(e.routed_gates, e.num_clbits,
                                    measured ? std::vector<int>{} : e.final_layout);
  return detail::exact_distribution(prog);
}

struct NoiseSpec {
  std::uint64_t shots{1U << 16};
  std::uint64_t seed{0};
  /// Distinct error trajectories; shots are dealt round-robin across them.
  /// 0 draws a fresh trajectory for every shot.
  std::uint64_t trajectories{0};
  std::optional<CrosstalkMap> crosstalk;
  /// Qubits held by co-running programs; used with `crosstalk`.
  std::vector<int> co_running;
  /// Per-gate error multiplier; 0 disables gate noise (readout stays).
  double gate_noise_scale{1.0};
};

/// Monte-Carlo execution of an executable on the noisy device. The outcome
/// labels are logical: clbits for measured programs, otherwise logical qubit
/// i read through the final layout.
inline Distribution simulate_noisy(const Executable& e, const NoiseSpec& spec,
                                   const DeviceGraph& g) {
  if (spec.shots < 1) throw ValidationError("shots must be >= 1");
  const bool measured = std::any_of(e.routed_gates.begin(), e.routed_gates.end(),
                                    [](const Gate& x) { return x.op == OpCode::measure; });
  const auto prog = detail::compact(e.routed_gates, e.num_clbits,
                                    measured ? std::vector<int>{} : e.final_layout);

  std::vector<char> others(static_cast<std::size_t>(g.num_qubits()), 0);
  for (int q : spec.co_running) others[static_cast<std::size_t>(q)] = 1;

  // Error probability of the channel following each unitary gate.
  std::vector<double> perr(prog.gates.size(), 0.0);
  for (std::size_t i = 0; i < prog.gates.size(); ++i) {
    const Gate& src = e.routed_gates[prog.source_index[i]];
    double p = 0.0;
    if (src.is_two_qubit()) {
      const auto link = g.find_link(src.qubits[0], src.qubits[1]);
      if (!link) throw ValidationError("routed CNOT on unlinked qubits");
      p = g.link_error(*link);
      if (spec.crosstalk) p *= spec.crosstalk->max_amplification(src.qubits, others);
    } else {
      p = g.qubit_error(src.qubits[0]);
    }
    perr[i] = std::min(p * spec.gate_noise_scale, kMaxScaledError);
  }
  std::vector<double> flip(prog.readout.size());
  for (std::size_t i = 0; i < prog.readout.size(); ++i) {
    flip[i] = g.readout_error(prog.physical[static_cast<std::size_t>(prog.readout[i].first)]);
  }

  // Checkpoints of the error-free run so a trajectory replays only from just
  // before its first error.
  const std::size_t dim = std::size_t{1} << prog.num_qubits;
  const std::size_t ng = prog.gates.size();
  const std::size_t budget = (std::size_t{32} << 20) / (dim * sizeof(StateVector::amp));
  const std::size_t stride = std::max<std::size_t>(1, (ng + 1) / std::max<std::size_t>(1, budget) + 1);
  std::vector<StateVector> checkpoints;
  std::vector<double> ideal_probs;
  {
    StateVector sv(prog.num_qubits);
    for (std::size_t i = 0; i < ng; ++i) {
      if (i % stride == 0) checkpoints.push_back(sv);
      detail::apply_gate(sv, prog.gates[i]);
    }
    ideal_probs = sv.probabilities();
  }

  const std::uint64_t traj =
      spec.trajectories == 0 ? spec.shots : std::min(spec.shots, spec.trajectories);
  std::map<std::uint64_t, std::uint64_t> counts;
  std::vector<std::pair<std::size_t, int>> events;  // (gate, pauli code)
  std::vector<double> cdf(dim);
  for (std::uint64_t t = 0; t < traj; ++t) {
    std::mt19937_64 rng(detail::splitmix64(spec.seed ^ detail::splitmix64(t)));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    events.clear();
    for (std::size_t i = 0; i < ng; ++i) {
      if (perr[i] > 0.0 && u01(rng) < perr[i]) {
        const bool two = prog.gates[i].is_two_qubit();
        const int code = two ? 1 + static_cast<int>(rng() % 15) : 1 + static_cast<int>(rng() % 3);
        events.emplace_back(i, code);
      }
    }
    const std::vector<double>* probs = &ideal_probs;
    std::vector<double> noisy;
    if (!events.empty()) {
      const std::size_t start = (events.front().first / stride) * stride;
      StateVector sv = checkpoints[start / stride];
      std::size_t next_event = 0;
      for (std::size_t i = start; i < ng; ++i) {
        const Gate& gate = prog.gates[i];
        detail::apply_gate(sv, gate);
        while (next_event < events.size() && events[next_event].first == i) {
          const int code = events[next_event].second;
          if (gate.is_two_qubit()) {
            sv.pauli(code & 3, gate.qubits[0]);
            sv.pauli(code >> 2, gate.qubits[1]);
          } else {
            sv.pauli(code, gate.qubits[0]);
          }
          ++next_event;
        }
      }
      noisy = sv.probabilities();
      probs = &noisy;
    }
    double acc = 0.0;
    for (std::size_t b = 0; b < dim; ++b) {
      acc += (*probs)[b];
      cdf[b] = acc;
    }
    const std::uint64_t n_shots = spec.shots / traj + (t < spec.shots % traj ? 1 : 0);
    for (std::uint64_t s = 0; s < n_shots; ++s) {
      const double x = u01(rng) * acc;
      auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
      if (it == cdf.end()) --it;
      const auto basis = static_cast<std::size_t>(it - cdf.begin());
      std::uint64_t key = 0;
      for (std::size_t i = 0; i < prog.readout.size(); ++i) {
        auto [q, c] = prog.readout[i];
        bool bit = (basis >> q) & 1U;
        if (flip[i] > 0.0 && u01(rng) < flip[i]) bit = !bit;
        if (bit) key |= std::uint64_t{1} << c;
      }
      ++counts[key];
    }
  }

  Distribution d;
  d.width = prog.width;
  for (const auto& [k, n] : counts) {
    d.probs[k] = static_cast<double>(n) / static_cast<double>(spec.shots);
  }
  return d;
}

/// Wall-clock estimate of running `shots` repetitions: output depth times the
/// per-layer cycle time.
inline std::chrono::duration<double, std::nano> estimate_qpu_time(
    const Executable& e, std::chrono::duration<double, std::nano> cycle,
    std::uint64_t shots = 1) {
  if (!(cycle.count() > 0.0)) throw ValidationError("cycle time must be positive");
  return cycle * static_cast<double>(e.d_out) * static_cast<double>(shots);
}

}  // namespace mpqc
