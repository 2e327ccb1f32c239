// Copyright 2026 The qkmeans Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Minimal dense statevector simulator for swap-test circuits.
//
// Qubit q corresponds to bit q of the basis-state index (little endian), so
// for AmplitudeInit{qubits, amps} the amplitude amps[k] lands on the basis
// state whose bit qubits[j] equals bit j of k.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <variant>
#include <vector>

#include "qkmeans/common.hpp"

namespace qkmeans::qsim {

using Complex = std::complex<double>;
using Qubit = std::size_t;

/// Largest register simulated as one dense vector (2^24 amplitudes, 256 MiB).
inline constexpr std::size_t kMaxDenseQubits = 24;
/// Wider swap-test registers are evaluated by exact contraction.
inline constexpr std::size_t kContractFromQubits = 12;

class CircuitError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

namespace gates {

struct H {
  Qubit target;
};

struct X {
  Qubit target;
};

/// U(theta, gamma) = [[cos t/2, -sin t/2], [e^{i gamma} sin t/2, e^{i gamma} cos t/2]]
struct U {
  Qubit target;
  double theta;
  double gamma;
};

/// Fredkin gate.
struct CSwap {
  Qubit control;
  Qubit target1;
  Qubit target2;
};

/// Prepares an arbitrary state on qubits that are still in |0...0>.
struct AmplitudeInit {
  std::vector<Qubit> qubits;
  std::vector<Complex> amplitudes;
};

}  // namespace gates

using Gate = std::variant<gates::H, gates::X, gates::U, gates::CSwap,
                          gates::AmplitudeInit>;

inline std::vector<Qubit> gate_qubits(const Gate& gate) {
  return std::visit(
      [](const auto& g) -> std::vector<Qubit> {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, gates::CSwap>) {
          return {g.control, g.target1, g.target2};
        } else if constexpr (std::is_same_v<T, gates::AmplitudeInit>) {
          return g.qubits;
        } else {
          return {g.target};
        }
      },
      gate);
}

/// H, X and U; the gates charged with the single-qubit depolarizing weight.
inline bool is_single_qubit_unitary(const Gate& gate) {
  return std::holds_alternative<gates::H>(gate) ||
         std::holds_alternative<gates::X>(gate) ||
         std::holds_alternative<gates::U>(gate);
}

inline bool is_nonlocal(const Gate& gate) {
  if (std::holds_alternative<gates::CSwap>(gate)) return true;
  if (const auto* init = std::get_if<gates::AmplitudeInit>(&gate))
    return init->qubits.size() > 1;
  return false;
}

/// Ordered gate list plus the measured ancilla(s). A plain swap test has a
/// single measured qubit; circuits produced by packing several independent
/// swap tests carry one measured ancilla per test, labelled by `tags`.
struct Circuit {
  std::size_t width = 0;
  std::vector<Gate> gates;
  std::vector<Qubit> measured;
  std::vector<std::string> tags;

  Circuit() = default;
  explicit Circuit(std::size_t w) : width(w) {}

  Circuit& h(Qubit q) { gates.emplace_back(gates::H{q}); return *this; }
  Circuit& x(Qubit q) { gates.emplace_back(gates::X{q}); return *this; }
  Circuit& u(Qubit q, double theta, double gamma) {
    gates.emplace_back(gates::U{q, theta, gamma});
    return *this;
  }
  Circuit& cswap(Qubit c, Qubit t1, Qubit t2) {
    gates.emplace_back(gates::CSwap{c, t1, t2});
    return *this;
  }
  Circuit& init(std::vector<Qubit> qubits, std::vector<Complex> amplitudes) {
    gates.emplace_back(
        gates::AmplitudeInit{std::move(qubits), std::move(amplitudes)});
    return *this;
  }
  Circuit& measure(Qubit q, std::string tag = {}) {
    measured.push_back(q);
    tags.push_back(std::move(tag));
    return *this;
  }
};

/// Checks every structural invariant; throws CircuitError naming the problem.
inline void validate(const Circuit& circuit) {
  if (circuit.width == 0) throw CircuitError("circuit has zero width");
  if (circuit.measured.empty())
    throw CircuitError("circuit has no measured qubit");
  if (!circuit.tags.empty() && circuit.tags.size() != circuit.measured.size())
    throw CircuitError("tag count does not match measured qubit count");
  for (Qubit m : circuit.measured) {
    if (m >= circuit.width)
      throw CircuitError("measured qubit " + std::to_string(m) +
                         " outside circuit width " +
                         std::to_string(circuit.width));
  }
  std::vector<bool> touched(circuit.width, false);
  for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
    const Gate& gate = circuit.gates[i];
    auto qubits = gate_qubits(gate);
    if (qubits.empty())
      throw CircuitError("gate " + std::to_string(i) + " acts on no qubits");
    for (Qubit q : qubits) {
      if (q >= circuit.width)
        throw CircuitError("gate " + std::to_string(i) + " uses qubit " +
                           std::to_string(q) + " outside width " +
                           std::to_string(circuit.width));
    }
    auto sorted = qubits;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw CircuitError("gate " + std::to_string(i) +
                         " repeats a qubit index");
    if (const auto* init = std::get_if<gates::AmplitudeInit>(&gate)) {
      if (init->qubits.size() >= 63 ||
          init->amplitudes.size() != (std::size_t{1} << init->qubits.size()))
        throw CircuitError("gate " + std::to_string(i) +
                           ": amplitude count must be 2^(#qubits)");
      double norm2 = 0.0;
      for (const auto& a : init->amplitudes) norm2 += std::norm(a);
      if (std::abs(std::sqrt(norm2) - 1.0) > 1e-9)
        throw CircuitError("gate " + std::to_string(i) +
                           ": amplitudes are not unit norm");
      for (Qubit q : qubits) {
        if (touched[q])
          throw CircuitError("gate " + std::to_string(i) +
                             ": AmplitudeInit on non-fresh qubit " +
                             std::to_string(q));
      }
    }
    for (Qubit q : qubits) touched[q] = true;
  }
}

/// Dense 2^width amplitude vector, initialised to |0...0>.
class StateVector {
 public:
  explicit StateVector(std::size_t width) : width_(width) {
    if (width == 0 || width > kMaxDenseQubits)
      throw CircuitError("dense simulation supports 1.." +
                         std::to_string(kMaxDenseQubits) + " qubits, got " +
                         std::to_string(width));
    amps_.assign(std::size_t{1} << width, Complex{0.0, 0.0});
    amps_[0] = 1.0;
  }

  std::size_t width() const noexcept { return width_; }
  std::span<const Complex> amplitudes() const noexcept { return amps_; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }

  double norm() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return std::sqrt(s);
  }

  /// Marginal probability that qubit q reads 1.
  double prob_one(Qubit q) const {
    const std::size_t bit = std::size_t{1} << q;
    double p = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i)
      if (i & bit) p += std::norm(amps_[i]);
    return p;
  }

  void apply(const Gate& gate) {
    std::visit([this](const auto& g) { apply_impl(g); }, gate);
  }

 private:
  void apply_1q(Qubit q, Complex m00, Complex m01, Complex m10, Complex m11) {
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (i & bit) continue;
      const Complex a0 = amps_[i];
      const Complex a1 = amps_[i | bit];
      amps_[i] = m00 * a0 + m01 * a1;
      amps_[i | bit] = m10 * a0 + m11 * a1;
    }
  }

  void apply_impl(const gates::H& g) {
    const double r = 1.0 / std::sqrt(2.0);
    apply_1q(g.target, r, r, r, -r);
  }

  void apply_impl(const gates::X& g) {
    const std::size_t bit = std::size_t{1} << g.target;
    for (std::size_t i = 0; i < amps_.size(); ++i)
      if (!(i & bit)) std::swap(amps_[i], amps_[i | bit]);
  }

  void apply_impl(const gates::U& g) {
    const double c = std::cos(g.theta / 2.0);
    const double s = std::sin(g.theta / 2.0);
    const Complex phase = std::polar(1.0, g.gamma);
    apply_1q(g.target, c, -s, phase * s, phase * c);
  }

  void apply_impl(const gates::CSwap& g) {
    const std::size_t c = std::size_t{1} << g.control;
    const std::size_t t1 = std::size_t{1} << g.target1;
    const std::size_t t2 = std::size_t{1} << g.target2;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      // visit each (t1=1,t2=0) <-> (t1=0,t2=1) pair once
      if ((i & c) && (i & t1) && !(i & t2))
        std::swap(amps_[i], amps_[(i & ~t1) | t2]);
    }
  }

  void apply_impl(const gates::AmplitudeInit& g) {
    std::size_t mask = 0;
    for (Qubit q : g.qubits) mask |= std::size_t{1} << q;
    const std::size_t sub = g.amplitudes.size();
    std::vector<std::size_t> offsets(sub, 0);
    for (std::size_t k = 0; k < sub; ++k)
      for (std::size_t j = 0; j < g.qubits.size(); ++j)
        if (k & (std::size_t{1} << j)) offsets[k] |= std::size_t{1} << g.qubits[j];

    std::vector<Complex> next(amps_.size(), Complex{0.0, 0.0});
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (amps_[i] == Complex{0.0, 0.0}) continue;
      if (i & mask)
        throw CircuitError("AmplitudeInit target qubits are not in |0>");
      for (std::size_t k = 0; k < sub; ++k)
        next[i | offsets[k]] = amps_[i] * g.amplitudes[k];
    }
    amps_ = std::move(next);
  }

  std::size_t width_;
  std::vector<Complex> amps_;
};

/// Exact final state of the circuit started from |0...0>.
inline StateVector simulate(const Circuit& circuit) {
  validate(circuit);
  StateVector state(circuit.width);
  for (const auto& gate : circuit.gates) state.apply(gate);
  return state;
}

namespace detail {

/// Union-find over qubits joined by multi-qubit gates.
class QubitComponents {
 public:
  explicit QubitComponents(const Circuit& circuit) : parent_(circuit.width) {
    std::iota(parent_.begin(), parent_.end(), Qubit{0});
    for (const auto& gate : circuit.gates) {
      auto qs = gate_qubits(gate);
      for (std::size_t i = 1; i < qs.size(); ++i) unite(qs[0], qs[i]);
    }
  }

  Qubit find(Qubit q) {
    while (parent_[q] != q) {
      parent_[q] = parent_[parent_[q]];
      q = parent_[q];
    }
    return q;
  }

  /// Gates acting inside the component of `root`, with qubits renumbered
  /// densely in ascending order.
  Circuit extract(const Circuit& circuit, Qubit root, Qubit& local_measured,
                  Qubit measured) {
    std::vector<Qubit> local(circuit.width, circuit.width);
    std::size_t count = 0;
    for (Qubit q = 0; q < circuit.width; ++q)
      if (find(q) == root) local[q] = count++;
    Circuit sub(count);
    for (const auto& gate : circuit.gates) {
      if (find(gate_qubits(gate).front()) != root) continue;
      sub.gates.push_back(std::visit(
          [&](auto g) -> Gate {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, gates::CSwap>) {
              g.control = local[g.control];
              g.target1 = local[g.target1];
              g.target2 = local[g.target2];
            } else if constexpr (std::is_same_v<T, gates::AmplitudeInit>) {
              for (auto& q : g.qubits) q = local[q];
            } else {
              g.target = local[g.target];
            }
            return g;
          },
          gate));
    }
    local_measured = local[measured];
    sub.measure(local_measured);
    return sub;
  }

  /// Number of (single-qubit unitary, CSWAP) gates inside the component.
  std::pair<std::size_t, std::size_t> gate_counts(const Circuit& circuit,
                                                  Qubit root) {
    std::size_t one = 0, cswap = 0;
    for (const auto& gate : circuit.gates) {
      if (find(gate_qubits(gate).front()) != root) continue;
      if (is_single_qubit_unitary(gate)) ++one;
      if (std::holds_alternative<gates::CSwap>(gate)) ++cswap;
    }
    return {one, cswap};
  }

 private:
  void unite(Qubit a, Qubit b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

  std::vector<Qubit> parent_;
};

/// Evaluates Pr(anc = 1) for a circuit of the shape
///   [preparation gates not touching anc] H(anc) CSWAP(anc, ., .)* H(anc)
/// without forming the full register: Pr(1) = (1 - Re<P|S|P>) / 2 where S is
/// the product of the controlled swaps and |P> the prepared state. |P> is a
/// product over preparation components, so <P|S|P> factorizes over groups of
/// components linked by swaps. Returns nullopt when the shape does not match
/// or a linked group is itself too wide.
inline std::optional<double> contract_swap_test(const Circuit& circuit,
                                                Qubit anc) {
  const auto& gs = circuit.gates;
  std::size_t first = gs.size();
  for (std::size_t i = 0; i < gs.size(); ++i) {
    auto qs = gate_qubits(gs[i]);
    if (std::find(qs.begin(), qs.end(), anc) != qs.end()) {
      first = i;
      break;
    }
  }
  if (first + 2 > gs.size()) return std::nullopt;
  auto is_h_on_anc = [&](const Gate& g) {
    const auto* h = std::get_if<gates::H>(&g);
    return h != nullptr && h->target == anc;
  };
  if (!is_h_on_anc(gs[first]) || !is_h_on_anc(gs.back())) return std::nullopt;
  std::vector<std::pair<Qubit, Qubit>> swaps;
  for (std::size_t i = first + 1; i + 1 < gs.size(); ++i) {
    const auto* cs = std::get_if<gates::CSwap>(&gs[i]);
    if (cs == nullptr || cs->control != anc) return std::nullopt;
    swaps.emplace_back(cs->target1, cs->target2);
  }

  Circuit prep(circuit.width);
  prep.gates.assign(gs.begin(), gs.begin() + std::ptrdiff_t(first));
  std::vector<Qubit> parent(circuit.width);
  std::iota(parent.begin(), parent.end(), Qubit{0});
  auto find = [&](Qubit q) {
    while (parent[q] != q) q = parent[q] = parent[parent[q]];
    return q;
  };
  auto unite = [&](Qubit a, Qubit b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  for (const auto& g : prep.gates) {
    auto qs = gate_qubits(g);
    for (std::size_t i = 1; i < qs.size(); ++i) unite(qs[0], qs[i]);
  }
  for (auto [a, b] : swaps) unite(a, b);

  std::vector<bool> done(circuit.width, false);
  Complex overlap{1.0, 0.0};
  for (auto [a, b] : swaps) {
    const Qubit root = find(a);
    if (done[root]) continue;
    done[root] = true;
    std::vector<Qubit> local(circuit.width, circuit.width);
    std::size_t count = 0;
    for (Qubit q = 0; q < circuit.width; ++q)
      if (q != anc && find(q) == root) local[q] = count++;
    if (count > kMaxDenseQubits) return std::nullopt;
    StateVector state(count);
    for (const auto& g : prep.gates) {
      if (find(gate_qubits(g).front()) != root) continue;
      state.apply(std::visit(
          [&](auto gate) -> Gate {
            using T = std::decay_t<decltype(gate)>;
            if constexpr (std::is_same_v<T, gates::CSwap>) {
              gate.control = local[gate.control];
              gate.target1 = local[gate.target1];
              gate.target2 = local[gate.target2];
            } else if constexpr (std::is_same_v<T, gates::AmplitudeInit>) {
              for (auto& q : gate.qubits) q = local[q];
            } else {
              gate.target = local[gate.target];
            }
            return gate;
          },
          g));
    }
    auto amps = state.amplitudes();
    std::vector<Complex> swapped(amps.begin(), amps.end());
    for (auto [t1, t2] : swaps) {
      if (find(t1) != root) continue;
      const std::size_t m1 = std::size_t{1} << local[t1];
      const std::size_t m2 = std::size_t{1} << local[t2];
      for (std::size_t i = 0; i < swapped.size(); ++i)
        if ((i & m1) && !(i & m2)) std::swap(swapped[i], swapped[(i & ~m1) | m2]);
    }
    Complex inner{0.0, 0.0};
    for (std::size_t i = 0; i < swapped.size(); ++i)
      inner += std::conj(amps[i]) * swapped[i];
    overlap *= inner;
  }
  return std::clamp((1.0 - overlap.real()) / 2.0, 0.0, 1.0);
}

}  // namespace detail

/// Exact Pr(measured qubit = 1) for every measured qubit. Qubits that never
/// interact are simulated as separate registers, so a packed circuit costs
/// no more than its blocks.
inline std::vector<double> exact_marginals(const Circuit& circuit) {
  validate(circuit);
  detail::QubitComponents components(circuit);
  std::unordered_map<Qubit, StateVector> states;
  std::vector<double> out;
  out.reserve(circuit.measured.size());
  for (Qubit m : circuit.measured) {
    const Qubit root = components.find(m);
    Qubit local = 0;
    Circuit sub = components.extract(circuit, root, local, m);
    if (sub.width > kContractFromQubits) {
      if (auto p = detail::contract_swap_test(sub, local)) {
        out.push_back(*p);
        continue;
      }
      if (sub.width > kMaxDenseQubits)
        throw CircuitError("interacting register of " +
                           std::to_string(sub.width) +
                           " qubits exceeds the dense simulation limit");
    }
    auto it = states.find(root);
    if (it == states.end()) it = states.emplace(root, simulate(sub)).first;
    out.push_back(std::clamp(it->second.prob_one(local), 0.0, 1.0));
  }
  return out;
}

/// Exact Pr(measured qubit = 1) for a single-ancilla circuit.
inline double exact_prob1(const Circuit& circuit) {
  if (circuit.measured.size() != 1)
    throw CircuitError("exact_prob1 expects exactly one measured qubit");
  return exact_marginals(circuit).front();
}

/// Surrogate device noise. Depolarizing weights are folded analytically into
/// the ancilla marginal; readout flips act on the recorded bit.
struct NoiseModel {
  double p01 = 0.0;  // read 1 when the qubit was 0
  double p10 = 0.0;  // read 0 when the qubit was 1
  double lambda1 = 0.0;
  double lambda2 = 0.0;

  bool is_zero() const noexcept {
    return p01 == 0.0 && p10 == 0.0 && lambda1 == 0.0 && lambda2 == 0.0;
  }

  void validate() const {
    for (double v : {p01, p10, lambda1, lambda2})
      if (!(v >= 0.0 && v <= 1.0))
        throw InvalidArgument("noise parameters must lie in [0, 1]");
  }

  bool operator==(const NoiseModel&) const = default;
};

struct ShotCounts {
  std::uint64_t zeros = 0;
  std::uint64_t ones = 0;
  std::uint64_t shots = 0;

  double frequency_one() const {
    return shots == 0 ? 0.0 : static_cast<double>(ones) / shots;
  }

  bool operator==(const ShotCounts&) const = default;
};

/// Total depolarizing weight 1 - (1-l1)^n1 (1-l2)^n2.
inline double depolarizing_weight(std::size_t single_qubit_gates,
                                  std::size_t cswaps, const NoiseModel& noise) {
  return 1.0 - std::pow(1.0 - noise.lambda1, double(single_qubit_gates)) *
                   std::pow(1.0 - noise.lambda2, double(cswaps));
}

/// Probability of recording a 1 given exact Pr(1) = p and total weight Λ.
inline double noisy_prob1(double p, double weight, const NoiseModel& noise) {
  const double mixed = (1.0 - weight) * p + weight / 2.0;
  return mixed * (1.0 - noise.p10) + (1.0 - mixed) * noise.p01;
}

inline ShotCounts draw_counts(double q, std::uint64_t shots,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::binomial_distribution<std::uint64_t> dist(shots, std::clamp(q, 0.0, 1.0));
  const std::uint64_t ones = dist(rng);
  return {shots - ones, ones, shots};
}

/// Recorded-bit probabilities per measured ancilla under `noise`. Each
/// ancilla is only charged for gates in its own interacting component.
inline std::vector<double> recorded_prob1(const Circuit& circuit,
                                          const NoiseModel& noise) {
  noise.validate();
  auto exact = exact_marginals(circuit);
  detail::QubitComponents components(circuit);
  for (std::size_t i = 0; i < exact.size(); ++i) {
    auto [one, cswap] =
        components.gate_counts(circuit, components.find(circuit.measured[i]));
    exact[i] = noisy_prob1(exact[i], depolarizing_weight(one, cswap, noise),
                           noise);
  }
  return exact;
}

/// Shot counts for every measured ancilla. Ancilla i uses the child seed
/// derive_seed(seed, i).
inline std::vector<ShotCounts> sample_all(const Circuit& circuit,
                                          std::uint64_t shots,
                                          const NoiseModel& noise,
                                          std::uint64_t seed) {
  if (shots == 0) throw InvalidArgument("shots must be at least 1");
  auto q = recorded_prob1(circuit, noise);
  std::vector<ShotCounts> out;
  out.reserve(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    out.push_back(draw_counts(q[i], shots, derive_seed(seed, i)));
  return out;
}

inline ShotCounts sample(const Circuit& circuit, std::uint64_t shots,
                         const NoiseModel& noise, std::uint64_t seed) {
  if (circuit.measured.size() != 1)
    throw CircuitError("sample expects exactly one measured qubit");
  return sample_all(circuit, shots, noise, seed).front();
}

class SingularCalibration : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Inverts the 2x2 readout assignment matrix on the observed frequency.
inline double mitigate_readout(double observed_one, double p01, double p10) {
  if (!(p01 >= 0.0 && p10 >= 0.0 && p01 <= 1.0 && p10 <= 1.0))
    throw InvalidArgument("readout error probabilities must lie in [0, 1]");
  if (p01 + p10 >= 1.0)
    throw SingularCalibration("readout calibration is singular (p01 + p10 >= 1)");
  return std::clamp((observed_one - p01) / (1.0 - p01 - p10), 0.0, 1.0);
}

inline double mitigate_readout(const ShotCounts& counts, double p01,
                               double p10) {
  if (counts.shots == 0) throw InvalidArgument("no shots to mitigate");
  return mitigate_readout(counts.frequency_one(), p01, p10);
}

struct ResourceStats {
  std::size_t width = 0;
  std::size_t depth = 0;
  std::size_t nonlocal = 0;
  std::size_t gates = 0;

  bool operator==(const ResourceStats&) const = default;
};

/// Greedy layering: each gate enters the earliest layer in which all of its
/// qubits are free.
inline ResourceStats resources(const Circuit& circuit) {
  validate(circuit);
  std::vector<std::size_t> frontier(circuit.width, 0);
  ResourceStats stats{circuit.width, 0, 0, circuit.gates.size()};
  for (const auto& gate : circuit.gates) {
    const auto qs = gate_qubits(gate);
    std::size_t layer = 0;
    for (Qubit q : qs) layer = std::max(layer, frontier[q]);
    ++layer;
    for (Qubit q : qs) frontier[q] = layer;
    stats.depth = std::max(stats.depth, layer);
    if (is_nonlocal(gate)) ++stats.nonlocal;
  }
  return stats;
}

}  // namespace qkmeans::qsim
