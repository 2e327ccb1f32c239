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

// Swap-test distance estimation.
//
// Amplitude embedding recovers the squared Euclidean distance
// |a-b|^2 = 4 Z (Pr(0) - 1/2); angle embedding yields the metric
// d = sqrt(Z Pr(1)). The subspace estimator splits both vectors into
// fixed-size blocks, estimates each block with its own small swap test and
// sums the block distances.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qkmeans/backend.hpp"
#include "qkmeans/common.hpp"
#include "qkmeans/embed.hpp"
#include "qkmeans/qsim.hpp"

namespace qkmeans::dist {

using embed::Embedding;
using embed::VectorPair;
using qsim::Circuit;

enum class Mode { analytic, sampled };

inline std::string_view to_string(Mode m) {
  return m == Mode::analytic ? "analytic" : "sampled";
}

inline Mode parse_mode(std::string_view s) {
  if (s == "analytic") return Mode::analytic;
  if (s == "sampled") return Mode::sampled;
  throw InvalidArgument("unknown estimator mode '" + std::string(s) +
                        "' (expected analytic or sampled)");
}

struct DistanceEstimate {
  double distance = 0.0;
  double sq_distance = 0.0;
  double p0 = 1.0;
  double p1 = 0.0;
  double z = 0.0;
  std::uint64_t shots = 0;        // 0 in analytic mode
  std::size_t repetitions = 1;
  std::size_t circuits = 0;       // swap tests evaluated
};

struct EstimatorConfig {
  Embedding embedding = Embedding::amplitude;
  Mode mode = Mode::analytic;
  std::uint64_t shots = 8192;
  std::size_t repetitions = 1;
  /// Block length for the subspace estimator; nullopt uses the whole vector.
  std::optional<std::size_t> block_size;
  /// Replaces the backend profile's device noise when set.
  std::optional<qsim::NoiseModel> noise;
  /// Invert the readout confusion matrix before recovering distances.
  bool mitigate = false;
  /// Place independent block swap tests side by side on the device.
  bool pack = false;

  void validate() const {
    if (repetitions < 1) throw InvalidArgument("repetitions must be >= 1");
    if (mode == Mode::sampled && shots < 1)
      throw InvalidArgument("shots must be >= 1 in sampled mode");
    if (block_size && (*block_size == 0 || *block_size % 2 != 0))
      throw InvalidArgument("block size must be a positive even number");
    if (noise) noise->validate();
  }
};

/// Swap-test circuit for one pair.
///
/// amplitude: qubits [0, m] hold psi (qubit m is the index qubit), qubit m+1
/// holds phi, qubit m+2 is the ancilla; a single Fredkin gate swaps the index
/// qubit with phi.
/// angle: qubits [0, h) hold a, [h, 2h) hold b, qubit 2h is the ancilla; one
/// Fredkin gate per qubit pair (i, h+i).
inline Circuit build_swap_test(const VectorPair& pair, Embedding embedding) {
  if (embedding == Embedding::amplitude) {
    auto states = embed::amplitude_pair_states(pair);
    const std::size_t m = states.data_qubits;
    Circuit c(m + 3);
    std::vector<qsim::Qubit> psi_qubits(m + 1);
    for (std::size_t i = 0; i <= m; ++i) psi_qubits[i] = i;
    c.init(std::move(psi_qubits), std::move(states.psi));
    c.init({m + 1}, std::move(states.phi));
    c.h(m + 2);
    c.cswap(m + 2, m, m + 1);
    c.h(m + 2);
    c.measure(m + 2);
    return c;
  }
  const auto params = embed::angle_product_params(pair);
  const std::size_t h = params.a.size();
  Circuit c(2 * h + 1);
  for (std::size_t i = 0; i < h; ++i)
    c.u(i, params.a[i].first, params.a[i].second);
  for (std::size_t i = 0; i < h; ++i)
    c.u(h + i, params.b[i].first, params.b[i].second);
  c.h(2 * h);
  for (std::size_t i = 0; i < h; ++i) c.cswap(2 * h, i, h + i);
  c.h(2 * h);
  c.measure(2 * h);
  return c;
}

/// max(0, 4 Z (p0 - 1/2)); noise can push p0 below 1/2.
/// Probability excesses below this are treated as exact zeros. Simulation
/// roundoff sits far below it and no shot count reaches it.
inline constexpr double kProbabilityFloor = 1e-12;

inline double amp_sq_distance(double p0, double z) {
  if (!(z > 0.0)) throw InvalidArgument("Z must be positive");
  const double excess = p0 - 0.5;
  return excess < kProbabilityFloor ? 0.0 : 4.0 * z * excess;
}

inline double angle_distance(double p1, double z) {
  if (!(z > 0.0)) throw InvalidArgument("Z must be positive");
  return p1 < kProbabilityFloor ? 0.0 : std::sqrt(z * p1);
}

/// Places consecutive circuits on disjoint qubit ranges, as many per packed
/// circuit as fit on the device. Measured ancillas and their tags keep the
/// input order, so flattening the packed results restores the block order.
inline std::vector<Circuit> pack_blocks(std::span<const Circuit> blocks,
                                        const backend::BackendProfile& profile) {
  std::size_t width = 0;
  for (const auto& b : blocks) {
    if (b.measured.size() != 1)
      throw InvalidArgument("pack_blocks expects single-ancilla circuits");
    width = std::max(width, b.width);
  }
  if (width > profile.qubits)
    throw backend::CircuitTooWide(profile.qubits, width, profile.name);
  const std::size_t per = blocks.empty() ? 1 : profile.qubits / width;
  std::vector<Circuit> out;
  for (std::size_t start = 0; start < blocks.size(); start += per) {
    const std::size_t end = std::min(blocks.size(), start + per);
    if (end - start == 1) {
      out.push_back(blocks[start]);
      continue;
    }
    Circuit packed;
    for (std::size_t i = start; i < end; ++i) {
      const auto& b = blocks[i];
      const std::size_t off = packed.width;
      for (auto gate : b.gates) {
        std::visit(
            [off](auto& g) {
              using T = std::decay_t<decltype(g)>;
              if constexpr (std::is_same_v<T, qsim::gates::CSwap>) {
                g.control += off;
                g.target1 += off;
                g.target2 += off;
              } else if constexpr (std::is_same_v<T,
                                                  qsim::gates::AmplitudeInit>) {
                for (auto& q : g.qubits) q += off;
              } else {
                g.target += off;
              }
            },
            gate);
        packed.gates.push_back(std::move(gate));
      }
      packed.measure(b.measured.front() + off,
                     b.tags.empty() ? std::string{} : b.tags.front());
      packed.width += b.width;
    }
    out.push_back(std::move(packed));
  }
  return out;
}

namespace detail {

struct Block {
  std::size_t pair = 0;
  double z = 0.0;
  Circuit circuit;
};

/// Splits a pair into blocks (or one whole-vector block); degenerate blocks
/// where both projections vanish are dropped.
inline std::vector<Block> plan_blocks(const VectorPair& pair, std::size_t index,
                                      const EstimatorConfig& cfg) {
  std::vector<Block> out;
  if (!cfg.block_size) {
    VectorPair whole = pair;
    const double z =
        embed::squared_norm(pair.a) + embed::squared_norm(pair.b);
    out.push_back({index, z, build_swap_test(whole, cfg.embedding)});
    return out;
  }
  const std::size_t bs = *cfg.block_size;
  const std::size_t n = pair.dim();
  for (std::size_t start = 0; start < n; start += bs) {
    Point a(bs, 0.0), b(bs, 0.0);
    for (std::size_t j = 0; j < bs && start + j < n; ++j) {
      a[j] = pair.a[start + j];
      b[j] = pair.b[start + j];
    }
    const double z = embed::squared_norm(a) + embed::squared_norm(b);
    if (z == 0.0) continue;
    out.push_back({index, z, build_swap_test(VectorPair(a, b), cfg.embedding)});
  }
  return out;
}

/// Per-block value averaged over repetitions: squared distance for the
/// amplitude estimator, distance for angle.
inline double recover(double p1, double z, Embedding e) {
  return e == Embedding::amplitude ? amp_sq_distance(1.0 - p1, z)
                                   : angle_distance(p1, z);
}

}  // namespace detail

/// Estimates every pair under `cfg`. Sampled mode submits all swap tests of
/// all pairs (times repetitions) as one circuit stream through `executor`.
inline std::vector<DistanceEstimate> estimate_many(
    std::span<const VectorPair> pairs, const EstimatorConfig& cfg,
    const backend::Executor& executor, std::uint64_t seed) {
  cfg.validate();
  const std::size_t reps = cfg.mode == Mode::analytic ? 1 : cfg.repetitions;

  std::vector<detail::Block> blocks;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto bs = detail::plan_blocks(pairs[i], i, cfg);
    for (auto& b : bs) blocks.push_back(std::move(b));
  }

  std::vector<Circuit> units;
  units.reserve(blocks.size() * reps);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t r = 0; r < reps; ++r) {
      Circuit c = blocks[b].circuit;
      c.tags = {"pair=" + std::to_string(blocks[b].pair) +
                ";block=" + std::to_string(b) + ";rep=" + std::to_string(r)};
      units.push_back(std::move(c));
    }
  }

  auto device = executor;
  if (cfg.noise) device.profile.noise = *cfg.noise;
  const std::vector<Circuit> submitted =
      cfg.pack ? pack_blocks(units, device.profile) : units;

  std::vector<double> p1;
  p1.reserve(units.size());
  if (cfg.mode == Mode::analytic) {
    for (const auto& c : submitted)
      for (double p : qsim::exact_marginals(c)) p1.push_back(p);
  } else {
    const auto job = device.run(submitted, cfg.shots, seed);
    const auto& noise = device.profile.noise;
    for (const auto& per_circuit : job.counts)
      for (const auto& counts : per_circuit)
        p1.push_back(cfg.mitigate
                         ? qsim::mitigate_readout(counts, noise.p01, noise.p10)
                         : counts.frequency_one());
  }

  std::vector<DistanceEstimate> out(pairs.size());
  std::vector<double> p1_sum(pairs.size(), 0.0);
  std::vector<std::size_t> unit_count(pairs.size(), 0);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out[i].z = embed::squared_norm(pairs[i].a) + embed::squared_norm(pairs[i].b);
    out[i].shots = cfg.mode == Mode::analytic ? 0 : cfg.shots;
    out[i].repetitions = reps;
    if (!cfg.block_size && !(out[i].z > 0.0))
      throw InvalidArgument("both vectors are zero (Z = 0)");
  }
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& block = blocks[b];
    double mean = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const double p = p1[b * reps + r];
      mean += detail::recover(p, block.z, cfg.embedding);
      p1_sum[block.pair] += p;
      ++unit_count[block.pair];
    }
    mean /= double(reps);
    auto& est = out[block.pair];
    est.circuits += reps;
    if (!cfg.block_size) {
      if (cfg.embedding == Embedding::amplitude) {
        est.sq_distance = mean;
        est.distance = std::sqrt(mean);
      } else {
        est.distance = mean;
        est.sq_distance = mean * mean;
      }
    } else {
      est.distance += cfg.embedding == Embedding::amplitude ? std::sqrt(mean)
                                                            : mean;
    }
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto& est = out[i];
    if (cfg.block_size) est.sq_distance = est.distance * est.distance;
    est.p1 = unit_count[i] ? p1_sum[i] / double(unit_count[i]) : 0.0;
    est.p0 = 1.0 - est.p1;
  }
  return out;
}

/// Whole-vector swap-test estimate (any block_size in cfg is ignored).
inline DistanceEstimate estimate(const VectorPair& pair, EstimatorConfig cfg,
                                 const backend::Executor& executor,
                                 std::uint64_t seed) {
  cfg.block_size.reset();
  return estimate_many(std::span(&pair, 1), cfg, executor, seed).front();
}

/// Sum of block distances; block_size defaults to 2.
inline DistanceEstimate subspace_distance(const VectorPair& pair,
                                          EstimatorConfig cfg,
                                          const backend::Executor& executor,
                                          std::uint64_t seed) {
  if (!cfg.block_size) cfg.block_size = 2;
  return estimate_many(std::span(&pair, 1), cfg, executor, seed).front();
}

}  // namespace qkmeans::dist
