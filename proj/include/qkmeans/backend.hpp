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

// Emulated cloud execution service. A BackendProfile describes a device and
// its submission limits; jobs are sampled on the internal simulator.
//
// Circuit i of a job is sampled with seed derive_seed(job_seed, i), so the
// batched path, the one-request-per-circuit path and any thread count give
// bit-identical results.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qkmeans/common.hpp"
#include "qkmeans/qsim.hpp"

namespace qkmeans::backend {

using qsim::Circuit;
using qsim::NoiseModel;
using qsim::ShotCounts;

struct BackendProfile {
  std::string name;
  std::size_t qubits = 0;
  std::uint64_t max_shots = 0;
  std::size_t max_circuits_per_job = 0;
  NoiseModel noise;
  double queue_delay = 0.0;  // simulated seconds per request

  void validate() const {
    if (qubits < 3)
      throw InvalidArgument("profile '" + name + "' needs at least 3 qubits");
    if (max_shots < 1)
      throw InvalidArgument("profile '" + name + "' needs max_shots >= 1");
    if (max_circuits_per_job < 1)
      throw InvalidArgument("profile '" + name +
                            "' needs max_circuits_per_job >= 1");
    if (!(queue_delay >= 0.0))
      throw InvalidArgument("profile '" + name + "' has negative queue_delay");
    noise.validate();
  }
};

/// A submission violated one of the profile's limits.
class BackendError : public Error {
 public:
  BackendError(std::string limit, std::uint64_t allowed,
               std::uint64_t requested, const std::string& profile)
      : Error(limit),
        message_(limit + " exceeded on '" + profile + "': requested " +
                 std::to_string(requested) + ", limit " +
                 std::to_string(allowed)),
        limit_(std::move(limit)),
        allowed_(allowed),
        requested_(requested) {}

  const char* what() const noexcept override { return message_.c_str(); }

  /// Prefixes the message, e.g. with the clustering iteration.
  void add_context(const std::string& context) {
    message_ = context + ": " + message_;
  }

  const std::string& limit() const noexcept { return limit_; }
  std::uint64_t allowed() const noexcept { return allowed_; }
  std::uint64_t requested() const noexcept { return requested_; }

 private:
  std::string message_;
  std::string limit_;
  std::uint64_t allowed_;
  std::uint64_t requested_;
};

class TooManyCircuits : public BackendError {
 public:
  TooManyCircuits(std::uint64_t allowed, std::uint64_t requested,
                  const std::string& profile)
      : BackendError("max_circuits_per_job", allowed, requested, profile) {}
};

class TooManyShots : public BackendError {
 public:
  TooManyShots(std::uint64_t allowed, std::uint64_t requested,
               const std::string& profile)
      : BackendError("max_shots", allowed, requested, profile) {}
};

class CircuitTooWide : public BackendError {
 public:
  CircuitTooWide(std::uint64_t allowed, std::uint64_t requested,
                 const std::string& profile)
      : BackendError("qubits", allowed, requested, profile) {}
};

struct JobResult {
  /// counts[i][j]: measured ancilla j of circuit i.
  std::vector<std::vector<ShotCounts>> counts;
  std::vector<std::vector<std::string>> tags;
  std::uint64_t shots = 0;
  std::string profile;
  std::size_t requests = 0;
  double queue_seconds = 0.0;  // simulated
  double wall_seconds = 0.0;
};

struct SubmitOptions {
  bool sleep_on_queue = false;
  std::size_t threads = 0;  // 0: hardware concurrency
};

namespace detail {

inline void check_circuit_limits(std::span<const Circuit> circuits,
                                 std::uint64_t shots,
                                 const BackendProfile& profile) {
  if (shots == 0) throw InvalidArgument("shots must be at least 1");
  if (shots > profile.max_shots)
    throw TooManyShots(profile.max_shots, shots, profile.name);
  for (const auto& c : circuits)
    if (c.width > profile.qubits)
      throw CircuitTooWide(profile.qubits, c.width, profile.name);
}

inline std::size_t thread_count(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, jobs));
}

/// Runs body(i) for i in [0, n) on `threads` workers pulling indices from a
/// shared counter. The first exception is rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t n, std::size_t threads, Body&& body) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

inline JobResult run_circuits(std::span<const Circuit> circuits,
                              std::uint64_t shots,
                              const BackendProfile& profile,
                              std::uint64_t seed, std::uint64_t first_index,
                              std::size_t threads) {
  JobResult result;
  result.shots = shots;
  result.profile = profile.name;
  result.counts.resize(circuits.size());
  result.tags.reserve(circuits.size());
  for (const auto& c : circuits) result.tags.push_back(c.tags);
  parallel_for(circuits.size(), threads, [&](std::size_t i) {
    result.counts[i] = qsim::sample_all(circuits[i], shots, profile.noise,
                                        derive_seed(seed, first_index + i));
  });
  return result;
}

inline void simulate_queue(double seconds, const SubmitOptions& options) {
  if (options.sleep_on_queue && seconds > 0.0)
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

}  // namespace detail

/// Sends all circuits as one job. `first_index` offsets the per-circuit seed
/// index so that a long circuit stream split over several jobs samples the
/// same as the stream submitted whole.
inline JobResult submit_batch(std::span<const Circuit> circuits,
                              std::uint64_t shots,
                              const BackendProfile& profile,
                              std::uint64_t seed,
                              const SubmitOptions& options = {},
                              std::uint64_t first_index = 0) {
  const auto start = std::chrono::steady_clock::now();
  if (circuits.size() > profile.max_circuits_per_job)
    throw TooManyCircuits(profile.max_circuits_per_job, circuits.size(),
                          profile.name);
  detail::check_circuit_limits(circuits, shots, profile);
  detail::simulate_queue(profile.queue_delay, options);
  auto result = detail::run_circuits(
      circuits, shots, profile, seed, first_index,
      detail::thread_count(options.threads, circuits.size()));
  result.requests = 1;
  result.queue_seconds = profile.queue_delay;
  result.wall_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  return result;
}

/// One request per circuit, `workers` requests in flight. Results come back
/// in circuit order regardless of completion order.
inline JobResult submit_parallel(std::span<const Circuit> circuits,
                                 std::uint64_t shots,
                                 const BackendProfile& profile,
                                 std::size_t workers, std::uint64_t seed,
                                 const SubmitOptions& options = {},
                                 std::uint64_t first_index = 0) {
  const auto start = std::chrono::steady_clock::now();
  if (workers < 1) throw InvalidArgument("workers must be at least 1");
  detail::check_circuit_limits(circuits, shots, profile);
  JobResult result;
  result.shots = shots;
  result.profile = profile.name;
  result.counts.resize(circuits.size());
  result.tags.reserve(circuits.size());
  for (const auto& c : circuits) result.tags.push_back(c.tags);
  detail::parallel_for(
      circuits.size(), std::min(workers, circuits.size()), [&](std::size_t i) {
        detail::simulate_queue(profile.queue_delay, options);
        result.counts[i] =
            qsim::sample_all(circuits[i], shots, profile.noise,
                             derive_seed(seed, first_index + i));
      });
  result.requests = circuits.size();
  const auto rounds = (circuits.size() + workers - 1) / workers;
  result.queue_seconds = profile.queue_delay * double(rounds);
  result.wall_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  return result;
}

/// Submission strategy used by the estimators: the batched path when
/// `workers` is 0, otherwise one request per circuit with that many workers.
/// Streams longer than max_circuits_per_job are split into sequential
/// maximal batches.
struct Executor {
  BackendProfile profile;
  std::size_t workers = 0;
  SubmitOptions options;

  Executor(BackendProfile p, std::size_t w = 0, SubmitOptions o = {})
      : profile(std::move(p)), workers(w), options(o) {}

  JobResult run(std::span<const Circuit> circuits, std::uint64_t shots,
                std::uint64_t seed) const {
    if (workers > 0)
      return submit_parallel(circuits, shots, profile, workers, seed, options);
    JobResult merged;
    merged.shots = shots;
    merged.profile = profile.name;
    for (std::size_t off = 0; off < circuits.size();
         off += profile.max_circuits_per_job) {
      const auto n =
          std::min(profile.max_circuits_per_job, circuits.size() - off);
      auto part = submit_batch(circuits.subspan(off, n), shots, profile, seed,
                               options, off);
      for (auto& c : part.counts) merged.counts.push_back(std::move(c));
      for (auto& t : part.tags) merged.tags.push_back(std::move(t));
      merged.requests += part.requests;
      merged.queue_seconds += part.queue_seconds;
      merged.wall_seconds += part.wall_seconds;
    }
    return merged;
  }
};

/// Built-in device profiles. Noise defaults are illustrative surrogates.
inline std::vector<BackendProfile> builtin_profiles() {
  return {
      {"ideal", 32, 1'000'000'000ULL, 1'000'000, NoiseModel{}, 0.0},
      // readout ~2-4%, light 1q depolarizing, heavier Fredkin noise
      {"cap8192", 27, 8192, 900, NoiseModel{0.02, 0.04, 0.001, 0.03}, 5.0},
      {"seven-qubit", 7, 32000, 900, NoiseModel{0.015, 0.03, 0.0005, 0.02},
       3.0},
  };
}

/// Reads profiles from an INI file; one section per profile:
///
///   [name]
///   qubits = 27
///   max_shots = 8192
///   max_circuits_per_job = 900
///   p01 = 0.02
///   p10 = 0.04
///   lambda1 = 0.001
///   lambda2 = 0.03
///   queue_delay = 5
///
/// Missing noise keys and queue_delay default to 0.
inline std::vector<BackendProfile> parse_profiles(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ptree_error& e) {
    throw InvalidArgument(std::string("malformed profile file: ") + e.what());
  }
  std::vector<BackendProfile> out;
  for (const auto& [name, section] : tree) {
    if (section.empty())
      throw InvalidArgument("profile file: key '" + name +
                            "' outside of a [section]");
    try {
      BackendProfile p;
      p.name = name;
      p.qubits = section.get<std::size_t>("qubits");
      p.max_shots = section.get<std::uint64_t>("max_shots");
      p.max_circuits_per_job = section.get<std::size_t>("max_circuits_per_job");
      p.noise.p01 = section.get("p01", 0.0);
      p.noise.p10 = section.get("p10", 0.0);
      p.noise.lambda1 = section.get("lambda1", 0.0);
      p.noise.lambda2 = section.get("lambda2", 0.0);
      p.queue_delay = section.get("queue_delay", 0.0);
      p.validate();
      out.push_back(std::move(p));
    } catch (const pt::ptree_error& e) {
      throw InvalidArgument("profile '" + name + "': " + e.what());
    }
  }
  return out;
}

inline std::vector<BackendProfile> load_profiles(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open profile file '" + path + "'");
  return parse_profiles(in);
}

/// Looks `name` up in `extra` first, then among the built-ins.
inline BackendProfile find_profile(const std::string& name,
                                   std::span<const BackendProfile> extra = {}) {
  for (const auto& p : extra)
    if (p.name == name) return p;
  for (const auto& p : builtin_profiles())
    if (p.name == name) return p;
  throw InvalidArgument("unknown backend profile '" + name + "'");
}

}  // namespace qkmeans::backend
