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

#include "qkmeans/backend.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "qkmeans/dist.hpp"

using namespace qkmeans;
using namespace qkmeans::backend;

namespace {

std::vector<Circuit> tagged_circuits(std::size_t n) {
  std::vector<Circuit> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto c = dist::build_swap_test(
        {{1.0 + double(i % 7), 0.5}, {2.0, double(i % 5)}}, embed::Embedding::angle);
    c.tags = {"circuit-" + std::to_string(i)};
    out.push_back(std::move(c));
  }
  return out;
}

BackendProfile small_profile() {
  return {"test", 5, 100, 10, qsim::NoiseModel{0.01, 0.02, 0.001, 0.01}, 0.0};
}

}  // namespace

TEST(backend, builtin_profiles) {
  const auto ideal = find_profile("ideal");
  EXPECT_TRUE(ideal.noise.is_zero());
  EXPECT_EQ(ideal.qubits, 32u);
  EXPECT_EQ(ideal.max_shots, 1'000'000'000u);
  EXPECT_EQ(find_profile("cap8192").max_shots, 8192u);
  EXPECT_EQ(find_profile("cap8192").qubits, 27u);
  EXPECT_EQ(find_profile("seven-qubit").qubits, 7u);
  EXPECT_EQ(find_profile("seven-qubit").max_shots, 32000u);
  for (const auto& p : builtin_profiles()) EXPECT_NO_THROW(p.validate());
  EXPECT_THROW(find_profile("nonexistent"), InvalidArgument);
}

TEST(backend, circuit_limit_boundary) {
  const auto profile = find_profile("cap8192");
  const auto circuits = tagged_circuits(901);
  EXPECT_NO_THROW(submit_batch(std::span(circuits).first(900), 10, profile, 0));
  try {
    submit_batch(circuits, 10, profile, 0);
    FAIL() << "expected TooManyCircuits";
  } catch (const TooManyCircuits& e) {
    EXPECT_EQ(e.limit(), "max_circuits_per_job");
    EXPECT_EQ(e.allowed(), 900u);
    EXPECT_EQ(e.requested(), 901u);
    EXPECT_NE(std::string(e.what()).find("max_circuits_per_job"), std::string::npos);
  }
  EXPECT_NO_THROW(submit_parallel(circuits, 10, profile, 4, 0));
}

TEST(backend, shot_limit_boundary) {
  const auto profile = find_profile("cap8192");
  const auto circuits = tagged_circuits(2);
  EXPECT_NO_THROW(submit_batch(circuits, 8192, profile, 0));
  EXPECT_THROW(submit_batch(circuits, 8193, profile, 0), TooManyShots);
  EXPECT_THROW(submit_batch(circuits, 12000, profile, 0), TooManyShots);
  EXPECT_THROW(submit_parallel(circuits, 12000, profile, 2, 0), TooManyShots);
}

TEST(backend, width_limit_boundary) {
  auto profile = small_profile();
  std::vector<Circuit> fits{dist::build_swap_test({{1, 2, 3, 4}, {4, 3, 2, 1}},
                                                  embed::Embedding::angle)};
  ASSERT_EQ(fits[0].width, 5u);
  EXPECT_NO_THROW(submit_batch(fits, 10, profile, 0));
  profile.qubits = 4;
  EXPECT_THROW(submit_batch(fits, 10, profile, 0), CircuitTooWide);
  EXPECT_THROW(submit_parallel(fits, 10, profile, 1, 0), CircuitTooWide);
}

TEST(backend, limits_property_at_boundaries) {
  for (std::size_t limit = 1; limit <= 12; ++limit) {
    auto profile = small_profile();
    profile.max_circuits_per_job = limit;
    profile.max_shots = 10 * limit;
    const auto circuits = tagged_circuits(limit + 1);
    const auto at = std::span(circuits).first(limit);
    if (limit > 1) {
      EXPECT_NO_THROW(submit_batch(std::span(circuits).first(limit - 1), 1, profile, 0));
    }
    EXPECT_NO_THROW(submit_batch(at, profile.max_shots, profile, 0));
    EXPECT_THROW(submit_batch(circuits, 1, profile, 0), TooManyCircuits);
    EXPECT_THROW(submit_batch(at, profile.max_shots + 1, profile, 0), TooManyShots);
    EXPECT_NO_THROW(submit_batch(at, profile.max_shots - 1, profile, 0));
  }
}

TEST(backend, results_keep_submission_order) {
  const auto circuits = tagged_circuits(37);
  const auto profile = small_profile();
  for (auto result : {submit_batch(std::span(circuits).first(10), 50, profile, 3),
                      submit_parallel(circuits, 50, profile, 8, 3)}) {
    ASSERT_EQ(result.counts.size(), result.tags.size());
    for (std::size_t i = 0; i < result.tags.size(); ++i) {
      EXPECT_EQ(result.tags[i], circuits[i].tags);
      ASSERT_EQ(result.counts[i].size(), 1u);
      EXPECT_EQ(result.counts[i][0].shots, 50u);
      EXPECT_EQ(result.counts[i][0].zeros + result.counts[i][0].ones, 50u);
      // circuit i sampled with derive_seed(job seed, i)
      EXPECT_EQ(result.counts[i][0],
                qsim::sample_all(circuits[i], 50, profile.noise, derive_seed(3, i))[0]);
    }
  }
}

TEST(backend, batch_and_parallel_paths_agree) {
  const auto circuits = tagged_circuits(10);
  const auto profile = small_profile();
  const auto batch = submit_batch(circuits, 100, profile, 11);
  for (std::size_t workers : {1u, 2u, 3u, 8u, 32u}) {
    const auto par = submit_parallel(circuits, 100, profile, workers, 11);
    EXPECT_EQ(par.counts, batch.counts) << workers;
  }
  SubmitOptions one_thread;
  one_thread.threads = 1;
  EXPECT_EQ(submit_batch(circuits, 100, profile, 11, one_thread).counts, batch.counts);
  EXPECT_NE(submit_batch(circuits, 100, profile, 12).counts, batch.counts);
}

TEST(backend, parallel_with_more_workers_than_circuits) {
  const auto circuits = tagged_circuits(4);
  const auto result = submit_parallel(circuits, 20, small_profile(), 8, 0);
  EXPECT_EQ(result.counts.size(), 4u);
  EXPECT_EQ(result.requests, 4u);
  EXPECT_THROW(submit_parallel(circuits, 20, small_profile(), 0, 0), InvalidArgument);
}

TEST(backend, executor_splits_long_streams_without_changing_results) {
  const auto circuits = tagged_circuits(25);
  auto profile = small_profile();
  profile.max_circuits_per_job = 1000;
  const auto whole = submit_batch(circuits, 64, profile, 5);
  profile.max_circuits_per_job = 10;
  Executor split{profile};
  const auto merged = split.run(circuits, 64, 5);
  EXPECT_EQ(merged.requests, 3u);
  EXPECT_EQ(merged.counts, whole.counts);
  Executor parallel{profile, 4};
  EXPECT_EQ(parallel.run(circuits, 64, 5).counts, whole.counts);
}

TEST(backend, queue_delay_recorded_not_slept) {
  auto profile = small_profile();
  profile.queue_delay = 30.0;
  const auto circuits = tagged_circuits(6);
  const auto batch = submit_batch(circuits, 10, profile, 0);
  EXPECT_DOUBLE_EQ(batch.queue_seconds, 30.0);
  EXPECT_LT(batch.wall_seconds, 5.0);
  const auto par = submit_parallel(circuits, 10, profile, 4, 0);
  EXPECT_DOUBLE_EQ(par.queue_seconds, 60.0);  // two rounds of four
}

TEST(backend, profile_file_round_trip) {
  std::istringstream in(R"(
; emulated devices
[small]
qubits = 7
max_shots = 32000
max_circuits_per_job = 300
p01 = 0.01
p10 = 0.02
lambda1 = 0.001
lambda2 = 0.05
queue_delay = 2.5

[bare]
qubits = 5
max_shots = 10
max_circuits_per_job = 1
)");
  const auto profiles = parse_profiles(in);
  ASSERT_EQ(profiles.size(), 2u);
  EXPECT_EQ(profiles[0].name, "small");
  EXPECT_EQ(profiles[0].qubits, 7u);
  EXPECT_EQ(profiles[0].max_circuits_per_job, 300u);
  EXPECT_DOUBLE_EQ(profiles[0].noise.lambda2, 0.05);
  EXPECT_DOUBLE_EQ(profiles[0].queue_delay, 2.5);
  EXPECT_TRUE(profiles[1].noise.is_zero());
  EXPECT_EQ(find_profile("small", profiles).max_shots, 32000u);

  std::istringstream missing("[x]\nqubits = 5\n");
  EXPECT_THROW(parse_profiles(missing), InvalidArgument);
  std::istringstream bad_noise("[x]\nqubits=5\nmax_shots=1\nmax_circuits_per_job=1\np01=2\n");
  EXPECT_THROW(parse_profiles(bad_noise), InvalidArgument);
  std::istringstream too_small("[x]\nqubits=2\nmax_shots=1\nmax_circuits_per_job=1\n");
  EXPECT_THROW(parse_profiles(too_small), InvalidArgument);
}
