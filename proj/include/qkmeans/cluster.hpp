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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qkmeans/backend.hpp"
#include "qkmeans/common.hpp"
#include "qkmeans/dist.hpp"
#include "qkmeans/embed.hpp"

namespace qkmeans::cluster {

using DistanceMatrix = std::vector<std::vector<double>>;

class InfeasibleSeparation : public Error {
 public:
  using Error::Error;
};

class NoSeedFound : public Error {
 public:
  using Error::Error;
};

struct ClusterConfig {
  std::size_t k = 2;
  double epsilon = 0.0;  // minimum separation of initial centroids
  std::size_t max_iterations = 10;
  double convergence_tol = 1e-4;
  dist::EstimatorConfig estimator;
  std::uint64_t seed = 0;

  void validate() const {
    if (k < 1) throw InvalidArgument("k must be at least 1");
    if (!(epsilon >= 0.0)) throw InvalidArgument("epsilon must be >= 0");
    if (max_iterations < 1)
      throw InvalidArgument("max_iterations must be at least 1");
    if (!(convergence_tol > 0.0))
      throw InvalidArgument("convergence_tol must be positive");
    estimator.validate();
  }
};

struct ClusteringRun {
  Labels labels;
  Points centroids;
  std::size_t iterations = 0;
  std::vector<Points> history;  // centroids after each iteration
  bool converged = false;
  std::vector<std::size_t> circuits_per_iteration;  // quantum runs only
};

inline void check_data(const Points& data) {
  if (data.empty()) throw InvalidArgument("dataset is empty");
  const std::size_t d = data.front().size();
  if (d == 0) throw InvalidArgument("dataset has zero-dimensional points");
  for (const auto& p : data)
    if (p.size() != d) throw InvalidArgument("dataset has ragged points");
}

/// k distinct data points drawn uniformly; a draw closer than epsilon to an
/// accepted centroid is rejected and redrawn.
inline Points init_centroids(const Points& data, std::size_t k, double epsilon,
                             std::uint64_t seed) {
  check_data(data);
  if (k < 1 || k > data.size())
    throw InvalidArgument("k must lie in [1, #points]; got " +
                          std::to_string(k));
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> pool(data.size());
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  Points accepted;
  const std::size_t limit = 1000 * k;
  std::size_t rejections = 0;
  const double eps2 = epsilon * epsilon;
  while (accepted.size() < k) {
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    const std::size_t pos = pick(rng);
    const auto& candidate = data[pool[pos]];
    const bool too_close =
        std::any_of(accepted.begin(), accepted.end(), [&](const Point& c) {
          return embed::squared_euclidean(c, candidate) < eps2;
        });
    if (too_close) {
      if (++rejections >= limit)
        throw InfeasibleSeparation(
            "could not place " + std::to_string(k) +
            " centroids with separation " + std::to_string(epsilon) +
            " after " + std::to_string(limit) + " rejections");
      continue;
    }
    accepted.push_back(candidate);
    pool.erase(pool.begin() + std::ptrdiff_t(pos));
  }
  return accepted;
}

/// Row-wise argmin; ties go to the lowest centroid index.
inline Labels assign(const DistanceMatrix& dists) {
  if (dists.empty()) throw InvalidArgument("distance matrix is empty");
  Labels labels;
  labels.reserve(dists.size());
  for (const auto& row : dists) {
    if (row.empty()) throw InvalidArgument("distance matrix row is empty");
    labels.push_back(std::size_t(std::min_element(row.begin(), row.end()) -
                                 row.begin()));
  }
  return labels;
}

struct CentroidUpdate {
  Points centroids;
  Labels labels;                  // re-indexed densely
  std::vector<std::size_t> kept;  // old index of each surviving centroid
};

/// Member means; empty clusters are deleted and labels re-indexed densely in
/// the original order.
inline CentroidUpdate update_centroids(const Points& data, const Labels& labels,
                                       std::size_t k) {
  check_data(data);
  if (labels.size() != data.size())
    throw InvalidArgument("label count does not match point count");
  const std::size_t d = data.front().size();
  Points sums(k, Point(d, 0.0));
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (labels[i] >= k)
      throw InvalidArgument("label " + std::to_string(labels[i]) +
                            " outside [0, k)");
    for (std::size_t j = 0; j < d; ++j) sums[labels[i]][j] += data[i][j];
    ++counts[labels[i]];
  }
  CentroidUpdate out;
  std::vector<std::size_t> remap(k, k);
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    remap[c] = out.centroids.size();
    out.kept.push_back(c);
    for (auto& x : sums[c]) x /= double(counts[c]);
    out.centroids.push_back(std::move(sums[c]));
  }
  if (out.centroids.empty()) throw Error("all clusters are empty");
  out.labels.reserve(labels.size());
  for (auto l : labels) out.labels.push_back(remap[l]);
  return out;
}

/// Within-cluster sum of squared Euclidean distances.
inline double wcss(const Points& data, const Labels& labels,
                   const Points& centroids) {
  double s = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i)
    s += embed::squared_euclidean(data[i], centroids.at(labels[i]));
  return s;
}

inline DistanceMatrix euclidean_sq_matrix(const Points& data,
                                          const Points& centroids) {
  DistanceMatrix m(data.size(), std::vector<double>(centroids.size()));
  for (std::size_t i = 0; i < data.size(); ++i)
    for (std::size_t j = 0; j < centroids.size(); ++j)
      m[i][j] = embed::squared_euclidean(data[i], centroids[j]);
  return m;
}

/// Lloyd iteration driven by an arbitrary distance oracle
/// `distances(iteration, centroids) -> DistanceMatrix`. Stops when the
/// centroid set survives an update unchanged in size and no centroid moved
/// by convergence_tol or more.
template <class DistanceOracle>
ClusteringRun lloyd(const Points& data, const ClusterConfig& cfg,
                    Points centroids, DistanceOracle&& distances) {
  cfg.validate();
  check_data(data);
  ClusteringRun run;
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    const Labels labels = assign(distances(it, centroids));
    auto update = update_centroids(data, labels, centroids.size());
    double moved = 0.0;
    for (std::size_t c = 0; c < update.centroids.size(); ++c)
      moved = std::max(moved, std::sqrt(embed::squared_euclidean(
                                  update.centroids[c],
                                  centroids[update.kept[c]])));
    const bool shrank = update.centroids.size() != centroids.size();
    centroids = std::move(update.centroids);
    run.labels = std::move(update.labels);
    run.history.push_back(centroids);
    run.iterations = it + 1;
    if (!shrank && moved < cfg.convergence_tol) {
      run.converged = true;
      break;
    }
  }
  run.centroids = std::move(centroids);
  return run;
}

inline ClusteringRun kmeans_classical(const Points& data,
                                      const ClusterConfig& cfg,
                                      Points initial) {
  return lloyd(data, cfg, std::move(initial),
               [&](std::size_t, const Points& c) {
                 return euclidean_sq_matrix(data, c);
               });
}

inline ClusteringRun kmeans_classical(const Points& data,
                                      const ClusterConfig& cfg) {
  cfg.validate();
  return kmeans_classical(data, cfg,
                          init_centroids(data, cfg.k, cfg.epsilon, cfg.seed));
}

/// Point-major (point, centroid) distance matrix from the configured
/// estimator: squared distance for whole-vector amplitude estimates,
/// distance otherwise.
inline DistanceMatrix estimated_matrix(const Points& points,
                                       const Points& centroids,
                                       const dist::EstimatorConfig& estimator,
                                       const backend::Executor& executor,
                                       std::uint64_t seed) {
  std::vector<embed::VectorPair> pairs;
  pairs.reserve(points.size() * centroids.size());
  for (const auto& p : points)
    for (const auto& c : centroids) pairs.emplace_back(p, c);
  const auto est = dist::estimate_many(pairs, estimator, executor, seed);
  const bool squared = estimator.embedding == embed::Embedding::amplitude &&
                       !estimator.block_size;
  DistanceMatrix m(points.size(), std::vector<double>(centroids.size()));
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = 0; j < centroids.size(); ++j) {
      const auto& e = est[i * centroids.size() + j];
      m[i][j] = squared ? e.sq_distance : e.distance;
    }
  return m;
}

/// Quantum k-means: each iteration estimates all point-centroid distances on
/// the backend (batched, or one request per circuit when executor.workers is
/// nonzero), then assigns and updates classically.
inline ClusteringRun kmeans_quantum(const Points& data,
                                    const ClusterConfig& cfg,
                                    const backend::Executor& executor,
                                    std::optional<Points> initial = {}) {
  cfg.validate();
  Points start = initial ? std::move(*initial)
                         : init_centroids(data, cfg.k, cfg.epsilon, cfg.seed);
  std::vector<std::size_t> circuits;
  auto run = lloyd(data, cfg, std::move(start),
                   [&](std::size_t it, const Points& c) {
                     circuits.push_back(data.size() * c.size());
                     try {
                       return estimated_matrix(
                           data, c, cfg.estimator, executor,
                           derive_seed(cfg.seed, 0x71, it));
                     } catch (backend::BackendError& e) {
                       e.add_context("iteration " + std::to_string(it + 1));
                       throw;
                     }
                   });
  run.circuits_per_iteration = std::move(circuits);
  return run;
}

/// One prediction pass: each point takes the label of its nearest centroid.
inline Labels nn_classify(const Points& points, const Points& centroids,
                          const dist::EstimatorConfig& estimator,
                          const backend::Executor& executor,
                          std::uint64_t seed) {
  if (centroids.empty()) throw InvalidArgument("no centroids to classify with");
  check_data(points);
  return assign(
      estimated_matrix(points, centroids, estimator, executor, seed));
}

struct SeedSearchResult {
  std::uint64_t seed = 0;
  Points centroids;  // initial centroids for that seed
  std::size_t iterations = 0;
};

/// First seed in [first_seed, first_seed + seeds_to_try) whose classical run
/// converges within `iteration_budget` iterations.
inline SeedSearchResult seed_search(const Points& data, std::size_t k,
                                    std::size_t iteration_budget,
                                    std::size_t seeds_to_try,
                                    double epsilon = 0.0,
                                    std::uint64_t first_seed = 0,
                                    double convergence_tol = 1e-4) {
  if (seeds_to_try < 1) throw InvalidArgument("seeds_to_try must be >= 1");
  ClusterConfig cfg;
  cfg.k = k;
  cfg.epsilon = epsilon;
  cfg.max_iterations = iteration_budget;
  cfg.convergence_tol = convergence_tol;
  for (std::uint64_t s = first_seed; s < first_seed + seeds_to_try; ++s) {
    auto init = init_centroids(data, k, epsilon, s);
    const auto run = kmeans_classical(data, cfg, init);
    if (run.converged) return {s, std::move(init), run.iterations};
  }
  throw NoSeedFound("no seed in [" + std::to_string(first_seed) + ", " +
                    std::to_string(first_seed + seeds_to_try) +
                    ") converged within " + std::to_string(iteration_budget) +
                    " iterations");
}

}  // namespace qkmeans::cluster
