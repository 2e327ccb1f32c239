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
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "qkmeans/cluster.hpp"
#include "qkmeans/common.hpp"
#include "qkmeans/embed.hpp"

namespace qkmeans::data {

struct Dataset {
  Points points;
  std::size_t dim = 0;
  std::optional<Labels> true_labels;

  std::size_t size() const noexcept { return points.size(); }

  void validate() const {
    for (const auto& p : points)
      if (p.size() != dim)
        throw InvalidArgument("dataset point has dimension " +
                              std::to_string(p.size()) + ", expected " +
                              std::to_string(dim));
    if (true_labels && true_labels->size() != points.size())
      throw InvalidArgument("label count does not match point count");
  }

  bool operator==(const Dataset&) const = default;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Synthetic clusters

struct GenConfig {
  std::size_t k = 4;
  std::size_t points_per = 15;
  std::size_t dim = 2;
  double variance = 0.1;  // per dimension
  double min_sep = 0.0;   // minimum distance between centers
  double box_lo = 0.0;
  double box_hi = 10.0;
  std::uint64_t seed = 0;
};

struct GeneratedClusters {
  Dataset dataset;
  Points centers;

  bool operator==(const GeneratedClusters&) const = default;
};

/// k centers uniform in [box_lo, box_hi]^dim (redrawn while closer than
/// min_sep to an accepted center), then points_per isotropic normal samples
/// around each center. Points are grouped by center in generation order.
inline GeneratedClusters gen_clusters(const GenConfig& cfg) {
  if (cfg.k < 1 || cfg.points_per < 1 || cfg.dim < 1)
    throw InvalidArgument("k, points_per and dim must all be >= 1");
  if (!(cfg.variance >= 0.0)) throw InvalidArgument("variance must be >= 0");
  if (!(cfg.box_hi > cfg.box_lo)) throw InvalidArgument("empty center box");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> coord(cfg.box_lo, cfg.box_hi);
  Points centers;
  const std::size_t limit = 1000 * cfg.k;
  std::size_t rejections = 0;
  while (centers.size() < cfg.k) {
    Point c(cfg.dim);
    for (auto& x : c) x = coord(rng);
    const bool close =
        std::any_of(centers.begin(), centers.end(), [&](const Point& o) {
          return embed::squared_euclidean(o, c) < cfg.min_sep * cfg.min_sep;
        });
    if (close) {
      if (++rejections >= limit)
        throw cluster::InfeasibleSeparation(
            "could not place " + std::to_string(cfg.k) +
            " centers with separation " + std::to_string(cfg.min_sep));
      continue;
    }
    centers.push_back(std::move(c));
  }
  std::normal_distribution<double> noise(0.0, std::sqrt(cfg.variance));
  GeneratedClusters out;
  out.dataset.dim = cfg.dim;
  out.dataset.true_labels = Labels{};
  for (std::size_t c = 0; c < cfg.k; ++c) {
    for (std::size_t i = 0; i < cfg.points_per; ++i) {
      Point p = centers[c];
      if (cfg.variance > 0.0)
        for (auto& x : p) x += noise(rng);
      out.dataset.points.push_back(std::move(p));
      out.dataset.true_labels->push_back(c);
    }
  }
  out.centers = std::move(centers);
  return out;
}

// ---------------------------------------------------------------------------
// CSV: header f0,...,f{d-1}[,label]; one row per point.

inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline void write_csv(std::ostream& out, const Dataset& ds) {
  ds.validate();
  for (std::size_t j = 0; j < ds.dim; ++j) out << (j ? "," : "") << 'f' << j;
  if (ds.true_labels) out << (ds.dim ? "," : "") << "label";
  out << '\n';
  for (std::size_t i = 0; i < ds.points.size(); ++i) {
    for (std::size_t j = 0; j < ds.dim; ++j)
      out << (j ? "," : "") << format_double(ds.points[i][j]);
    if (ds.true_labels) out << (ds.dim ? "," : "") << (*ds.true_labels)[i];
    out << '\n';
  }
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (auto& f : out) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t'))
      f.remove_prefix(1);
    while (!f.empty() &&
           (f.back() == ' ' || f.back() == '\t' || f.back() == '\r'))
      f.remove_suffix(1);
  }
  return out;
}

template <class T>
T parse_number(std::string_view field, std::size_t line) {
  T value{};
  const char* first = field.data();
  const char* last = first + field.size();
  if (!field.empty() && field.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc{} || ptr != last)
    throw FormatError("line " + std::to_string(line) + ": '" +
                      std::string(field) + "' is not a number");
  return value;
}

}  // namespace detail

inline Dataset read_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool found = false;
  while (!found && std::getline(in, line)) {
    ++line_no;
    found = !(line.empty() || line == "\r");
  }
  if (!found) throw FormatError("missing CSV header");
  const auto header = detail::split(line);
  Dataset ds;
  bool has_label = false;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == "label" && j + 1 == header.size()) {
      has_label = true;
    } else if (header[j] != "f" + std::to_string(j)) {
      throw FormatError("line " + std::to_string(line_no) +
                        ": header column " + std::to_string(j) + " is '" +
                        std::string(header[j]) + "', expected 'f" +
                        std::to_string(j) + "'");
    }
  }
  ds.dim = header.size() - (has_label ? 1 : 0);
  if (ds.dim == 0) throw FormatError("CSV header declares no features");
  if (has_label) ds.true_labels = Labels{};
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = detail::split(line);
    if (fields.size() != header.size())
      throw FormatError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " fields, found " +
                        std::to_string(fields.size()));
    Point p(ds.dim);
    for (std::size_t j = 0; j < ds.dim; ++j)
      p[j] = detail::parse_number<double>(fields[j], line_no);
    ds.points.push_back(std::move(p));
    if (has_label)
      ds.true_labels->push_back(
          detail::parse_number<std::size_t>(fields.back(), line_no));
  }
  return ds;
}

inline Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return read_csv(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

inline void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_csv(out, ds);
  if (!out) throw Error("error while writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// PCA

struct PCAModel {
  Point mean;
  Points components;  // orthonormal rows, by decreasing variance
  std::vector<double> explained_variance_ratio;
};

inline PCAModel pca_fit(const Dataset& ds, std::size_t out_dim) {
  ds.validate();
  if (ds.points.size() < 2) throw InvalidArgument("PCA needs at least 2 points");
  if (out_dim < 1 || out_dim > ds.dim)
    throw InvalidArgument("PCA output dimension must lie in [1, " +
                          std::to_string(ds.dim) + "]");
  const auto n = Eigen::Index(ds.points.size());
  const auto d = Eigen::Index(ds.dim);
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = ds.points[i][j];
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  const Eigen::MatrixXd cov = (x.transpose() * x) / double(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw Error("PCA eigendecomposition failed");
  const Eigen::VectorXd values = eig.eigenvalues().cwiseMax(0.0);
  const double total = values.sum();
  if (!(total > 0.0)) throw InvalidArgument("data has zero variance");

  PCAModel model;
  model.mean.assign(mean.data(), mean.data() + d);
  // eigenvalues come in increasing order
  for (std::size_t c = 0; c < out_dim; ++c) {
    const Eigen::Index idx = d - 1 - Eigen::Index(c);
    Eigen::VectorXd v = eig.eigenvectors().col(idx);
    // sign convention: largest-magnitude entry positive
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    model.components.emplace_back(v.data(), v.data() + d);
    model.explained_variance_ratio.push_back(values(idx) / total);
  }
  return model;
}

inline Dataset pca_transform(const PCAModel& model, const Dataset& ds) {
  ds.validate();
  if (ds.dim != model.mean.size())
    throw InvalidArgument("dataset dimension does not match the PCA model");
  Dataset out;
  out.dim = model.components.size();
  out.true_labels = ds.true_labels;
  for (const auto& p : ds.points) {
    Point q(out.dim, 0.0);
    for (std::size_t c = 0; c < out.dim; ++c)
      for (std::size_t j = 0; j < ds.dim; ++j)
        q[c] += model.components[c][j] * (p[j] - model.mean[j]);
    out.points.push_back(std::move(q));
  }
  return out;
}

inline nlohmann::json to_json(const PCAModel& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : m.components) rows.push_back(c);
  return {{"mean", m.mean},
          {"components", rows},
          {"explained_variance_ratio", m.explained_variance_ratio}};
}

inline PCAModel pca_from_json(const nlohmann::json& j) {
  try {
    PCAModel m;
    m.mean = j.at("mean").get<Point>();
    m.components = j.at("components").get<Points>();
    m.explained_variance_ratio =
        j.at("explained_variance_ratio").get<std::vector<double>>();
    for (const auto& c : m.components)
      if (c.size() != m.mean.size())
        throw FormatError("PCA component length does not match mean length");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed PCA model: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Elbow method

/// Final WCSS of classical k-means for k = 1..k_max, best of `restarts`
/// initialisations per k. Reading the elbow is left to the analyst.
inline std::vector<double> elbow_curve(const Dataset& ds, std::size_t k_max,
                                       std::uint64_t seed,
                                       std::size_t restarts = 5,
                                       std::size_t max_iterations = 100) {
  ds.validate();
  if (k_max < 1 || k_max > ds.size())
    throw InvalidArgument("k_max must lie in [1, #points]");
  if (restarts < 1) throw InvalidArgument("restarts must be >= 1");
  std::vector<double> out;
  for (std::size_t k = 1; k <= k_max; ++k) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < restarts; ++r) {
      cluster::ClusterConfig cfg;
      cfg.k = k;
      cfg.max_iterations = max_iterations;
      cfg.seed = derive_seed(seed, k, r);
      const auto run = cluster::kmeans_classical(ds.points, cfg);
      best = std::min(best, cluster::wcss(ds.points, run.labels, run.centroids));
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace qkmeans::data
