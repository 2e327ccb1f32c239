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

// Confusion matrices and scores for comparing a candidate labelling against
// a baseline (true) labelling.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qkmeans/common.hpp"

namespace qkmeans::metrics {

class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

/// counts[i][j]: points with true label i and predicted label j.
struct ConfusionMatrix {
  std::vector<std::vector<std::uint64_t>> counts;

  std::size_t rows() const noexcept { return counts.size(); }
  std::size_t cols() const noexcept {
    return counts.empty() ? 0 : counts.front().size();
  }

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& r : counts) t += std::accumulate(r.begin(), r.end(), std::uint64_t{0});
    return t;
  }

  std::uint64_t row_sum(std::size_t i) const {
    return std::accumulate(counts[i].begin(), counts[i].end(), std::uint64_t{0});
  }

  std::uint64_t col_sum(std::size_t j) const {
    std::uint64_t s = 0;
    for (const auto& r : counts) s += r[j];
    return s;
  }

  std::uint64_t diag(std::size_t i) const {
    return i < cols() ? counts[i][i] : 0;
  }

  /// Rows scaled to sum to 1; empty rows stay zero.
  std::vector<std::vector<double>> normalized() const {
    std::vector<std::vector<double>> out(rows(), std::vector<double>(cols(), 0.0));
    for (std::size_t i = 0; i < rows(); ++i) {
      const auto s = row_sum(i);
      if (s == 0) continue;
      for (std::size_t j = 0; j < cols(); ++j)
        out[i][j] = double(counts[i][j]) / double(s);
    }
    return out;
  }

  bool operator==(const ConfusionMatrix&) const = default;
};

inline std::size_t label_count(std::span<const std::size_t> labels) {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

/// Square matrix of side max(#true classes, #predicted classes, min_classes).
inline ConfusionMatrix confusion(std::span<const std::size_t> truth,
                                 std::span<const std::size_t> pred,
                                 std::size_t min_classes = 0) {
  if (truth.size() != pred.size())
    throw InvalidArgument("label lists differ in length (" +
                          std::to_string(truth.size()) + " vs " +
                          std::to_string(pred.size()) + ")");
  const std::size_t k =
      std::max({label_count(truth), label_count(pred), min_classes});
  ConfusionMatrix cm;
  cm.counts.assign(k, std::vector<std::uint64_t>(k, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) ++cm.counts[truth[i]][pred[i]];
  return cm;
}

inline void require_nonempty(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw InvalidArgument("confusion matrix is empty");
}

inline double raw_accuracy(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  std::uint64_t trace = 0;
  for (std::size_t i = 0; i < cm.rows(); ++i) trace += cm.diag(i);
  return double(trace) / double(cm.total());
}

/// Mean recall over true classes that have at least one point.
inline double balanced_accuracy(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  double sum = 0.0;
  std::size_t classes = 0;
  for (std::size_t i = 0; i < cm.rows(); ++i) {
    const auto support = cm.row_sum(i);
    if (support == 0) continue;
    sum += double(cm.diag(i)) / double(support);
    ++classes;
  }
  return sum / double(classes);
}

/// Support-weighted mean precision. Undefined when a class with support was
/// never predicted.
inline double weighted_precision(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  const double total = double(cm.total());
  double out = 0.0;
  for (std::size_t c = 0; c < cm.rows(); ++c) {
    const auto support = cm.row_sum(c);
    if (support == 0) continue;
    const auto predicted = c < cm.cols() ? cm.col_sum(c) : 0;
    if (predicted == 0)
      throw UndefinedMetric("weighted precision is undefined: class " +
                            std::to_string(c) + " is never predicted");
    out += double(support) / total * double(cm.diag(c)) / double(predicted);
  }
  return out;
}

namespace detail {

/// Minimum-cost perfect assignment (Hungarian method, O(n^3)).
/// Returns row -> column.
inline std::vector<std::size_t> hungarian_min(
    const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; p[j] is the row matched to column j
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace detail

/// Relabelling of predicted classes maximising the confusion-matrix trace.
/// Returns perm with perm[predicted] = aligned label. Exhaustive search up to
/// 8 classes, Hungarian assignment above.
inline std::vector<std::size_t> align_labels(std::span<const std::size_t> truth,
                                             std::span<const std::size_t> pred) {
  const auto cm = confusion(truth, pred);
  const std::size_t k = cm.rows();
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  if (k <= 8) {
    auto score = [&](const std::vector<std::size_t>& q) {
      std::uint64_t s = 0;
      for (std::size_t j = 0; j < k; ++j) s += cm.counts[q[j]][j];
      return s;
    };
    auto best = perm;
    auto best_score = score(perm);
    while (std::next_permutation(perm.begin(), perm.end())) {
      const auto s = score(perm);
      if (s > best_score) {
        best_score = s;
        best = perm;
      }
    }
    return best;
  }
  // cost[pred][true] = -count
  std::vector<std::vector<double>> cost(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) cost[j][i] = -double(cm.counts[i][j]);
  return detail::hungarian_min(cost);
}

inline Labels apply_permutation(std::span<const std::size_t> labels,
                                std::span<const std::size_t> perm) {
  Labels out;
  out.reserve(labels.size());
  for (auto l : labels) out.push_back(perm[l]);
  return out;
}

inline nlohmann::json to_json(const ConfusionMatrix& cm) {
  return {{"counts", cm.counts}, {"normalized", cm.normalized()}};
}

/// Counts as CSV: header "true\pred,p0,...", one row per true class.
inline void write_csv(std::ostream& out, const ConfusionMatrix& cm) {
  out << "true\\pred";
  for (std::size_t j = 0; j < cm.cols(); ++j) out << ",p" << j;
  out << '\n';
  for (std::size_t i = 0; i < cm.rows(); ++i) {
    out << 't' << i;
    for (auto c : cm.counts[i]) out << ',' << c;
    out << '\n';
  }
}

struct Scores {
  double balanced_accuracy = 0.0;
  double raw_accuracy = 0.0;
  std::optional<double> weighted_precision;  // nullopt when undefined
};

inline Scores score(const ConfusionMatrix& cm) {
  Scores s{balanced_accuracy(cm), raw_accuracy(cm), std::nullopt};
  try {
    s.weighted_precision = weighted_precision(cm);
  } catch (const UndefinedMetric&) {
  }
  return s;
}

inline nlohmann::json to_json(const Scores& s) {
  nlohmann::json j{{"balanced_accuracy", s.balanced_accuracy},
                   {"raw_accuracy", s.raw_accuracy}};
  j["weighted_precision"] = s.weighted_precision
                                ? nlohmann::json(*s.weighted_precision)
                                : nlohmann::json(nullptr);
  return j;
}

}  // namespace qkmeans::metrics
