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

#include "qkmeans/metrics.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "test_util.hpp"

using namespace qkmeans;
using namespace qkmeans::metrics;
using qkmeans::testing::shared_rng;

namespace {

using Counts = std::vector<std::vector<std::uint64_t>>;

ConfusionMatrix from_counts(Counts c) { return {std::move(c)}; }

std::uint64_t trace_after(const Labels& truth, const Labels& pred,
                          const std::vector<std::size_t>& perm) {
  const auto cm = confusion(truth, apply_permutation(pred, perm));
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < cm.rows(); ++i) t += cm.diag(i);
  return t;
}

std::uint64_t exhaustive_best_trace(const Labels& truth, const Labels& pred) {
  const std::size_t k = std::max(label_count(truth), label_count(pred));
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::uint64_t best = 0;
  do best = std::max(best, trace_after(truth, pred, perm));
  while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Labels random_labels(std::size_t n, std::size_t k) {
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  Labels out(n);
  for (auto& l : out) l = pick(shared_rng());
  return out;
}

}  // namespace

TEST(metrics, confusion_examples) {
  const Labels truth{0, 0, 1, 1}, pred{0, 1, 1, 1};
  EXPECT_EQ(confusion(truth, pred).counts, (Counts{{1, 1}, {0, 2}}));
  EXPECT_EQ(confusion(Labels{0, 1, 2}, Labels{0, 1, 2}).counts,
            (Counts{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
  EXPECT_EQ(confusion(Labels{0, 0}, Labels{0, 0}, 3).rows(), 3u);
  EXPECT_EQ(confusion(Labels{0, 0}, Labels{2, 0}).rows(), 3u);
  EXPECT_THROW(confusion(Labels{0, 1}, Labels{0}), InvalidArgument);
}

TEST(metrics, confusion_normalized_rows) {
  const auto cm = from_counts({{1, 3}, {0, 0}});
  const auto n = cm.normalized();
  EXPECT_DOUBLE_EQ(n[0][0], 0.25);
  EXPECT_DOUBLE_EQ(n[0][1], 0.75);
  EXPECT_EQ(n[1], (std::vector<double>{0, 0}));
}

TEST(metrics, identity_scores_one) {
  const Labels l{0, 1, 2, 2, 1, 0, 3};
  const auto s = score(confusion(l, l));
  EXPECT_DOUBLE_EQ(s.balanced_accuracy, 1.0);
  EXPECT_DOUBLE_EQ(s.raw_accuracy, 1.0);
  ASSERT_TRUE(s.weighted_precision);
  EXPECT_DOUBLE_EQ(*s.weighted_precision, 1.0);
}

TEST(metrics, two_class_example) {
  const auto cm = from_counts({{2, 0}, {1, 1}});
  EXPECT_DOUBLE_EQ(balanced_accuracy(cm), 0.75);
  EXPECT_DOUBLE_EQ(raw_accuracy(cm), 0.75);
  EXPECT_NEAR(weighted_precision(cm), 0.5 * 2.0 / 3.0 + 0.5 * 1.0, 1e-15);
}

TEST(metrics, imbalanced_three_class_example) {
  // recalls 8/10, 1/2, 3/3 ; precisions 8/9, 1/2, 3/4
  const auto cm = from_counts({{8, 1, 1}, {1, 1, 0}, {0, 0, 3}});
  EXPECT_NEAR(balanced_accuracy(cm), (0.8 + 0.5 + 1.0) / 3.0, 1e-15);
  EXPECT_NEAR(raw_accuracy(cm), 12.0 / 15.0, 1e-15);
  EXPECT_NEAR(weighted_precision(cm),
              (10.0 * 8 / 9 + 2.0 * 1 / 2 + 3.0 * 3 / 4) / 15.0, 1e-15);
}

TEST(metrics, balanced_ignores_empty_true_class) {
  const auto cm = from_counts({{2, 0, 0}, {0, 0, 0}, {1, 0, 1}});
  EXPECT_DOUBLE_EQ(balanced_accuracy(cm), 0.75);
}

TEST(metrics, weighted_precision_undefined) {
  const auto cm = from_counts({{2, 0}, {2, 0}});
  EXPECT_THROW(weighted_precision(cm), UndefinedMetric);
  const auto s = score(cm);
  EXPECT_FALSE(s.weighted_precision);
  EXPECT_TRUE(to_json(s)["weighted_precision"].is_null());
  EXPECT_THROW(raw_accuracy(from_counts({{0}})), InvalidArgument);
}

TEST(metrics, align_recovers_planted_permutation) {
  for (std::size_t k = 1; k <= 8; ++k) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto truth = random_labels(60, k);
      std::vector<std::size_t> planted(k);
      std::iota(planted.begin(), planted.end(), std::size_t{0});
      std::shuffle(planted.begin(), planted.end(), shared_rng());
      if (label_count(truth) < k) continue;
      const auto pred = apply_permutation(truth, planted);
      const auto perm = align_labels(truth, pred);
      EXPECT_EQ(apply_permutation(pred, perm), truth);
    }
  }
}

TEST(metrics, align_matches_exhaustive_oracle) {
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + trial % 5;
    const auto truth = random_labels(40, k);
    const auto pred = random_labels(40, k);
    const auto perm = align_labels(truth, pred);
    EXPECT_EQ(trace_after(truth, pred, perm), exhaustive_best_trace(truth, pred));
  }
}

TEST(metrics, hungarian_matches_exhaustive) {
  auto& rng = shared_rng();
  std::uniform_int_distribution<int> w(0, 20);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 7;
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (auto& row : cost)
      for (auto& c : row) c = w(rng);
    const auto a = detail::hungarian_min(cost);
    double got = 0.0;
    for (std::size_t i = 0; i < n; ++i) got += cost[i][a[i]];
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += cost[i][p[i]];
      best = std::min(best, s);
    } while (std::next_permutation(p.begin(), p.end()));
    EXPECT_DOUBLE_EQ(got, best);
  }
}

TEST(metrics, align_large_k_uses_assignment) {
  const std::size_t k = 12;
  const auto truth = random_labels(200, k);
  std::vector<std::size_t> planted(label_count(truth));
  std::iota(planted.begin(), planted.end(), std::size_t{0});
  std::shuffle(planted.begin(), planted.end(), shared_rng());
  const auto pred = apply_permutation(truth, planted);
  EXPECT_EQ(apply_permutation(pred, align_labels(truth, pred)), truth);
}

TEST(metrics, alignment_is_relabeling_invariant) {
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + trial % 6;
    const auto truth = random_labels(50, k);
    const auto pred = random_labels(50, k);
    std::vector<std::size_t> sigma(label_count(pred));
    std::iota(sigma.begin(), sigma.end(), std::size_t{0});
    std::shuffle(sigma.begin(), sigma.end(), shared_rng());
    const auto renamed = apply_permutation(pred, sigma);
    const auto a = score(confusion(truth, apply_permutation(pred, align_labels(truth, pred)), k));
    const auto b = score(confusion(
        truth, apply_permutation(renamed, align_labels(truth, renamed)), k));
    EXPECT_DOUBLE_EQ(a.raw_accuracy, b.raw_accuracy);
    EXPECT_GE(a.raw_accuracy, raw_accuracy(confusion(truth, pred, k)));
  }
}

TEST(metrics, serialisation) {
  const auto cm = from_counts({{1, 1}, {0, 2}});
  const auto j = to_json(cm);
  EXPECT_EQ(j["counts"], nlohmann::json::parse("[[1,1],[0,2]]"));
  EXPECT_DOUBLE_EQ(j["normalized"][0][1].get<double>(), 0.5);
  std::ostringstream out;
  write_csv(out, cm);
  EXPECT_EQ(out.str(), "true\\pred,p0,p1\nt0,1,1\nt1,0,2\n");
}
