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

#include "qkmeans/data.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "test_util.hpp"

using namespace qkmeans;
using namespace qkmeans::data;
using qkmeans::testing::brute_sq_euclid;
using qkmeans::testing::shared_rng;

namespace {

double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Dataset random_dataset(std::size_t n, std::size_t d) {
  Dataset ds;
  ds.dim = d;
  ds.points = qkmeans::testing::random_points(shared_rng(), n, d);
  return ds;
}

}  // namespace

TEST(data, gen_shapes) {
  GenConfig g;
  const auto four = gen_clusters(g);
  EXPECT_EQ(four.dataset.size(), 60u);
  EXPECT_EQ(four.centers.size(), 4u);
  EXPECT_NO_THROW(four.dataset.validate());

  g.k = 4;
  g.points_per = 28;
  g.dim = 26;
  const auto wide = gen_clusters(g);
  EXPECT_EQ(wide.dataset.size(), 112u);
  EXPECT_EQ(wide.dataset.dim, 26u);
  for (const auto& p : wide.dataset.points) EXPECT_EQ(p.size(), 26u);

  GenConfig fixed;
  fixed.k = 2;
  fixed.points_per = 5;
  fixed.variance = 0.0;
  const auto exact = gen_clusters(fixed);
  for (std::size_t i = 0; i < exact.dataset.size(); ++i)
    EXPECT_EQ(exact.dataset.points[i],
              exact.centers[(*exact.dataset.true_labels)[i]]);
  EXPECT_EQ(gen_clusters(g), gen_clusters(g));
}

TEST(data, gen_labels_follow_nearest_center) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GenConfig g;
    g.seed = seed;
    g.k = 5;
    g.dim = 3;
    g.variance = 0.05;
    g.min_sep = 8.0 * std::sqrt(g.variance) * 2.0;
    const auto gen = gen_clusters(g);
    const auto& ds = gen.dataset;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < gen.centers.size(); ++c)
        if (brute_sq_euclid(ds.points[i], gen.centers[c]) <
            brute_sq_euclid(ds.points[i], gen.centers[best]))
          best = c;
      EXPECT_EQ(best, (*ds.true_labels)[i]);
    }
    for (std::size_t a = 0; a < gen.centers.size(); ++a)
      for (std::size_t b = a + 1; b < gen.centers.size(); ++b)
        EXPECT_GE(std::sqrt(brute_sq_euclid(gen.centers[a], gen.centers[b])),
                  g.min_sep);
  }
}

TEST(data, gen_rejects_bad_config) {
  GenConfig g;
  g.k = 0;
  EXPECT_THROW(gen_clusters(g), InvalidArgument);
  g = {};
  g.variance = -1.0;
  EXPECT_THROW(gen_clusters(g), InvalidArgument);
  g = {};
  g.min_sep = 100.0;
  EXPECT_THROW(gen_clusters(g), cluster::InfeasibleSeparation);
}

TEST(data, csv_round_trip_is_exact) {
  GenConfig g;
  g.dim = 5;
  g.seed = 17;
  const auto ds = gen_clusters(g).dataset;
  std::stringstream io;
  write_csv(io, ds);
  EXPECT_EQ(read_csv(io), ds);

  Dataset unlabeled = ds;
  unlabeled.true_labels.reset();
  std::stringstream io2;
  write_csv(io2, unlabeled);
  EXPECT_EQ(read_csv(io2), unlabeled);
}

TEST(data, csv_header_and_rows) {
  Dataset ds;
  ds.dim = 2;
  ds.points = {{1.5, -2}, {0.1, 3}};
  ds.true_labels = Labels{0, 1};
  std::stringstream io;
  write_csv(io, ds);
  std::string header;
  std::getline(io, header);
  EXPECT_EQ(header, "f0,f1,label");
  std::string row;
  std::getline(io, row);
  EXPECT_EQ(row, "1.5,-2,0");
}

TEST(data, csv_errors_name_the_line) {
  std::stringstream ragged("f0,f1\n1,2\n3\n");
  try {
    read_csv(ragged);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  std::stringstream bad("f0,f1\n1,x\n");
  try {
    read_csv(bad);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::stringstream empty("\n\n");
  EXPECT_THROW(read_csv(empty), FormatError);
  std::stringstream wrong("x,y\n1,2\n");
  EXPECT_THROW(read_csv(wrong), FormatError);
  std::stringstream label_first("label,f0\n1,2\n");
  EXPECT_THROW(read_csv(label_first), FormatError);
  EXPECT_THROW(load_csv("/nonexistent/points.csv"), Error);
}

TEST(data, csv_tolerates_blank_lines_and_crlf) {
  std::stringstream io("\nf0,f1\r\n1,2\r\n\n3,4\n");
  const auto ds = read_csv(io);
  EXPECT_EQ(ds.points, (Points{{1, 2}, {3, 4}}));
}

TEST(data, pca_plane_in_5d) {
  Dataset ds;
  ds.dim = 5;
  auto& rng = shared_rng();
  std::normal_distribution<double> n01;
  const Point u{1, 0, 0, 0, 0}, v{0, 0.6, 0.8, 0, 0};
  for (int i = 0; i < 200; ++i) {
    const double s = 3.0 * n01(rng), t = n01(rng);
    Point p(5);
    for (int j = 0; j < 5; ++j) p[j] = s * u[j] + t * v[j] + 1.0;
    ds.points.push_back(p);
  }
  const auto m = pca_fit(ds, 2);
  EXPECT_NEAR(m.explained_variance_ratio[0] + m.explained_variance_ratio[1],
              1.0, 1e-9);
  EXPECT_GT(m.explained_variance_ratio[0], m.explained_variance_ratio[1]);
  EXPECT_NEAR(std::abs(dot(m.components[0], u)), 1.0, 1e-2);
}

TEST(data, pca_full_rank_reconstructs) {
  const auto ds = random_dataset(30, 6);
  const auto m = pca_fit(ds, 6);
  const auto t = pca_transform(m, ds);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    Point back = m.mean;
    for (std::size_t c = 0; c < 6; ++c)
      for (std::size_t j = 0; j < 6; ++j)
        back[j] += t.points[i][c] * m.components[c][j];
    for (std::size_t j = 0; j < 6; ++j)
      EXPECT_NEAR(back[j], ds.points[i][j], 1e-9);
  }
}

TEST(data, pca_properties_26d) {
  GenConfig g;
  g.k = 4;
  g.points_per = 28;
  g.dim = 26;
  g.seed = 2;
  const auto ds = gen_clusters(g).dataset;
  const auto m = pca_fit(ds, 8);
  for (std::size_t c = 0; c < 8; ++c) {
    if (c > 0) {
      EXPECT_GE(m.explained_variance_ratio[c - 1], m.explained_variance_ratio[c]);
    }
    for (std::size_t e = 0; e < 8; ++e)
      EXPECT_NEAR(dot(m.components[c], m.components[e]), c == e ? 1.0 : 0.0,
                  1e-9);
  }
  // projection never expands pairwise distances
  const auto t = pca_transform(m, ds);
  EXPECT_EQ(t.true_labels, ds.true_labels);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = i + 1; j < 20; ++j)
      EXPECT_LE(brute_sq_euclid(t.points[i], t.points[j]),
                brute_sq_euclid(ds.points[i], ds.points[j]) + 1e-9);
  const auto full = pca_transform(pca_fit(ds, 26), ds);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = i + 1; j < 20; ++j)
      EXPECT_NEAR(brute_sq_euclid(full.points[i], full.points[j]),
                  brute_sq_euclid(ds.points[i], ds.points[j]), 1e-8);
}

TEST(data, pca_json_round_trip) {
  const auto ds = random_dataset(25, 4);
  const auto m = pca_fit(ds, 3);
  const auto back = pca_from_json(nlohmann::json::parse(to_json(m).dump()));
  EXPECT_EQ(back.mean, m.mean);
  EXPECT_EQ(back.components, m.components);
  EXPECT_EQ(back.explained_variance_ratio, m.explained_variance_ratio);
  EXPECT_THROW(pca_from_json(nlohmann::json::object()), FormatError);
}

TEST(data, pca_errors) {
  const auto ds = random_dataset(10, 3);
  EXPECT_THROW(pca_fit(ds, 0), InvalidArgument);
  EXPECT_THROW(pca_fit(ds, 4), InvalidArgument);
  Dataset flat;
  flat.dim = 2;
  flat.points = {{1, 1}, {1, 1}, {1, 1}};
  EXPECT_THROW(pca_fit(flat, 1), InvalidArgument);
  EXPECT_THROW(pca_transform(pca_fit(ds, 2), random_dataset(5, 4)),
               InvalidArgument);
}

TEST(data, elbow_endpoints) {
  const auto ds = random_dataset(12, 3);
  const auto curve = elbow_curve(ds, 12, 1);
  ASSERT_EQ(curve.size(), 12u);
  EXPECT_NEAR(curve.back(), 0.0, 1e-12);
  Point mean(3, 0.0);
  for (const auto& p : ds.points)
    for (int j = 0; j < 3; ++j) mean[j] += p[j] / 12.0;
  double total = 0.0;
  for (const auto& p : ds.points) total += brute_sq_euclid(p, mean);
  EXPECT_NEAR(curve.front(), total, 1e-9);
  EXPECT_THROW(elbow_curve(ds, 13, 1), InvalidArgument);
}

TEST(data, elbow_drops_at_true_k) {
  GenConfig g;
  g.k = 5;
  g.points_per = 20;
  g.dim = 2;
  g.variance = 0.05;
  g.min_sep = 2.5;
  g.seed = 8;
  const auto curve = elbow_curve(gen_clusters(g).dataset, 8, 3);
  for (std::size_t k = 1; k < curve.size(); ++k)
    EXPECT_LE(curve[k], curve[k - 1] + 1e-9);
  const double before = curve[3] - curve[4];  // gain of the 5th cluster
  const double after = curve[4] - curve[5];   // gain of the 6th
  EXPECT_GT(before, 10.0 * after);
}
