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

// Classical-to-quantum data embeddings for swap-test distance estimation.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qkmeans/common.hpp"
#include "qkmeans/qsim.hpp"

namespace qkmeans::embed {

enum class Embedding { amplitude, angle };

inline std::string_view to_string(Embedding e) {
  return e == Embedding::amplitude ? "amplitude" : "angle";
}

inline Embedding parse_embedding(std::string_view s) {
  if (s == "amplitude") return Embedding::amplitude;
  if (s == "angle") return Embedding::angle;
  throw InvalidArgument("unknown embedding '" + std::string(s) +
                        "' (expected amplitude or angle)");
}

/// A data point and a centroid of equal length.
struct VectorPair {
  Point a;
  Point b;

  VectorPair(Point a_, Point b_) : a(std::move(a_)), b(std::move(b_)) {
    if (a.size() != b.size())
      throw InvalidArgument("vector pair has mismatched lengths " +
                            std::to_string(a.size()) + " and " +
                            std::to_string(b.size()));
    if (a.empty()) throw InvalidArgument("vector pair is empty");
  }

  std::size_t dim() const noexcept { return a.size(); }
};

struct NormalizedPair {
  Point a;
  Point b;
  double z = 0.0;  // |a|^2 + |b|^2 of the raw inputs
};

inline double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

inline double squared_euclidean(std::span<const double> a,
                                std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

/// Smallest power of two >= n (and >= 2).
inline std::size_t padded_length(std::size_t n) {
  std::size_t p = 2;
  while (p < n) p <<= 1;
  return p;
}

inline std::size_t ceil_log2(std::size_t n) {
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  return bits;
}

inline NormalizedPair normalize_pair(const VectorPair& pair) {
  const double z = squared_norm(pair.a) + squared_norm(pair.b);
  if (!(z > 0.0)) throw InvalidArgument("both vectors are zero (Z = 0)");
  const double s = 1.0 / std::sqrt(z);
  NormalizedPair out{pair.a, pair.b, z};
  for (auto& x : out.a) x *= s;
  for (auto& x : out.b) x *= s;
  return out;
}

/// Componentwise pi/2 (v + 1), mapping [-1, 1] onto [0, pi].
inline std::vector<double> angle_map(std::span<const double> v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) {
    if (x < -1.0 - 1e-9 || x > 1.0 + 1e-9)
      throw InvalidArgument("angle_map input component " + std::to_string(x) +
                            " outside [-1, 1]");
    out.push_back(std::numbers::pi / 2.0 * (std::clamp(x, -1.0, 1.0) + 1.0));
  }
  return out;
}

/// psi = (|0>|a> + |1>|b>)/sqrt(2) and phi = (|a||0> - |b||1>)/sqrt(Z).
/// The index qubit is the most significant bit of psi.
struct AmplitudeStates {
  std::vector<qsim::Complex> psi;
  std::vector<qsim::Complex> phi;
  double z = 0.0;
  std::size_t data_qubits = 0;
};

inline AmplitudeStates amplitude_pair_states(const VectorPair& pair) {
  const double na2 = squared_norm(pair.a);
  const double nb2 = squared_norm(pair.b);
  const double z = na2 + nb2;
  if (!(z > 0.0)) throw InvalidArgument("both vectors are zero (Z = 0)");
  const std::size_t len = padded_length(pair.dim());
  AmplitudeStates out;
  out.z = z;
  out.data_qubits = ceil_log2(len);
  out.psi.assign(2 * len, qsim::Complex{0.0, 0.0});
  const double r = 1.0 / std::sqrt(2.0);
  auto place = [&](std::span<const double> v, double norm2,
                   std::size_t offset) {
    if (norm2 == 0.0) {
      // a zero vector has no direction; |0...0> with weight 0 in phi
      out.psi[offset] = r;
      return;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t i = 0; i < v.size(); ++i) out.psi[offset + i] = r * v[i] * inv;
  };
  place(pair.a, na2, 0);
  place(pair.b, nb2, len);
  const double sz = std::sqrt(z);
  out.phi = {std::sqrt(na2) / sz, -std::sqrt(nb2) / sz};
  return out;
}

struct AngleParams {
  std::vector<std::pair<double, double>> a;  // (theta, gamma) per qubit
  std::vector<std::pair<double, double>> b;
  double z = 0.0;
};

/// One U(theta, gamma) per pair of consecutive (zero-padded) components.
inline AngleParams angle_product_params(const VectorPair& pair) {
  const auto normalized = normalize_pair(pair);
  auto pad = [](Point v) {
    if (v.size() % 2 != 0) v.push_back(0.0);
    return v;
  };
  // pad after normalizing so the padded zero maps to pi/2 on both sides
  const auto a = angle_map(pad(normalized.a));
  const auto b = angle_map(pad(normalized.b));
  AngleParams out;
  out.z = normalized.z;
  for (std::size_t i = 0; i < a.size(); i += 2) {
    out.a.emplace_back(a[i], a[i + 1]);
    out.b.emplace_back(b[i], b[i + 1]);
  }
  return out;
}

/// Qubits for the complete swap-test circuit on n-dimensional inputs.
inline std::size_t circuit_width(std::size_t n, Embedding embedding) {
  if (n < 2) throw InvalidArgument("dimension must be at least 2");
  if (embedding == Embedding::amplitude) return ceil_log2(n) + 3;
  return 2 * ((n + 1) / 2) + 1;
}

}  // namespace qkmeans::embed
