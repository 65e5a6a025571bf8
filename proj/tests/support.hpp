/*
 * Copyright 2026 The GraphTreeGen Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

// Shared test fixtures: seeded random graphs and scratch directories.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gtg/graph.hpp"
#include "gtg/rng.hpp"

namespace gtg::testing {

/// Symmetric, zero-diagonal, weights in [0.05, 1] on roughly `density` of
/// the pairs. When `connected`, a random spanning path is added first.
inline WeightedGraph random_graph(std::size_t n, double density, std::uint64_t seed, bool connected = true) {
  SplitMix64 rng(seed);
  Matrix a(n, n);
  if (connected && n > 1) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double w = rng.uniform(0.05, 1.0);
      a(order[i], order[i + 1]) = a(order[i + 1], order[i]) = w;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (a(i, j) == 0.0 && rng.uniform() < density) a(i, j) = a(j, i) = rng.uniform(0.05, 1.0);
  return WeightedGraph(std::move(a));
}

/// Relabels nodes: out(perm[i], perm[j]) = g(i, j).
inline WeightedGraph permute(const WeightedGraph& g, const std::vector<std::size_t>& perm) {
  Matrix a(g.n(), g.n());
  for (std::size_t i = 0; i < g.n(); ++i)
    for (std::size_t j = 0; j < g.n(); ++j) a(perm[i], perm[j]) = g(i, j);
  return WeightedGraph(std::move(a));
}

inline std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  SplitMix64 rng(seed);
  rng.shuffle(std::span<std::size_t>(p));
  return p;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return a.size() == b.size() ? m : INFINITY;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("gtg_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace gtg::testing
