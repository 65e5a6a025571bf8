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

#include <cstddef>
#include <string>
#include <vector>

#include "gtg/graph.hpp"

namespace gtg {

struct TreeEdge {
  std::size_t parent;
  std::size_t child;
  double weight;
  friend bool operator==(const TreeEdge&, const TreeEdge&) = default;
};

/// Rooted k-hop BFS tree. nodes[0] is the root, the rest follow BFS order.
struct Subtree {
  std::size_t root = 0;
  std::vector<std::size_t> nodes;
  std::vector<TreeEdge> edges;
  std::size_t depth = 0;

  /// Adjacency of the tree over its own node order (|nodes| x |nodes|),
  /// carrying the source-graph weights.
  Matrix local_adjacency() const;
  friend bool operator==(const Subtree&, const Subtree&) = default;
};

/// Empty when t is a valid k-hop tree of g; otherwise a description of the
/// first broken invariant.
std::string check_subtree(const Subtree& t, const WeightedGraph& g);

/// Root scoring strategy. Only the weight-distribution reading is provided;
/// the enum leaves room for a neighbor-degree variant.
enum class EntropyStrategy { EdgeWeight };

struct RootRanking {
  std::vector<double> scores;       // per node, nats
  std::vector<std::size_t> order;   // by score descending, ties by ascending id
};

/// Shannon entropy (natural log) of the weight-proportional distribution over
/// v's incident edges; 0 when v has at most one neighbor.
double node_entropy(const WeightedGraph& g, std::size_t v, EntropyStrategy s = EntropyStrategy::EdgeWeight);

RootRanking rank_roots(const WeightedGraph& g, EntropyStrategy s = EntropyStrategy::EdgeWeight);

/// Ranking truncated to the top m roots. Throws MTooLarge when m > n.
RootRanking select_roots(const WeightedGraph& g, std::size_t m, EntropyStrategy s = EntropyStrategy::EdgeWeight);

/// BFS from root over positive-weight edges up to k hops. Neighbors are
/// visited in ascending id, so each node hangs off its first discovered parent.
Subtree extract_khop_tree(const WeightedGraph& g, std::size_t root, std::size_t k);

std::vector<Subtree> extract_all(const WeightedGraph& g, std::size_t m, std::size_t k);

}  // namespace gtg
