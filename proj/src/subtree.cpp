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
#include "gtg/subtree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <unordered_map>

#include "gtg/error.hpp"

namespace gtg {

Matrix Subtree::local_adjacency() const {
  std::unordered_map<std::size_t, std::size_t> pos;
  for (std::size_t i = 0; i < nodes.size(); ++i) pos.emplace(nodes[i], i);
  Matrix a(nodes.size(), nodes.size());
  for (const auto& e : edges) {
    const auto p = pos.at(e.parent), c = pos.at(e.child);
    a(p, c) = e.weight;
    a(c, p) = e.weight;
  }
  return a;
}

std::string check_subtree(const Subtree& t, const WeightedGraph& g) {
  const std::size_t n = g.n();
  if (t.nodes.empty() || t.nodes.front() != t.root) return "root is not the first node";
  if (t.edges.size() + 1 != t.nodes.size()) return "edge count is not |nodes|-1";
  std::unordered_map<std::size_t, std::size_t> pos;
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    if (t.nodes[i] >= n) return "node id out of range";
    if (!pos.emplace(t.nodes[i], i).second) return "duplicate node";
  }
  // Union-find over local positions: n-1 edges without a cycle means a tree.
  std::vector<std::size_t> parent(t.nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::size_t> hops(t.nodes.size(), 0);
  for (const auto& e : t.edges) {
    auto pi = pos.find(e.parent), ci = pos.find(e.child);
    if (pi == pos.end() || ci == pos.end()) return "edge endpoint outside the node set";
    if (g(e.parent, e.child) != e.weight || e.weight <= 0.0) return "edge weight differs from the source graph";
    const auto a = find(pi->second), b = find(ci->second);
    if (a == b) return "cycle";
    parent[a] = b;
  }
  // Depth: edges are listed parent-before-child in BFS order.
  for (const auto& e : t.edges) {
    hops[pos[e.child]] = hops[pos[e.parent]] + 1;
    if (hops[pos[e.child]] > t.depth) return "node beyond k hops";
  }
  return {};
}

double node_entropy(const WeightedGraph& g, std::size_t v, EntropyStrategy) {
  if (v >= g.n()) fail(ErrorKind::InvalidArgument, "node_entropy: node out of range");
  double total = 0.0;
  std::size_t neighbors = 0;
  for (double w : g.adj().row(v))
    if (w > 0.0) {
      total += w;
      ++neighbors;
    }
  if (neighbors <= 1) return 0.0;
  double h = 0.0;
  for (double w : g.adj().row(v))
    if (w > 0.0) {
      const double p = w / total;
      h -= p * std::log(p);
    }
  return std::max(h, 0.0);
}

RootRanking rank_roots(const WeightedGraph& g, EntropyStrategy s) {
  RootRanking r;
  r.scores.resize(g.n());
  for (std::size_t v = 0; v < g.n(); ++v) r.scores[v] = node_entropy(g, v, s);
  r.order.resize(g.n());
  std::iota(r.order.begin(), r.order.end(), 0);
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](std::size_t a, std::size_t b) { return r.scores[a] > r.scores[b]; });
  return r;
}

RootRanking select_roots(const WeightedGraph& g, std::size_t m, EntropyStrategy s) {
  if (m == 0) fail(ErrorKind::InvalidArgument, "select_roots: m must be >= 1");
  if (m > g.n())
    fail(ErrorKind::MTooLarge, "MTooLarge: m=" + std::to_string(m) + " for a graph with " + std::to_string(g.n()) +
                                   " nodes");
  auto r = rank_roots(g, s);
  r.order.resize(m);
  return r;
}

Subtree extract_khop_tree(const WeightedGraph& g, std::size_t root, std::size_t k) {
  if (root >= g.n()) fail(ErrorKind::InvalidArgument, "extract_khop_tree: root out of range");
  if (k == 0) fail(ErrorKind::InvalidArgument, "extract_khop_tree: k must be >= 1");
  Subtree t;
  t.root = root;
  t.depth = k;
  std::vector<std::size_t> hop(g.n(), SIZE_MAX);
  std::deque<std::size_t> queue{root};
  hop[root] = 0;
  t.nodes.push_back(root);
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    if (hop[u] == k) continue;
    for (std::size_t v = 0; v < g.n(); ++v) {
      if (g(u, v) <= 0.0 || hop[v] != SIZE_MAX) continue;
      hop[v] = hop[u] + 1;
      t.nodes.push_back(v);
      t.edges.push_back({u, v, g(u, v)});
      queue.push_back(v);
    }
  }
  return t;
}

std::vector<Subtree> extract_all(const WeightedGraph& g, std::size_t m, std::size_t k) {
  const auto ranking = select_roots(g, m, EntropyStrategy::EdgeWeight);
  std::vector<Subtree> trees;
  trees.reserve(m);
  for (auto root : ranking.order) trees.push_back(extract_khop_tree(g, root, k));
  return trees;
}

}  // namespace gtg
