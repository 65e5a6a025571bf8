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
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gtg/autodiff.hpp"
#include "gtg/graph.hpp"
#include "gtg/subtree.hpp"

namespace gtg {

/// Which decoder heads exist. The two reduced variants are the decoder
/// ablations: without the structure head the weight head is used unmasked;
/// without the weight head the structure probability doubles as the weight.
enum class DecoderVariant { Full, NoStructure, NoWeight };

std::string_view to_string(DecoderVariant v);
DecoderVariant parse_decoder_variant(std::string_view s);

struct ModelConfig {
  std::size_t n = 35;
  std::size_t m = 15;
  std::size_t k = 1;
  std::size_t d_hidden = 32;
  std::size_t d_out = 16;
  std::size_t layers_encoder = 2;
  std::size_t layers_aggregator = 2;
  std::size_t decoder_hidden = 32;
  DecoderVariant decoder = DecoderVariant::Full;

  /// Throws Config on a non-positive field or m > n.
  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Named trainable tensors in a fixed order.
class ModelParams {
 public:
  void add(std::string name, Matrix value);

  std::size_t tensor_count() const noexcept { return tensors_.size(); }
  std::size_t scalar_count() const noexcept;
  const std::string& name(std::size_t i) const { return names_[i]; }
  const Matrix& tensor(std::size_t i) const { return tensors_[i]; }
  Matrix& tensor(std::size_t i) { return tensors_[i]; }
  const Matrix& at(std::string_view name) const;
  Matrix& at(std::string_view name);
  std::size_t index_of(std::string_view name) const;

  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<Matrix> tensors_;
};

/// Glorot-uniform weights, zero biases, from a SplitMix64 stream.
ModelParams init_params(const ModelConfig& config, std::uint64_t seed);

/// Glorot-uniform bound sqrt(6 / (fan_in + fan_out)).
double glorot_bound(std::size_t fan_in, std::size_t fan_out);

/// Edges (i, n + k) for every node i of subtree k, stored symmetrically in an
/// (n + m) x (n + m) 0/1 matrix. Rows < n are graph nodes.
struct BipartiteGraph {
  std::size_t n = 0;
  std::size_t m = 0;
  Matrix adj;
  std::size_t edge_count() const;
};

BipartiteGraph build_bipartite(std::size_t n, std::span<const Subtree> trees);

/// Everything about one input graph that does not depend on parameters.
struct PreparedGraph {
  Matrix features;                    // X: the adjacency rows (n x n)
  std::vector<Subtree> trees;
  std::vector<Matrix> tree_adj_norm;  // normalized tree adjacency per subtree
  std::vector<Matrix> tree_features;  // X_k: adjacency rows of subtree nodes
  BipartiteGraph bipartite;
  Matrix bipartite_norm;
};

PreparedGraph prepare(const WeightedGraph& g, const ModelConfig& config);
/// Same, with explicitly supplied subtrees (for ordering experiments).
PreparedGraph prepare(const WeightedGraph& g, std::vector<Subtree> trees);

/// Parameters bound as leaves of a tape, in ModelParams order.
struct BoundParams {
  std::vector<ad::Var> vars;
  const ModelParams* params = nullptr;
  ad::Var operator[](std::string_view name) const { return vars[params->index_of(name)]; }
};

/// Leaves when trainable, plain constants otherwise (inference).
BoundParams bind(ad::Tape& tape, const ModelParams& params, bool trainable = true);

/// relu(a_norm * h * w)
ad::Var gcn_layer(ad::Tape& t, ad::Var a_norm, ad::Var h, ad::Var w);

/// 1 x d_out embedding of subtree k of the prepared graph.
ad::Var encode_subtree(ad::Tape& t, const PreparedGraph& pg, std::size_t k, const BoundParams& p,
                       const ModelConfig& config);
/// m x d_out, row k = encode_subtree(k).
ad::Var encode_all(ad::Tape& t, const PreparedGraph& pg, const BoundParams& p, const ModelConfig& config);

struct Aggregated {
  ad::Var h_node;  // n x d_out
  ad::Var h_tree;  // m x d_out
};

Aggregated aggregate(ad::Tape& t, const PreparedGraph& pg, ad::Var tree_embeddings, const BoundParams& p,
                     const ModelConfig& config);

/// Rows enumerate pairs i<j lexicographically; columns [h_i, h_j, |h_i - h_j|].
ad::Var pair_features(ad::Tape& t, ad::Var h);

inline constexpr double kDiagonalLogit = -1e9;

struct DecodedVars {
  ad::Var logits;   // n x n, diagonal kDiagonalLogit
  ad::Var weights;  // n x n, diagonal 0
};

DecodedVars decode(ad::Tape& t, ad::Var h_node, const BoundParams& p, const ModelConfig& config);

/// Full forward pass on a tape.
DecodedVars forward(ad::Tape& t, const PreparedGraph& pg, const BoundParams& p, const ModelConfig& config);

struct DecodedGraph {
  Matrix logits;
  Matrix weights;
  WeightedGraph fused;
};

/// weights * 1[sigmoid(logit) >= 0.5] for the full model; see DecoderVariant
/// for the reduced variants.
WeightedGraph fuse(const Matrix& logits, const Matrix& weights, DecoderVariant variant);

DecodedGraph predict(const WeightedGraph& g, const ModelParams& params, const ModelConfig& config);
DecodedGraph predict(const PreparedGraph& pg, const ModelParams& params, const ModelConfig& config);

}  // namespace gtg
