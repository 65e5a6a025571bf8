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
#include "gtg/model.hpp"

#include <algorithm>
#include <cmath>

#include "gtg/error.hpp"
#include "gtg/rng.hpp"

namespace gtg {

std::string_view to_string(DecoderVariant v) {
  switch (v) {
    case DecoderVariant::Full: return "full";
    case DecoderVariant::NoStructure: return "no_struct";
    case DecoderVariant::NoWeight: return "no_weight";
  }
  return "full";
}

DecoderVariant parse_decoder_variant(std::string_view s) {
  if (s == "full") return DecoderVariant::Full;
  if (s == "no_struct") return DecoderVariant::NoStructure;
  if (s == "no_weight") return DecoderVariant::NoWeight;
  fail(ErrorKind::Config, "unknown decoder variant '" + std::string(s) + "' (full|no_struct|no_weight)");
}

void ModelConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) fail(ErrorKind::Config, std::string("model.") + name + " must be positive");
  };
  positive(n, "n");
  positive(m, "m");
  positive(k, "k");
  positive(d_hidden, "d_hidden");
  positive(d_out, "d_out");
  positive(layers_encoder, "layers_encoder");
  positive(layers_aggregator, "layers_aggregator");
  positive(decoder_hidden, "decoder_hidden");
  if (n < 2) fail(ErrorKind::Config, "model.n must be at least 2");
  if (m > n) fail(ErrorKind::Config, "model.m (" + std::to_string(m) + ") exceeds model.n (" + std::to_string(n) + ")");
}

// --- ModelParams

void ModelParams::add(std::string name, Matrix value) {
  names_.push_back(std::move(name));
  tensors_.push_back(std::move(value));
}

std::size_t ModelParams::scalar_count() const noexcept {
  std::size_t c = 0;
  for (const auto& t : tensors_) c += t.size();
  return c;
}

std::size_t ModelParams::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  fail(ErrorKind::InvalidArgument, "no parameter named " + std::string(name));
}

const Matrix& ModelParams::at(std::string_view name) const { return tensors_[index_of(name)]; }
Matrix& ModelParams::at(std::string_view name) { return tensors_[index_of(name)]; }

std::vector<double> ModelParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(scalar_count());
  for (const auto& t : tensors_) flat.insert(flat.end(), t.data().begin(), t.data().end());
  return flat;
}

void ModelParams::assign(std::span<const double> flat) {
  if (flat.size() != scalar_count()) fail(ErrorKind::ShapeMismatch, "ModelParams::assign: length mismatch");
  std::size_t off = 0;
  for (auto& t : tensors_) {
    std::copy_n(flat.begin() + off, t.size(), t.data().begin());
    off += t.size();
  }
}

double glorot_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

namespace {

std::vector<std::size_t> layer_dims(std::size_t in, std::size_t hidden, std::size_t out, std::size_t layers) {
  std::vector<std::size_t> dims{in};
  for (std::size_t l = 0; l + 1 < layers; ++l) dims.push_back(hidden);
  dims.push_back(out);
  return dims;
}

std::string layer_name(const char* prefix, std::size_t l) { return std::string(prefix) + std::to_string(l) + ".weight"; }

bool has_struct(DecoderVariant v) { return v != DecoderVariant::NoStructure; }
bool has_weight(DecoderVariant v) { return v != DecoderVariant::NoWeight; }

}  // namespace

ModelParams init_params(const ModelConfig& c, std::uint64_t seed) {
  c.validate();
  SplitMix64 rng(seed);
  auto glorot = [&](std::size_t in, std::size_t out) {
    Matrix w(in, out);
    const double b = glorot_bound(in, out);
    for (double& v : w.data()) v = rng.uniform(-b, b);
    return w;
  };
  ModelParams p;
  const auto enc = layer_dims(c.n, c.d_hidden, c.d_out, c.layers_encoder);
  for (std::size_t l = 0; l + 1 < enc.size(); ++l) p.add(layer_name("encoder.gcn", l), glorot(enc[l], enc[l + 1]));
  p.add("encoder.proj.weight", glorot(c.d_out, c.d_out));
  p.add("encoder.proj.bias", Matrix(1, c.d_out));
  p.add("aggregator.node_proj.weight", glorot(c.n, c.d_out));
  p.add("aggregator.tree_proj.weight", glorot(c.d_out, c.d_out));
  const auto agg = layer_dims(c.d_out, c.d_hidden, c.d_out, c.layers_aggregator);
  for (std::size_t l = 0; l + 1 < agg.size(); ++l)
    p.add(layer_name("aggregator.gcn", l), glorot(agg[l], agg[l + 1]));
  const std::size_t pair_dim = 3 * c.d_out;
  for (const char* branch : {"struct", "weight"}) {
    if (std::string_view(branch) == "struct" && !has_struct(c.decoder)) continue;
    if (std::string_view(branch) == "weight" && !has_weight(c.decoder)) continue;
    const std::string pre = std::string("decoder.") + branch;
    p.add(pre + ".fc1.weight", glorot(pair_dim, c.decoder_hidden));
    p.add(pre + ".fc1.bias", Matrix(1, c.decoder_hidden));
    p.add(pre + ".fc2.weight", glorot(c.decoder_hidden, 1));
    p.add(pre + ".fc2.bias", Matrix(1, 1));
  }
  return p;
}

// --- graph preparation

std::size_t BipartiteGraph::edge_count() const {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k) c += adj(i, n + k) != 0.0;
  return c;
}

BipartiteGraph build_bipartite(std::size_t n, std::span<const Subtree> trees) {
  BipartiteGraph b;
  b.n = n;
  b.m = trees.size();
  b.adj = Matrix(n + b.m, n + b.m);
  for (std::size_t k = 0; k < trees.size(); ++k)
    for (auto v : trees[k].nodes) {
      if (v >= n) fail(ErrorKind::InvalidArgument, "build_bipartite: node id out of range");
      b.adj(v, n + k) = 1.0;
      b.adj(n + k, v) = 1.0;
    }
  return b;
}

PreparedGraph prepare(const WeightedGraph& g, const ModelConfig& config) {
  if (g.n() != config.n)
    fail(ErrorKind::ShapeMismatch, "graph has " + std::to_string(g.n()) + " nodes, model expects " +
                                       std::to_string(config.n));
  return prepare(g, extract_all(g, config.m, config.k));
}

PreparedGraph prepare(const WeightedGraph& g, std::vector<Subtree> trees) {
  PreparedGraph pg;
  pg.features = g.adj();
  for (const auto& t : trees) {
    pg.tree_adj_norm.push_back(normalize_adjacency(t.local_adjacency()));
    Matrix x(t.nodes.size(), g.n());
    for (std::size_t r = 0; r < t.nodes.size(); ++r) std::copy_n(g.adj().row(t.nodes[r]).begin(), g.n(), x.row(r).begin());
    pg.tree_features.push_back(std::move(x));
  }
  pg.bipartite = build_bipartite(g.n(), trees);
  pg.bipartite_norm = normalize_adjacency(pg.bipartite.adj);
  pg.trees = std::move(trees);
  return pg;
}

BoundParams bind(ad::Tape& tape, const ModelParams& params, bool trainable) {
  BoundParams b;
  b.params = &params;
  b.vars.reserve(params.tensor_count());
  for (std::size_t i = 0; i < params.tensor_count(); ++i) b.vars.push_back(trainable ? tape.leaf(params.tensor(i)) : tape.constant(params.tensor(i)));
  return b;
}

// --- network

ad::Var gcn_layer(ad::Tape& t, ad::Var a_norm, ad::Var h, ad::Var w) {
  return ad::relu(t, ad::matmul(t, ad::matmul(t, a_norm, h), w));
}

ad::Var encode_subtree(ad::Tape& t, const PreparedGraph& pg, std::size_t k, const BoundParams& p,
                       const ModelConfig& config) {
  const auto a = t.constant(pg.tree_adj_norm.at(k));
  auto h = t.constant(pg.tree_features.at(k));
  for (std::size_t l = 0; l < config.layers_encoder; ++l) h = gcn_layer(t, a, h, p[layer_name("encoder.gcn", l)]);
  const auto pooled = ad::mean_rows(t, h);
  return ad::add_rowvec(t, ad::matmul(t, pooled, p["encoder.proj.weight"]), p["encoder.proj.bias"]);
}

ad::Var encode_all(ad::Tape& t, const PreparedGraph& pg, const BoundParams& p, const ModelConfig& config) {
  if (pg.trees.empty()) fail(ErrorKind::InvalidArgument, "encode_all: no subtrees");
  std::vector<ad::Var> rows;
  rows.reserve(pg.trees.size());
  for (std::size_t k = 0; k < pg.trees.size(); ++k) rows.push_back(encode_subtree(t, pg, k, p, config));
  return ad::concat_rows(t, rows);
}

Aggregated aggregate(ad::Tape& t, const PreparedGraph& pg, ad::Var tree_embeddings, const BoundParams& p,
                     const ModelConfig& config) {
  const std::size_t n = pg.bipartite.n;
  const auto x = t.constant(pg.features);
  const ad::Var parts[] = {ad::matmul(t, x, p["aggregator.node_proj.weight"]),
                           ad::matmul(t, tree_embeddings, p["aggregator.tree_proj.weight"])};
  auto h = ad::concat_rows(t, parts);
  const auto a = t.constant(pg.bipartite_norm);
  for (std::size_t l = 0; l < config.layers_aggregator; ++l) h = gcn_layer(t, a, h, p[layer_name("aggregator.gcn", l)]);
  return {ad::slice_rows(t, h, 0, n), ad::slice_rows(t, h, n, n + pg.bipartite.m)};
}

ad::Var pair_features(ad::Tape& t, ad::Var h) {
  const std::size_t n = t.value(h).rows();
  if (n < 2) fail(ErrorKind::ShapeMismatch, "pair_features: need at least 2 nodes");
  std::vector<std::size_t> first, second;
  first.reserve(n * (n - 1) / 2);
  second.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      first.push_back(i);
      second.push_back(j);
    }
  const auto hi = ad::gather_rows(t, h, std::move(first));
  const auto hj = ad::gather_rows(t, h, std::move(second));
  const ad::Var parts[] = {hi, hj, ad::abs(t, ad::sub(t, hi, hj))};
  return ad::concat_cols(t, parts);
}

namespace {

ad::Var mlp_head(ad::Tape& t, ad::Var phi, const BoundParams& p, const std::string& pre) {
  auto hidden = ad::relu(t, ad::add_rowvec(t, ad::matmul(t, phi, p[pre + ".fc1.weight"]), p[pre + ".fc1.bias"]));
  return ad::add_rowvec(t, ad::matmul(t, hidden, p[pre + ".fc2.weight"]), p[pre + ".fc2.bias"]);
}

}  // namespace

DecodedVars decode(ad::Tape& t, ad::Var h_node, const BoundParams& p, const ModelConfig& config) {
  const std::size_t n = t.value(h_node).rows();
  const auto phi = pair_features(t, h_node);
  const std::size_t pairs = t.value(phi).rows();
  DecodedVars out;
  ad::Var logit_pairs;
  if (has_struct(config.decoder)) logit_pairs = mlp_head(t, phi, p, "decoder.struct");
  else logit_pairs = t.constant(Matrix(pairs, 1));
  out.logits = ad::mirror_pairs(t, logit_pairs, n, kDiagonalLogit);

  ad::Var weight_pairs;
  if (has_weight(config.decoder)) weight_pairs = ad::sigmoid(t, mlp_head(t, phi, p, "decoder.weight"));
  else weight_pairs = ad::sigmoid(t, logit_pairs);
  out.weights = ad::mirror_pairs(t, weight_pairs, n, 0.0);
  return out;
}

DecodedVars forward(ad::Tape& t, const PreparedGraph& pg, const BoundParams& p, const ModelConfig& config) {
  const auto trees = encode_all(t, pg, p, config);
  const auto agg = aggregate(t, pg, trees, p, config);
  return decode(t, agg.h_node, p, config);
}

WeightedGraph fuse(const Matrix& logits, const Matrix& weights, DecoderVariant variant) {
  Matrix out(weights.rows(), weights.cols());
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) {
      if (i == j) continue;
      // sigmoid(l) >= 0.5 exactly when l >= 0.
      const bool edge = variant == DecoderVariant::NoStructure || logits(i, j) >= 0.0;
      out(i, j) = edge ? weights(i, j) : 0.0;
    }
  return WeightedGraph(std::move(out));
}

DecodedGraph predict(const PreparedGraph& pg, const ModelParams& params, const ModelConfig& config) {
  ad::Tape tape;
  const auto bound = bind(tape, params, false);
  const auto d = forward(tape, pg, bound, config);
  Matrix logits = tape.value(d.logits);
  Matrix weights = tape.value(d.weights);
  auto fused = fuse(logits, weights, config.decoder);
  return {std::move(logits), std::move(weights), std::move(fused)};
}

DecodedGraph predict(const WeightedGraph& g, const ModelParams& params, const ModelConfig& config) {
  return predict(prepare(g, config), params, config);
}

}  // namespace gtg
