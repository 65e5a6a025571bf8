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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gtg/graph.hpp"

namespace gtg {

/// Supervised target map applied before the structured perturbation.
enum class SynthTransform { Identity, Power };

std::string_view to_string(SynthTransform t);
SynthTransform parse_synth_transform(std::string_view s);

struct SynthConfig {
  std::size_t n_graphs = 341;
  std::size_t n = 35;
  std::size_t modules = 4;
  double p_in = 0.6;
  double p_out = 0.15;
  double noise_sigma = 0.05;
  SynthTransform transform = SynthTransform::Power;
  std::uint64_t seed = 42;
  std::size_t folds = 5;

  /// Throws Config.
  void validate() const;
  friend bool operator==(const SynthConfig&, const SynthConfig&) = default;
};

inline constexpr double kPowerExponent = 0.7;

/// Zero-padded pair id, "g000" style.
std::string pair_id(std::size_t index, std::size_t n_graphs);

/// Community of node i: contiguous, near-equal blocks.
std::size_t community_of(std::size_t i, std::size_t n, std::size_t modules);

struct SynthGraph {
  WeightedGraph source;
  WeightedGraph target;
  double scale_factor = 1.0;  // max raw weight divided out of the source
};

/// Fully determined by (cfg.seed, index).
SynthGraph generate(const SynthConfig& cfg, std::size_t index);
GraphPair generate_pair(const SynthConfig& cfg, std::size_t index);

/// Expected edge density of the block model.
double expected_density(const SynthConfig& cfg);

/// Writes <root>/source/<id>.csv, <root>/target/<id>.csv and manifest.json.
/// Returns the ids. Throws Io.
std::vector<std::string> write_dataset(const SynthConfig& cfg, const std::filesystem::path& root);

}  // namespace gtg
