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

// JSON documents: checkpoints, dataset manifests and run configs. Config
// objects accept any subset of their fields and reject unknown keys.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gtg/model.hpp"
#include "gtg/synth.hpp"
#include "gtg/training.hpp"

namespace gtg {

using Json = nlohmann::ordered_json;

Json to_json(const ModelConfig& c);
Json to_json(const TrainConfig& c);
Json to_json(const SynthConfig& c);

/// Fields missing from j keep the values already in base.
ModelConfig model_config_from_json(const Json& j, ModelConfig base = {});
TrainConfig train_config_from_json(const Json& j, TrainConfig base = {});
SynthConfig synth_config_from_json(const Json& j, SynthConfig base = {});

std::string read_text(const std::filesystem::path& path);
void write_text(const std::string& text, const std::filesystem::path& path);

/// Throws Config on malformed JSON.
Json parse_json(std::string_view text, std::string_view what);

// --- checkpoint: {config, seed, tensors: {name: {shape, data}}}

struct Checkpoint {
  ModelConfig config;
  std::uint64_t seed = 0;
  ModelParams params;
  std::optional<TrainMode> mode;  // written as a top-level "mode" when set
};

std::string format_checkpoint(const Checkpoint& c);
/// Checks the tensor names and shapes against init_params(config).
Checkpoint parse_checkpoint(std::string_view text);
void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// --- dataset manifest: {ids, seed, cfg, scale_factors, splits}

struct Manifest {
  std::vector<std::string> ids;
  std::uint64_t seed = 0;
  SynthConfig synth;
  std::vector<double> scale_factors;  // parallel to ids
  FoldPlan splits;
};

std::string format_manifest(const Manifest& m);
Manifest parse_manifest(std::string_view text);
void save_manifest(const Manifest& m, const std::filesystem::path& path);
Manifest load_manifest(const std::filesystem::path& path);

std::string format_folds(const FoldPlan& plan);

/// Reads <root>/source/<id>.csv and <root>/target/<id>.csv.
GraphPair load_pair(const std::filesystem::path& root, const std::string& id);

/// "test" (fold 0), "train" (every other fold), "all", or "fold<r>".
std::vector<std::string> split_ids(const Manifest& m, std::string_view split);

// --- run config

struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  bool epochs_set = false;  // train.epochs given explicitly
  TrainMode mode = TrainMode::SelfSupervised;
  std::filesystem::path data_root;  // absolute, or relative to the config file
  std::filesystem::path out_dir;
  SynthConfig synth;
};

/// base_dir resolves relative paths.
RunConfig run_config_from_json(const Json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace gtg
