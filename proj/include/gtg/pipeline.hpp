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

// End-to-end runs over a dataset directory: train, predict, evaluate.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gtg/io.hpp"
#include "gtg/metrics.hpp"

namespace gtg {

using ProgressFn = std::function<void(std::string_view)>;

inline constexpr std::size_t kOverfitEpochs = 500;

struct TrainRequest {
  RunConfig config;
  std::optional<TrainMode> mode;
  std::optional<std::filesystem::path> data_root;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::size_t fold = 1;  // validation fold; training uses the other non-test folds
  ProgressFn progress;
};

struct TrainOutcome {
  Checkpoint checkpoint;
  TrainHistory history;
  std::filesystem::path out_dir;
};

/// Writes checkpoint.json, history.csv and folds.json into the output
/// directory. Overfit mode trains and validates on the first manifest id with
/// the source as target, for kOverfitEpochs unless epochs were set.
TrainOutcome run_training(const TrainRequest& request);

/// fused.csv, weights.csv and logits.csv.
void write_prediction(const DecodedGraph& d, const std::filesystem::path& dir);

struct EvaluateRequest {
  std::optional<std::filesystem::path> checkpoint;
  std::optional<std::filesystem::path> predictions;  // <dir>/<id>.csv instead of a model
  std::filesystem::path data_root;
  std::string split = "test";
  ScoredOutput which = ScoredOutput::Fused;
  std::filesystem::path out;
  ProgressFn progress;
};

struct EvaluateOutcome {
  std::vector<std::string> ids;
  std::vector<MetricReport> reports;
};

/// Scores each pair of the split and writes the report CSV. Models trained
/// self-supervised are scored against the source graph.
EvaluateOutcome run_evaluation(const EvaluateRequest& request);

std::string format_report_csv(const std::vector<std::string>& ids, const std::vector<MetricReport>& reports);

/// {"m", "k", "ranking": {"scores", "order"}, "subtrees": [{root, nodes,
/// edges: [[parent, child, weight]]}]}
std::string subtrees_json(const WeightedGraph& g, std::size_t m, std::size_t k);

}  // namespace gtg
