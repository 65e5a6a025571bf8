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
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gtg/autodiff.hpp"
#include "gtg/graph.hpp"
#include "gtg/model.hpp"

namespace gtg {

enum class TrainMode { SelfSupervised, Supervised, Overfit };

std::string_view to_string(TrainMode m);
TrainMode parse_train_mode(std::string_view s);

/// Pairs the weight MAE is taken over: every upper-triangle pair, or only the
/// target's edges.
enum class WeightLossSupport { AllPairs, TargetEdges };

std::string_view to_string(WeightLossSupport s);
WeightLossSupport parse_weight_loss_support(std::string_view s);

struct TrainConfig {
  double alpha = 10.0;
  double beta = 5.0;
  double lr = 1e-3;
  std::size_t batch_size = 8;
  std::size_t epochs = 50;
  std::uint64_t seed = 42;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t folds = 5;
  double clip_norm = 0.0;   // global gradient-norm clip; 0 disables
  std::size_t threads = 0;  // per-sample parallelism inside a batch; 0 = auto, capped by GTG_THREADS
  WeightLossSupport weight_loss = WeightLossSupport::AllPairs;

  void validate() const;
};

// --- loss

struct LossVars {
  ad::Var total;
  double structure = 0.0;  // BCE over the strict upper triangle
  double weight = 0.0;     // MAE over the strict upper triangle
};

/// alpha * BCE(logits, binarize(target)) + beta * MAE(weights, target). A
/// decoder without a structure head drops the BCE term, one without a weight
/// head drops the MAE term. With TargetEdges support an edgeless target
/// contributes no MAE term.
LossVars total_loss(ad::Tape& t, const DecodedVars& decoded, const WeightedGraph& target, double alpha, double beta,
                    DecoderVariant variant = DecoderVariant::Full,
                    WeightLossSupport support = WeightLossSupport::AllPairs);

// --- optimizer

struct AdamState {
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  std::uint64_t step = 0;

  static AdamState zeros_like(const ModelParams& p);
};

/// One bias-corrected Adam update. Throws NonFiniteGradient.
void adam_step(ModelParams& params, std::span<const Matrix> grads, AdamState& state, const TrainConfig& config);

// --- per-sample gradients

struct TrainSample {
  std::string id;
  PreparedGraph input;
  WeightedGraph target;
};

TrainSample make_sample(const GraphPair& pair, TrainMode mode, const ModelConfig& config);

struct SampleGradient {
  double total = 0.0;
  double structure = 0.0;
  double weight = 0.0;
  std::vector<Matrix> grads;  // ModelParams order
};

SampleGradient sample_gradient(const ModelParams& params, const TrainSample& sample, const ModelConfig& model,
                               const TrainConfig& train);

/// Loss of one sample as a function of the flattened parameters, for
/// grad_check.
ad::Objective loss_objective(const ModelParams& layout, const TrainSample& sample, const ModelConfig& model,
                             const TrainConfig& train);

// --- training loop

struct EpochRecord {
  std::size_t epoch = 0;
  double total = 0.0;
  double structure = 0.0;
  double weight = 0.0;
  double val_mae = 0.0;  // fused edge MAE on the validation set, NaN if none
};

using TrainHistory = std::vector<EpochRecord>;
using EpochCallback = std::function<void(const EpochRecord&)>;

struct TrainResult {
  ModelParams params;
  TrainHistory history;
};

/// Deterministic given the seed: init_params(seed), seeded per-epoch shuffle,
/// batches of batch_size (last partial batch kept), batch gradient = mean of
/// per-sample gradients summed in batch order, one Adam step per batch.
TrainResult train(std::span<const TrainSample> train_set, std::span<const TrainSample> val_set,
                  const TrainConfig& config, const ModelConfig& model, const EpochCallback& on_epoch = {});

/// Fused-output edge MAE averaged over samples.
double mean_fused_mae(const ModelParams& params, std::span<const TrainSample> samples, const ModelConfig& model);

std::string format_history_csv(const TrainHistory& history);

// --- cross-validation split

struct FoldPlan {
  std::vector<std::vector<std::string>> folds;  // folds[0] is the held-out test fold

  const std::vector<std::string>& test() const { return folds.at(0); }
  /// Rotation r in 1..folds-1: returns (training ids, validation ids) with
  /// validation = folds[r] and training = the other non-test folds.
  std::pair<std::vector<std::string>, std::vector<std::string>> rotation(std::size_t r) const;
  /// Every id outside the test fold.
  std::vector<std::string> non_test() const;
};

/// Seeded shuffle then contiguous chunking; the first (|ids| mod k) folds take
/// one extra id. Throws TooFewSamples when |ids| < k.
FoldPlan kfold_split(std::span<const std::string> ids, std::size_t k, std::uint64_t seed);

// --- whole-model gradient check

/// n=6, m=2, k=1 and every width 4.
ModelConfig tiny_model_config();

/// Central-difference check of every parameter of a seeded tiny model on a
/// seeded supervised synthetic pair.
ad::GradCheckResult gradcheck_tiny(double h = 1e-5, std::uint64_t seed = 42);

/// Upper bound on worker threads: GTG_THREADS if set and positive, otherwise
/// the hardware concurrency.
std::size_t default_thread_count();

}  // namespace gtg
