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
#include "gtg/training.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <thread>

#include "gtg/error.hpp"
#include "gtg/metrics.hpp"
#include "gtg/rng.hpp"
#include "gtg/synth.hpp"

namespace gtg {

std::string_view to_string(TrainMode m) {
  switch (m) {
    case TrainMode::SelfSupervised: return "self_supervised";
    case TrainMode::Supervised: return "supervised";
    case TrainMode::Overfit: return "overfit";
  }
  return "supervised";
}

std::string_view to_string(WeightLossSupport s) {
  return s == WeightLossSupport::TargetEdges ? "target_edges" : "all_pairs";
}

WeightLossSupport parse_weight_loss_support(std::string_view s) {
  if (s == "all_pairs") return WeightLossSupport::AllPairs;
  if (s == "target_edges") return WeightLossSupport::TargetEdges;
  fail(ErrorKind::Config, "unknown weight_loss '" + std::string(s) + "' (all_pairs|target_edges)");
}

TrainMode parse_train_mode(std::string_view s) {
  if (s == "self_supervised") return TrainMode::SelfSupervised;
  if (s == "supervised") return TrainMode::Supervised;
  if (s == "overfit") return TrainMode::Overfit;
  fail(ErrorKind::Config, "unknown mode '" + std::string(s) + "' (self_supervised|supervised|overfit)");
}

void TrainConfig::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) fail(ErrorKind::Config, "train.alpha and train.beta must be >= 0");
  if (!(lr > 0.0)) fail(ErrorKind::Config, "train.lr must be > 0");
  if (epochs < 1) fail(ErrorKind::Config, "train.epochs must be >= 1");
  if (batch_size < 1) fail(ErrorKind::Config, "train.batch_size must be >= 1");
  if (folds < 2) fail(ErrorKind::Config, "train.folds must be >= 2");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    fail(ErrorKind::Config, "train.adam_beta1/adam_beta2 must be in [0,1)");
  if (!(adam_eps > 0.0)) fail(ErrorKind::Config, "train.adam_eps must be > 0");
  if (!(clip_norm >= 0.0)) fail(ErrorKind::Config, "train.clip_norm must be >= 0");
}

LossVars total_loss(ad::Tape& t, const DecodedVars& decoded, const WeightedGraph& target, double alpha, double beta,
                    DecoderVariant variant, WeightLossSupport support) {
  const auto mask = ad::PairMask::upper_triangle(target.n());
  LossVars out;
  std::vector<ad::Var> terms;
  if (variant != DecoderVariant::NoStructure) {
    const auto bce = ad::bce_with_logits_masked(t, decoded.logits, binarize(target, 0.0), mask);
    out.structure = t.value(bce)(0, 0);
    terms.push_back(ad::scale(t, bce, alpha));
  }
  if (variant != DecoderVariant::NoWeight) {
    auto weight_mask = support == WeightLossSupport::TargetEdges ? ad::PairMask::upper_triangle_support(target.adj())
                                                                  : mask;
    const bool no_edges = weight_mask.empty();
    if (no_edges) weight_mask = mask;
    const auto mae = ad::mae_masked(t, decoded.weights, target.adj(), weight_mask);
    out.weight = no_edges ? 0.0 : t.value(mae)(0, 0);
    terms.push_back(ad::scale(t, mae, no_edges ? 0.0 : beta));
  }
  out.total = terms.size() == 1 ? terms[0] : ad::add(t, terms[0], terms[1]);
  return out;
}

AdamState AdamState::zeros_like(const ModelParams& p) {
  AdamState s;
  for (std::size_t i = 0; i < p.tensor_count(); ++i) {
    s.m.emplace_back(p.tensor(i).rows(), p.tensor(i).cols());
    s.v.emplace_back(p.tensor(i).rows(), p.tensor(i).cols());
  }
  return s;
}

void adam_step(ModelParams& params, std::span<const Matrix> grads, AdamState& state, const TrainConfig& c) {
  if (grads.size() != params.tensor_count() || state.m.size() != params.tensor_count())
    fail(ErrorKind::ShapeMismatch, "adam_step: gradient/state count does not match parameters");
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (grads[i].size() != params.tensor(i).size())
      fail(ErrorKind::ShapeMismatch, "adam_step: gradient shape mismatch for " + params.name(i));
    if (!grads[i].all_finite()) fail(ErrorKind::NonFiniteGradient, "non-finite gradient for " + params.name(i));
  }
  double scale = 1.0;
  if (c.clip_norm > 0.0) {
    double sq = 0.0;
    for (const auto& g : grads)
      for (double v : g.data()) sq += v * v;
    const double norm = std::sqrt(sq);
    if (norm > c.clip_norm) scale = c.clip_norm / norm;
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(c.adam_beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.adam_beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < grads.size(); ++i) {
    auto theta = params.tensor(i).data();
    auto m = state.m[i].data();
    auto v = state.v[i].data();
    auto g = grads[i].data();
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const double gj = g[j] * scale;
      m[j] = c.adam_beta1 * m[j] + (1.0 - c.adam_beta1) * gj;
      v[j] = c.adam_beta2 * v[j] + (1.0 - c.adam_beta2) * gj * gj;
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      theta[j] -= c.lr * mhat / (std::sqrt(vhat) + c.adam_eps);
    }
  }
}

TrainSample make_sample(const GraphPair& pair, TrainMode mode, const ModelConfig& config) {
  const bool self = mode != TrainMode::Supervised;
  return TrainSample{pair.id, prepare(pair.source, config), self ? pair.source : pair.target};
}

SampleGradient sample_gradient(const ModelParams& params, const TrainSample& sample, const ModelConfig& model,
                               const TrainConfig& train) {
  ad::Tape tape;
  const auto bound = bind(tape, params);
  const auto decoded = forward(tape, sample.input, bound, model);
  const auto loss = total_loss(tape, decoded, sample.target, train.alpha, train.beta, model.decoder, train.weight_loss);
  tape.backward(loss.total);
  SampleGradient out;
  out.total = tape.value(loss.total)(0, 0);
  out.structure = loss.structure;
  out.weight = loss.weight;
  out.grads.reserve(bound.vars.size());
  for (auto v : bound.vars) out.grads.push_back(tape.grad(v));
  return out;
}

ad::Objective loss_objective(const ModelParams& layout, const TrainSample& sample, const ModelConfig& model,
                             const TrainConfig& train) {
  return [layout, &sample, model, train](std::span<const double> theta, std::vector<double>* grad) {
    ModelParams p = layout;
    p.assign(theta);
    if (!grad) {
      ad::Tape tape;
      const auto bound = bind(tape, p, false);
      const auto decoded = forward(tape, sample.input, bound, model);
      const auto loss = total_loss(tape, decoded, sample.target, train.alpha, train.beta, model.decoder, train.weight_loss);
      return tape.value(loss.total)(0, 0);
    }
    auto sg = sample_gradient(p, sample, model, train);
    grad->clear();
    for (const auto& g : sg.grads) grad->insert(grad->end(), g.data().begin(), g.data().end());
    return sg.total;
  };
}

std::size_t default_thread_count() {
  if (const char* env = std::getenv("GTG_THREADS")) {
    std::size_t v = 0;
    const std::string_view s(env);
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec == std::errc{} && v > 0) return v;
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

namespace {

// Per-sample gradients for one batch. Samples may run on separate threads;
// results land in fixed slots so the later reduction order never changes.
std::vector<SampleGradient> batch_gradients(const ModelParams& params, std::span<const TrainSample> set,
                                            std::span<const std::size_t> batch, const ModelConfig& model,
                                            const TrainConfig& train) {
  std::vector<SampleGradient> out(batch.size());
  std::vector<std::exception_ptr> errors(batch.size());
  auto work = [&](std::size_t b) {
    try {
      out[b] = sample_gradient(params, set[batch[b]], model, train);
    } catch (...) {
      errors[b] = std::current_exception();
    }
  };
  const std::size_t wanted = train.threads == 0 ? default_thread_count() : std::min(train.threads, default_thread_count());
  const std::size_t threads = std::min(wanted, batch.size());
  if (threads <= 1) {
    for (std::size_t b = 0; b < batch.size(); ++b) work(b);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t b = w; b < batch.size(); b += threads) work(b);
      });
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace

double mean_fused_mae(const ModelParams& params, std::span<const TrainSample> samples, const ModelConfig& model) {
  if (samples.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (const auto& s : samples) sum += mae_edges(predict(s.input, params, model).fused, s.target);
  return sum / static_cast<double>(samples.size());
}

TrainResult train(std::span<const TrainSample> train_set, std::span<const TrainSample> val_set,
                  const TrainConfig& config, const ModelConfig& model, const EpochCallback& on_epoch) {
  config.validate();
  model.validate();
  if (train_set.empty()) fail(ErrorKind::InvalidArgument, "train: empty training set");
  TrainResult result{init_params(model, config.seed), {}};
  auto& params = result.params;
  AdamState state = AdamState::zeros_like(params);
  SplitMix64 shuffle_rng(derive_seed(config.seed, 2));
  std::vector<std::size_t> order(train_set.size());

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    EpochRecord rec;
    rec.epoch = epoch;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::span<const std::size_t> batch(order.data() + start, end - start);
      std::vector<SampleGradient> per_sample;
      try {
        per_sample = batch_gradients(params, train_set, batch, model, config);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NonFinite) throw;
        fail(ErrorKind::NonFiniteGradient, "epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch_index) +
                                               ": " + e.what());
      }
      std::vector<Matrix> grads = std::move(per_sample[0].grads);
      for (std::size_t b = 1; b < per_sample.size(); ++b)
        for (std::size_t i = 0; i < grads.size(); ++i) {
          auto dst = grads[i].data();
          auto src = per_sample[b].grads[i].data();
          for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
        }
      const double inv = 1.0 / static_cast<double>(per_sample.size());
      for (auto& g : grads)
        for (double& v : g.data()) v *= inv;
      for (const auto& s : per_sample) {
        rec.total += s.total;
        rec.structure += s.structure;
        rec.weight += s.weight;
      }
      try {
        adam_step(params, grads, state, config);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NonFiniteGradient) throw;
        fail(ErrorKind::NonFiniteGradient, "epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch_index) +
                                               ": " + e.what());
      }
    }
    const double inv_n = 1.0 / static_cast<double>(train_set.size());
    rec.total *= inv_n;
    rec.structure *= inv_n;
    rec.weight *= inv_n;
    rec.val_mae = mean_fused_mae(params, val_set, model);
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  return result;
}

namespace {

void append_value(std::string& out, double v) {
  if (std::isnan(v)) {
    out += "nan";
    return;
  }
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
  out.append(buf, res.ptr);
}

}  // namespace

std::string format_history_csv(const TrainHistory& history) {
  std::string out = "epoch,total,struct,weight,val_mae\n";
  for (const auto& r : history) {
    out += std::to_string(r.epoch);
    for (double v : {r.total, r.structure, r.weight, r.val_mae}) {
      out.push_back(',');
      append_value(out, v);
    }
    out.push_back('\n');
  }
  return out;
}

std::pair<std::vector<std::string>, std::vector<std::string>> FoldPlan::rotation(std::size_t r) const {
  if (r == 0 || r >= folds.size())
    fail(ErrorKind::InvalidArgument, "fold rotation must be in 1.." + std::to_string(folds.size() - 1));
  std::vector<std::string> train_ids;
  for (std::size_t f = 1; f < folds.size(); ++f)
    if (f != r) train_ids.insert(train_ids.end(), folds[f].begin(), folds[f].end());
  return {train_ids, folds[r]};
}

std::vector<std::string> FoldPlan::non_test() const {
  std::vector<std::string> ids;
  for (std::size_t f = 1; f < folds.size(); ++f) ids.insert(ids.end(), folds[f].begin(), folds[f].end());
  return ids;
}

FoldPlan kfold_split(std::span<const std::string> ids, std::size_t k, std::uint64_t seed) {
  if (k < 2) fail(ErrorKind::InvalidArgument, "kfold_split: k must be >= 2");
  if (ids.size() < k)
    fail(ErrorKind::TooFewSamples, "TooFewSamples: " + std::to_string(ids.size()) + " ids for " + std::to_string(k) +
                                       " folds");
  std::vector<std::string> shuffled(ids.begin(), ids.end());
  SplitMix64 rng(derive_seed(seed, 3));
  rng.shuffle(std::span<std::string>(shuffled));
  FoldPlan plan;
  const std::size_t base = ids.size() / k, extra = ids.size() % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t len = base + (f < extra ? 1 : 0);
    plan.folds.emplace_back(shuffled.begin() + pos, shuffled.begin() + pos + len);
    pos += len;
  }
  return plan;
}

ModelConfig tiny_model_config() {
  ModelConfig c;
  c.n = 6;
  c.m = 2;
  c.k = 1;
  c.d_hidden = 4;
  c.d_out = 4;
  c.decoder_hidden = 4;
  return c;
}

ad::GradCheckResult gradcheck_tiny(double h, std::uint64_t seed) {
  const ModelConfig model = tiny_model_config();
  SynthConfig synth;
  synth.n_graphs = 1;
  synth.n = model.n;
  synth.modules = 2;
  synth.p_in = 0.8;
  synth.p_out = 0.3;
  synth.seed = seed;
  const TrainSample sample = make_sample(generate_pair(synth, 0), TrainMode::Supervised, model);
  const ModelParams params = init_params(model, seed);
  TrainConfig train;
  train.seed = seed;
  return ad::grad_check(loss_objective(params, sample, model, train), params.flatten(), h);
}

}  // namespace gtg
