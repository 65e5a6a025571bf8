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
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "gtg/error.hpp"
#include "gtg/synth.hpp"
#include "gtg/training.hpp"

using namespace gtg;

namespace {

std::vector<std::string> make_ids(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(pair_id(i, n));
  return ids;
}

ModelConfig small_model() {
  ModelConfig c;
  c.n = 10;
  c.m = 4;
  c.d_hidden = 8;
  c.d_out = 6;
  c.decoder_hidden = 8;
  return c;
}

SynthConfig small_synth(std::size_t n_graphs = 6) {
  SynthConfig s;
  s.n_graphs = n_graphs;
  s.n = 10;
  s.modules = 2;
  return s;
}

std::vector<TrainSample> samples(std::size_t count, TrainMode mode, const ModelConfig& c) {
  std::vector<TrainSample> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(make_sample(generate_pair(small_synth(count), i), mode, c));
  return out;
}

void check_partition(const FoldPlan& plan, const std::vector<std::string>& ids) {
  std::multiset<std::string> seen;
  for (const auto& f : plan.folds) seen.insert(f.begin(), f.end());
  CHECK(seen.size() == ids.size());
  CHECK(std::set<std::string>(seen.begin(), seen.end()) == std::set<std::string>(ids.begin(), ids.end()));
}

}  // namespace

TEST_CASE("kfold_split sizes, coverage and determinism") {
  const auto ten = make_ids(10);
  const auto p10 = kfold_split(ten, 5, 42);
  for (const auto& f : p10.folds) CHECK(f.size() == 2);
  check_partition(p10, ten);

  const auto ids = make_ids(341);
  const auto plan = kfold_split(ids, 5, 42);
  std::vector<std::size_t> sizes;
  for (const auto& f : plan.folds) sizes.push_back(f.size());
  CHECK(sizes == std::vector<std::size_t>{69, 68, 68, 68, 68});
  check_partition(plan, ids);
  CHECK(kfold_split(ids, 5, 42).folds == plan.folds);
  CHECK(kfold_split(ids, 5, 43).folds != plan.folds);

  CHECK_THROWS_AS(kfold_split(make_ids(3), 5, 1), Error);
  try {
    kfold_split(make_ids(3), 5, 1);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooFewSamples);
  }
}

TEST_CASE("fold rotation") {
  const auto plan = kfold_split(make_ids(10), 5, 7);
  const auto [train_ids, val_ids] = plan.rotation(2);
  CHECK(val_ids == plan.folds[2]);
  CHECK(train_ids.size() == 6);
  for (const auto& id : train_ids) {
    CHECK(std::find(val_ids.begin(), val_ids.end(), id) == val_ids.end());
    CHECK(std::find(plan.test().begin(), plan.test().end(), id) == plan.test().end());
  }
  CHECK(plan.non_test().size() == 8);
  CHECK_THROWS_AS(plan.rotation(0), Error);
  CHECK_THROWS_AS(plan.rotation(5), Error);
}

TEST_CASE("adam_step matches the bias-corrected update by hand") {
  ModelParams p;
  p.add("w", Matrix{{1.0, -2.0}});
  TrainConfig c;
  c.lr = 0.1;
  auto state = AdamState::zeros_like(p);
  const std::vector<Matrix> g1{Matrix{{0.5, -1.0}}}, g2{Matrix{{-0.25, 2.0}}};
  adam_step(p, g1, state, c);
  // First step: mhat = g, vhat = g^2, so theta -= lr * g / (|g| + eps).
  CHECK(p.at("w")(0, 0) == doctest::Approx(1.0 - 0.1 * 0.5 / (0.5 + 1e-8)).epsilon(1e-15));
  CHECK(p.at("w")(0, 1) == doctest::Approx(-2.0 + 0.1 * 1.0 / (1.0 + 1e-8)).epsilon(1e-15));
  adam_step(p, g2, state, c);
  for (int j = 0; j < 2; ++j) {
    const double a = g1[0](0, j), b = g2[0](0, j);
    const double m = 0.9 * (0.1 * a) + 0.1 * b, v = 0.999 * (0.001 * a * a) + 0.001 * b * b;
    const double mhat = m / (1 - 0.81), vhat = v / (1 - 0.999 * 0.999);
    const double first = (j == 0 ? 1.0 : -2.0) - 0.1 * a / (std::abs(a) + 1e-8);
    CHECK(p.at("w")(0, j) == doctest::Approx(first - 0.1 * mhat / (std::sqrt(vhat) + 1e-8)).epsilon(1e-14));
  }
  CHECK(state.step == 2);
}

TEST_CASE("adam_step rejects non-finite gradients and leaves parameters alone") {
  ModelParams p;
  p.add("w", Matrix{{1.0}});
  auto state = AdamState::zeros_like(p);
  const std::vector<Matrix> bad{Matrix{{std::numeric_limits<double>::quiet_NaN()}}};
  try {
    adam_step(p, bad, state, TrainConfig{});
    FAIL("expected NonFiniteGradient");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonFiniteGradient);
  }
  CHECK(p.at("w")(0, 0) == 1.0);
  CHECK(state.step == 0);
}

TEST_CASE("total_loss components and ablation terms") {
  const ModelConfig c = small_model();
  const auto s = samples(1, TrainMode::Supervised, c)[0];
  const auto params = init_params(c, 3);
  for (auto [alpha, beta] : {std::pair{10.0, 5.0}, std::pair{0.0, 1.0}, std::pair{1.0, 0.0}}) {
    ad::Tape t;
    const auto bp = bind(t, params, false);
    const auto loss = total_loss(t, forward(t, s.input, bp, c), s.target, alpha, beta);
    CHECK(t.value(loss.total)(0, 0) == doctest::Approx(alpha * loss.structure + beta * loss.weight).epsilon(1e-14));
    CHECK(loss.structure > 0.0);
    CHECK(loss.weight > 0.0);
  }
  ModelConfig ns = c;
  ns.decoder = DecoderVariant::NoStructure;
  const auto pns = init_params(ns, 3);
  ad::Tape t;
  const auto loss = total_loss(t, forward(t, s.input, bind(t, pns, false), ns), s.target, 10, 5, ns.decoder);
  CHECK(loss.structure == 0.0);
  CHECK(t.value(loss.total)(0, 0) == doctest::Approx(5 * loss.weight));
}

TEST_CASE("every parameter receives a gradient and moves after one step") {
  const ModelConfig c = small_model();
  const auto s = samples(1, TrainMode::Supervised, c);
  auto params = init_params(c, 1);
  const auto before = params;
  TrainConfig tc;
  const auto g = sample_gradient(params, s[0], c, tc);
  REQUIRE(g.grads.size() == params.tensor_count());
  auto state = AdamState::zeros_like(params);
  adam_step(params, g.grads, state, tc);
  for (std::size_t i = 0; i < params.tensor_count(); ++i) {
    INFO(params.name(i));
    double norm = 0.0;
    for (double v : g.grads[i].data()) norm += std::abs(v);
    CHECK(norm > 0.0);
    CHECK_FALSE(params.tensor(i) == before.tensor(i));
  }
}

TEST_CASE("whole-model gradients agree with finite differences") {
  const auto r = gradcheck_tiny();
  CHECK(r.max_rel_error < 1e-4);
  ad::set_fault(ad::Fault::SigmoidBackward);
  const auto bad = gradcheck_tiny();
  ad::set_fault(ad::Fault::None);
  CHECK(bad.max_rel_error > 1e-3);
}

TEST_CASE("training reduces the loss on a single pair") {
  const ModelConfig c = small_model();
  const auto s = samples(1, TrainMode::Overfit, c);
  TrainConfig tc;
  tc.epochs = 60;
  tc.lr = 1e-2;
  const auto r = train(s, s, tc, c);
  REQUIRE(r.history.size() == 60);
  CHECK(r.history.back().total < 0.75 * r.history.front().total);
  for (std::size_t e = 0; e < r.history.size(); ++e) CHECK(r.history[e].epoch == e + 1);
}

TEST_CASE("training is deterministic and independent of the thread count") {
  const ModelConfig c = small_model();
  const auto s = samples(6, TrainMode::Supervised, c);
  TrainConfig tc;
  tc.epochs = 3;
  tc.batch_size = 4;
  tc.threads = 1;
  const auto a = train(std::span(s).first(4), std::span(s).last(2), tc, c);
  tc.threads = 3;
  const auto b = train(std::span(s).first(4), std::span(s).last(2), tc, c);
  CHECK(a.params == b.params);
  CHECK(format_history_csv(a.history) == format_history_csv(b.history));
  tc.seed = 43;
  CHECK_FALSE(train(std::span(s).first(4), std::span(s).last(2), tc, c).params == a.params);
}

TEST_CASE("history CSV format") {
  TrainHistory h{{1, 1.5, 0.25, 0.125, 0.1}, {2, 1.0, 0.2, 0.1, std::numeric_limits<double>::quiet_NaN()}};
  const auto csv = format_history_csv(h);
  CHECK(csv.starts_with("epoch,total,struct,weight,val_mae\n1,1.5,0.25,0.125,0.1\n2,1,0.2,0.1,"));
  CHECK(csv.ends_with("nan\n"));
}

TEST_CASE("self-supervised samples reconstruct the source") {
  const ModelConfig c = small_model();
  const auto pair = generate_pair(small_synth(), 0);
  CHECK(make_sample(pair, TrainMode::SelfSupervised, c).target == pair.source);
  CHECK(make_sample(pair, TrainMode::Overfit, c).target == pair.source);
  CHECK(make_sample(pair, TrainMode::Supervised, c).target == pair.target);
}

TEST_CASE("config validation") {
  TrainConfig t;
  t.lr = 0.0;
  CHECK_THROWS_AS(t.validate(), Error);
  t = TrainConfig{};
  t.folds = 1;
  CHECK_THROWS_AS(t.validate(), Error);
  ModelConfig m;
  m.m = 36;
  CHECK_THROWS_AS(m.validate(), Error);
  CHECK_THROWS_AS(parse_train_mode("semi"), Error);
  CHECK(parse_train_mode(to_string(TrainMode::Overfit)) == TrainMode::Overfit);
}

TEST_CASE("weight loss over target edges only") {
  const Matrix target{{0, 0.5, 0}, {0.5, 0, 0.25}, {0, 0.25, 0}};
  const Matrix weights{{0, 0.25, 0.75}, {0.25, 0, 0.5}, {0.75, 0.5, 0}};
  const Matrix logits(3, 3);
  ad::Tape t;
  const DecodedVars d{t.constant(logits), t.constant(weights)};
  const auto all = total_loss(t, d, WeightedGraph(target), 0.0, 1.0);
  const auto edges =
      total_loss(t, d, WeightedGraph(target), 0.0, 1.0, DecoderVariant::Full, WeightLossSupport::TargetEdges);
  CHECK(all.weight == doctest::Approx((0.25 + 0.75 + 0.25) / 3.0));
  CHECK(edges.weight == doctest::Approx((0.25 + 0.25) / 2.0));

  const auto none = total_loss(t, d, WeightedGraph(Matrix(3, 3)), 1.0, 1.0, DecoderVariant::NoStructure,
                               WeightLossSupport::TargetEdges);
  CHECK(none.weight == 0.0);
  CHECK(t.value(none.total)(0, 0) == 0.0);
  CHECK(parse_weight_loss_support("target_edges") == WeightLossSupport::TargetEdges);
  CHECK_THROWS_AS(parse_weight_loss_support("edges"), Error);
}

TEST_CASE("adam examples") {
  ModelParams p;
  p.add("w", Matrix{{0.5, -0.5}});
  TrainConfig c;
  auto state = AdamState::zeros_like(p);
  adam_step(p, std::vector<Matrix>{Matrix{{1.0, 1.0}}}, state, c);
  CHECK(p.at("w")(0, 0) == doctest::Approx(0.5 - c.lr).epsilon(1e-9));

  ModelParams q;
  q.add("theta", Matrix{{1.0}});
  TrainConfig fast;
  fast.lr = 0.1;
  auto s = AdamState::zeros_like(q);
  for (int i = 0; i < 100; ++i) adam_step(q, std::vector<Matrix>{Matrix{{2.0 * q.at("theta")(0, 0)}}}, s, fast);
  CHECK(std::abs(q.at("theta")(0, 0)) < 0.05);

  ModelParams z;
  z.add("w", Matrix{{0.3}});
  auto sz = AdamState::zeros_like(z);
  adam_step(z, std::vector<Matrix>{Matrix{{0.0}}}, sz, c);
  CHECK(z.at("w")(0, 0) == 0.3);
}

TEST_CASE("loss examples") {
  const Matrix target{{0, 0.5, 0}, {0.5, 0, 0}, {0, 0, 0}};
  Matrix logits(3, 3, -20.0);
  logits(0, 1) = logits(1, 0) = 20.0;
  ad::Tape t;
  const auto perfect = total_loss(t, DecodedVars{t.constant(logits), t.constant(target)}, WeightedGraph(target), 10, 5);
  CHECK(t.value(perfect.total)(0, 0) < 1e-7);

  // N=3, one edge (0,1) of weight 0.5; logits all 0, weights all 0.25.
  const auto hand = total_loss(t, DecodedVars{t.constant(Matrix(3, 3)), t.constant(Matrix(3, 3, 0.25))},
                               WeightedGraph(target), 10, 5);
  const double bce = std::log(2.0), mae = (0.25 + 0.25 + 0.25) / 3.0;
  CHECK(hand.structure == doctest::Approx(bce).epsilon(1e-14));
  CHECK(hand.weight == doctest::Approx(mae).epsilon(1e-14));
  CHECK(t.value(hand.total)(0, 0) == doctest::Approx(10 * bce + 5 * mae).epsilon(1e-14));
}
