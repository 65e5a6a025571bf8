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

// Acceptance suite. One PASS/FAIL line per criterion; exit status 0 only when
// every selected criterion passes. Arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "../tests/oracles.hpp"
#include "../tests/support.hpp"
#include "gtg/io.hpp"
#include "gtg/metrics.hpp"
#include "gtg/model.hpp"
#include "gtg/pipeline.hpp"
#include "gtg/subtree.hpp"
#include "gtg/synth.hpp"
#include "gtg/training.hpp"

namespace {

using namespace gtg;
using Clock = std::chrono::steady_clock;

// Pinned tolerances and limits.
constexpr double kGradTol = 1e-4;
constexpr double kGradSeconds = 10.0;
constexpr double kOverfitMae = 0.02;
constexpr double kOverfitBce = 0.05;
constexpr double kOverfitSeconds = 120.0;
constexpr std::size_t kOverfitEpochRun = 500;
constexpr std::size_t kAblationPairs = 40;
constexpr std::size_t kAblationEpochs = 50;
constexpr std::uint64_t kAblationSeeds[] = {42, 43, 44, 45, 46};
constexpr std::size_t kAblationStrictWins = 4;
constexpr double kAblationSeconds = 900.0;
constexpr double kOracleTol = 1e-6;
constexpr std::size_t kOracleGraphs = 100;
constexpr double kOracleSeconds = 60.0;
constexpr double kIdentityTol = 1e-9;
constexpr std::size_t kIdentityGraphs = 20;
constexpr std::size_t kDecodeSettings = 200;
constexpr std::size_t kDeterminismPairs = 341;
constexpr std::size_t kDeterminismEpochs = 50;
constexpr std::size_t kSubtreeGraphs = 100;
constexpr double kEntropyTol = 1e-12;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// 1
Outcome gradient_check() {
  const auto t0 = Clock::now();
  const auto r = gradcheck_tiny(1e-5, 42);
  const double s = seconds_since(t0);
  return {r.max_rel_error < kGradTol && s < kGradSeconds,
          fmt("max_rel_error=%.3e (< %.0e), %.2f s (< %.0f s)", r.max_rel_error, kGradTol, s, kGradSeconds)};
}

// 2
Outcome overfit() {
  const auto t0 = Clock::now();
  const ModelConfig model;
  TrainConfig cfg;
  cfg.epochs = kOverfitEpochRun;
  const std::vector<TrainSample> one{make_sample(generate_pair(SynthConfig{}, 0), TrainMode::Overfit, model)};
  const auto r = train(one, one, cfg, model);
  const double mae = mean_fused_mae(r.params, one, model);
  const double bce = r.history.back().structure;
  const double s = seconds_since(t0);
  return {mae < kOverfitMae && bce < kOverfitBce && s < kOverfitSeconds,
          fmt("fused_mae=%.5f (< %.2f), bce=%.5f (< %.2f), loss %.4f -> %.4f, %.1f s (< %.0f s)", mae, kOverfitMae, bce,
              kOverfitBce, r.history.front().total, r.history.back().total, s, kOverfitSeconds)};
}

// 3
Outcome ablation() {
  const auto t0 = Clock::now();
  SynthConfig synth;
  synth.n_graphs = kAblationPairs;
  std::vector<std::string> ids;
  std::vector<GraphPair> pairs;
  for (std::size_t i = 0; i < kAblationPairs; ++i) {
    ids.push_back(pair_id(i, kAblationPairs));
    pairs.push_back(generate_pair(synth, i));
  }
  const auto plan = kfold_split(ids, synth.folds, synth.seed);
  const auto [train_ids, val_ids] = plan.rotation(1);
  auto pick = [&](const std::vector<std::string>& want, const ModelConfig& m) {
    std::vector<TrainSample> out;
    for (const auto& id : want) {
      const auto pos = std::find(ids.begin(), ids.end(), id) - ids.begin();
      out.push_back(make_sample(pairs[static_cast<std::size_t>(pos)], TrainMode::Supervised, m));
    }
    return out;
  };
  const DecoderVariant variants[] = {DecoderVariant::Full, DecoderVariant::NoWeight, DecoderVariant::NoStructure};
  std::vector<std::array<double, 3>> mae;
  std::size_t wins = 0;
  for (auto seed : kAblationSeeds) {
    std::array<double, 3> row{};
    for (std::size_t v = 0; v < 3; ++v) {
      ModelConfig m;
      m.decoder = variants[v];
      TrainConfig cfg;
      cfg.seed = seed;
      cfg.epochs = kAblationEpochs;
      const auto r = train(pick(train_ids, m), pick(val_ids, m), cfg, m);
      row[v] = mean_fused_mae(r.params, pick(plan.test(), m), m);
    }
    if (row[0] < row[1] && row[0] < row[2]) ++wins;
    std::printf("      seed %llu: full=%.5f no_weight=%.5f no_struct=%.5f\n", static_cast<unsigned long long>(seed),
                row[0], row[1], row[2]);
    mae.push_back(row);
  }
  std::array<double, 3> mean{};
  for (const auto& row : mae)
    for (std::size_t v = 0; v < 3; ++v) mean[v] += row[v] / static_cast<double>(mae.size());
  const double s = seconds_since(t0);
  const bool margins = mean[1] - mean[0] >= 0.0 && mean[2] - mean[0] >= 0.0;
  return {margins && wins >= kAblationStrictWins && s < kAblationSeconds,
          fmt("mean full=%.5f no_weight=%.5f no_struct=%.5f, strict wins %zu/5 (>= %zu), %.1f s (< %.0f s)", mean[0],
              mean[1], mean[2], wins, kAblationStrictWins, s, kAblationSeconds)};
}

double worst(const std::vector<double>& a, const std::vector<double>& b) { return testing::max_abs_diff(a, b); }

// 4
Outcome metric_oracles() {
  const auto t0 = Clock::now();
  double err = 0.0;
  for (std::uint64_t seed = 0, draw = 0; seed < kOracleGraphs; ++seed) {
    const std::size_t n = 3 + seed % 6;
    // Eigenvector centrality is undefined without edges, so edgeless draws are skipped.
    WeightedGraph g = testing::random_graph(n, 0.25 + 0.1 * static_cast<double>(seed % 5), draw++, seed % 4 != 0);
    while (binarize(g).edge_count() == 0) g = testing::random_graph(n, 0.5, draw++, seed % 4 != 0);
    const auto h = testing::random_graph(n, 0.5, seed + 7919);
    err = std::max({err, worst(degree_centrality(g), oracle::degree(g)),
                    worst(betweenness_centrality(g), oracle::betweenness(g)),
                    worst(eigenvector_centrality(g), oracle::eigenvector(g)),
                    worst(information_centrality(g).values, oracle::information(g)),
                    worst(pagerank(g), oracle::pagerank(g)), worst(katz_centrality(g), oracle::katz(g)),
                    worst(laplacian_centrality(g), oracle::laplacian_centrality(g)),
                    worst(clustering_coefficients(g), oracle::clustering(g)),
                    std::abs(clustering_difference(g, h) - oracle::clustering_difference(g, h)),
                    std::abs(laplacian_frobenius(g, h) - oracle::laplacian_frobenius(g, h))});
    const auto report = evaluate_all(g, h, ScoredOutput::Fused);
    const auto want = oracle::evaluate(g, h);
    for (std::size_t m = 0; m < MetricReport::kCount; ++m) err = std::max(err, std::abs(report.values[m] - want[m]));
    if (std::isnan(err)) break;
  }
  const double s = seconds_since(t0);
  return {err <= kOracleTol && s < kOracleSeconds,
          fmt("max deviation %.3e (<= %.0e) over %zu graphs, %.2f s (< %.0f s)", err, kOracleTol, kOracleGraphs, s,
              kOracleSeconds)};
}

// 5
Outcome zero_identity() {
  double worst_value = 0.0;
  for (std::uint64_t i = 0; i < kIdentityGraphs; ++i) {
    const auto g = i % 2 == 0 ? testing::random_graph(8 + i, 0.3, i, i % 4 != 0) : generate(SynthConfig{}, i).source;
    for (double v : evaluate_all(g, g, ScoredOutput::Fused).values)
      worst_value = std::isnan(v) ? INFINITY : std::max(worst_value, v);
  }
  return {worst_value <= kIdentityTol, fmt("largest metric %.3e (<= %.0e) over %zu graphs", worst_value, kIdentityTol,
                                           kIdentityGraphs)};
}

// 6
Outcome decode_invariants() {
  std::size_t bad = 0;
  SplitMix64 rng(2026);
  for (std::size_t s = 0; s < kDecodeSettings; ++s) {
    ModelConfig c;
    c.n = 4 + rng.next() % 9;
    c.m = 1 + rng.next() % c.n;
    c.k = 1 + rng.next() % 2;
    c.d_hidden = 2 + rng.next() % 7;
    c.d_out = 2 + rng.next() % 7;
    c.decoder_hidden = 2 + rng.next() % 7;
    const auto g = testing::random_graph(c.n, 0.2 + 0.6 * rng.uniform(0, 1), rng.next(), s % 3 != 0);
    const auto d = predict(g, init_params(c, rng.next()), c);
    for (std::size_t i = 0; i < c.n; ++i) {
      if (d.logits(i, i) != kDiagonalLogit || d.weights(i, i) != 0.0) ++bad;
      for (std::size_t j = 0; j < c.n; ++j) {
        if (d.logits(i, j) != d.logits(j, i) || d.weights(i, j) != d.weights(j, i)) ++bad;
        if (i != j && !(d.weights(i, j) > 0.0 && d.weights(i, j) < 1.0)) ++bad;
      }
    }
  }
  return {bad == 0, fmt("%zu violations over %zu parameter settings", bad, kDecodeSettings)};
}

// 7
Outcome determinism() {
  const auto root = testing::scratch_dir("acceptance_det");
  SynthConfig synth;
  synth.n_graphs = kDeterminismPairs;
  write_dataset(synth, root / "data");
  std::string hist[2], report[2];
  const std::size_t threads[2] = {1, 3};
  for (int r = 0; r < 2; ++r) {
    TrainRequest req;
    req.config.train.epochs = kDeterminismEpochs;
    req.config.train.threads = threads[r];
    req.config.mode = TrainMode::Supervised;
    req.data_root = root / "data";
    req.out_dir = root / ("run" + std::to_string(r));
    req.seed = 42;
    run_training(req);
    EvaluateRequest ev;
    ev.checkpoint = *req.out_dir / "checkpoint.json";
    ev.data_root = root / "data";
    ev.out = *req.out_dir / "report.csv";
    run_evaluation(ev);
    hist[r] = read_text(*req.out_dir / "history.csv");
    report[r] = read_text(ev.out);
  }
  std::filesystem::remove_all(root);
  const bool same = hist[0] == hist[1] && report[0] == report[1];
  return {same, fmt("history.csv %s (%zu bytes), report.csv %s (%zu bytes); %zu pairs, %zu epochs, 1 vs 3 threads",
                    hist[0] == hist[1] ? "identical" : "DIFFERENT", hist[0].size(),
                    report[0] == report[1] ? "identical" : "DIFFERENT", report[0].size(), kDeterminismPairs,
                    kDeterminismEpochs)};
}

// Entropy straight from the definition.
double entropy(const WeightedGraph& g, std::size_t v) {
  double total = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) total += g(v, j);
  double h = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j)
    if (g(v, j) > 0.0) h -= g(v, j) / total * std::log(g(v, j) / total);
  return h;
}

// 8
Outcome subtrees() {
  std::size_t broken = 0, mismatched = 0;
  double drift = 0.0;
  for (std::uint64_t seed = 0; seed < kSubtreeGraphs; ++seed) {
    const std::size_t n = 5 + seed % 12;
    const auto g = testing::random_graph(n, 0.15 + 0.05 * static_cast<double>(seed % 8), seed, seed % 3 != 0);
    for (std::size_t k = 1; k <= 3; ++k)
      for (const auto& t : extract_all(g, n, k))
        if (!check_subtree(t, g).empty()) ++broken;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> h(n);
    for (std::size_t v = 0; v < n; ++v) h[v] = entropy(g, v);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return h[a] > h[b]; });
    const std::size_t m = 1 + seed % n;
    const auto sel = select_roots(g, m);
    if (!std::equal(sel.order.begin(), sel.order.end(), order.begin())) ++mismatched;

    Matrix scaled = g.adj();
    const double c = 0.01 + 37.0 * static_cast<double>(seed % 7);
    for (double& w : scaled.data()) w *= c;
    const auto a = rank_roots(g), b = rank_roots(WeightedGraph(scaled));
    drift = std::max(drift, testing::max_abs_diff(a.scores, b.scores));
  }
  return {broken == 0 && mismatched == 0 && drift <= kEntropyTol,
          fmt("%zu broken trees, %zu ranking mismatches over %zu graphs, scale drift %.1e (<= %.0e)", broken,
              mismatched, kSubtreeGraphs, drift, kEntropyTol)};
}

// 9
Outcome fold_shape() {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < 341; ++i) ids.push_back(pair_id(i, 341));
  const auto plan = kfold_split(ids, 5, 42);
  std::vector<std::size_t> sizes;
  std::multiset<std::string> seen;
  for (const auto& f : plan.folds) {
    sizes.push_back(f.size());
    seen.insert(f.begin(), f.end());
  }
  const bool covering = std::set<std::string>(seen.begin(), seen.end()) == std::set<std::string>(ids.begin(), ids.end());
  const bool disjoint = seen.size() == ids.size();
  const bool shape = sizes == std::vector<std::size_t>{69, 68, 68, 68, 68};
  std::string sz;
  for (auto v : sizes) sz += (sz.empty() ? "" : ",") + std::to_string(v);
  return {shape && covering && disjoint,
          fmt("sizes {%s}, %s, %s", sz.c_str(), disjoint ? "disjoint" : "OVERLAPPING", covering ? "covering" : "INCOMPLETE")};
}

struct Criterion {
  int number;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "gradient check", gradient_check},   {2, "overfit convergence", overfit},
      {3, "ablation direction", ablation},     {4, "metric oracles", metric_oracles},
      {5, "metric zero identity", zero_identity}, {6, "decode invariants", decode_invariants},
      {7, "determinism", determinism},         {8, "subtree correctness", subtrees},
      {9, "fold shape", fold_shape}};
  std::set<int> chosen;
  for (int i = 1; i < argc; ++i) chosen.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : all) {
    if (!chosen.empty() && !chosen.contains(c.number)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.number, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
