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

// gtg: command-line front end over libgtg. Results go to files, progress to
// stderr. Exit codes: 0 ok, 2 config/usage, 3 IO, 4 divergence, 5 check
// failure.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gtg/gtg.h"

namespace {

constexpr double kGradTolerance = 1e-4;

int report(gtg_status s) {
  if (s == GTG_OK) return 0;
  std::fprintf(stderr, "gtg: %s\n", gtg_last_error());
  return s == GTG_ERR_NUMERIC ? 1 : static_cast<int>(s);
}

void to_stderr(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
#ifdef GTG_TEST_HOOKS
  if (const char* f = std::getenv("GTG_INJECT_FAULT")) gtg_debug_set_fault(std::atoi(f));
#endif
  CLI::App app{"GraphTreeGen: subtree-centric graph generation"};
  app.require_subcommand(1);
  app.fallthrough();
  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "Override the configured seed");

  std::string config, out, data, mode, checkpoint, graph, predictions, split = "test", which = "fused";
  std::int64_t n_graphs = -1;
  std::size_t fold = 1, m = 15, k = 1;
  double h = 1e-5;
  bool tiny = true;

  auto* gen = app.add_subcommand("gen-data", "Write a synthetic dataset");
  gen->add_option("--config", config, "Run config JSON (synth section)");
  gen->add_option("--out", out, "Dataset directory")->required();
  gen->add_option("--n-graphs", n_graphs, "Override the number of pairs")->check(CLI::NonNegativeNumber);

  auto* train = app.add_subcommand("train", "Train a model");
  train->add_option("--config", config, "Run config JSON")->required();
  train->add_option("--mode", mode, "self_supervised | supervised | overfit");
  train->add_option("--out", out, "Output directory");
  train->add_option("--data", data, "Dataset directory");
  train->add_option("--fold", fold, "Validation fold (1..k-1)");

  auto* predict = app.add_subcommand("predict", "Predict a target graph from a source graph");
  predict->add_option("--checkpoint", checkpoint)->required();
  predict->add_option("--graph", graph)->required();
  predict->add_option("--out", out, "Directory for fused.csv, weights.csv, logits.csv")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Score a split with the ten-metric suite");
  auto* ck = evaluate->add_option("--checkpoint", checkpoint);
  auto* pr = evaluate->add_option("--predictions", predictions, "Directory of <id>.csv predictions");
  ck->excludes(pr);
  evaluate->add_option("--data", data)->required();
  evaluate->add_option("--split", split, "test | train | all | fold<r>")->capture_default_str();
  evaluate->add_option("--which", which, "fused | raw")->capture_default_str();
  evaluate->add_option("--out", out, "Report CSV")->required();

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of the full model");
  gradcheck->set_help_flag("--help", "Print this help message and exit");
  gradcheck->add_flag("--tiny", tiny, "Tiny configuration (the only one)");
  gradcheck->add_option("--h", h, "Central-difference step")->capture_default_str()->check(CLI::PositiveNumber);

  auto* subtrees = app.add_subcommand("subtrees", "Dump the entropy ranking and k-hop subtrees");
  subtrees->add_option("--graph", graph)->required();
  subtrees->add_option("--m", m)->capture_default_str();
  subtrees->add_option("--k", k)->capture_default_str();
  subtrees->add_option("--out", out, "JSON file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*gen) {
    gtg_synth_options o{opt(config), out.c_str(), n_graphs, seed.has_value(), seed.value_or(0)};
    std::size_t written = 0;
    if (int rc = report(gtg_synth_write(&o, &written))) return rc;
    std::fprintf(stderr, "wrote %zu pairs to %s\n", written, out.c_str());
    return 0;
  }

  if (*train) {
    gtg_train_options o{config.c_str(), opt(mode), opt(data), opt(out), seed.has_value(), seed.value_or(0),
                        fold, to_stderr, nullptr};
    double val = 0.0;
    if (int rc = report(gtg_train_run(&o, &val))) return rc;
    std::fprintf(stderr, "final val_mae %.6f\n", val);
    return 0;
  }

  if (*predict) {
    gtg_model* model = nullptr;
    gtg_graph* g = nullptr;
    gtg_prediction* p = nullptr;
    gtg_status s = gtg_model_load(checkpoint.c_str(), &model);
    if (s == GTG_OK) s = gtg_graph_load(graph.c_str(), &g);
    if (s == GTG_OK) s = gtg_model_predict(model, g, &p);
    if (s == GTG_OK) s = gtg_prediction_save(p, out.c_str());
    gtg_prediction_free(p);
    gtg_graph_free(g);
    gtg_model_free(model);
    return report(s);
  }

  if (*evaluate) {
    if (checkpoint.empty() == predictions.empty()) {
      std::fprintf(stderr, "gtg: evaluate needs exactly one of --checkpoint or --predictions\n");
      return 2;
    }
    gtg_evaluate_options o{opt(checkpoint), opt(predictions), data.c_str(), split.c_str(), which.c_str(),
                           out.c_str(), to_stderr, nullptr};
    double mae = 0.0;
    if (int rc = report(gtg_evaluate(&o, &mae))) return rc;
    std::fprintf(stderr, "mean edge MAE %.6f\n", mae);
    return 0;
  }

  if (*gradcheck) {
    double err = 0.0;
    if (int rc = report(gtg_gradcheck_tiny(h, seed.value_or(42), &err))) return rc;
    const bool ok = err < kGradTolerance;
    std::printf("max_rel_error %.3e (tolerance %.0e) %s\n", err, kGradTolerance, ok ? "PASS" : "FAIL");
    return ok ? 0 : 5;
  }

  if (*subtrees) {
    gtg_graph* g = nullptr;
    char* json = nullptr;
    gtg_status s = gtg_graph_load(graph.c_str(), &g);
    if (s == GTG_OK) s = gtg_subtrees_json(g, m, k, &json);
    gtg_graph_free(g);
    if (s != GTG_OK) return report(s);
    int rc = 0;
    if (out.empty()) {
      std::fputs(json, stdout);
    } else if (std::FILE* f = std::fopen(out.c_str(), "wb")) {
      std::fputs(json, f);
      if (std::fclose(f) != 0) rc = 3;
    } else {
      std::fprintf(stderr, "gtg: cannot write %s\n", out.c_str());
      rc = 3;
    }
    gtg_string_free(json);
    return rc;
  }
  return 2;
}
