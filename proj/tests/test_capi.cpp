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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "gtg/gtg.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("gtg_capi_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

// A 10-pair dataset and a 2-epoch run config over it.
struct Fixture {
  fs::path dir;
  fs::path config;

  explicit Fixture(const std::string& name) : dir(scratch(name)), config(dir / "run.json") {
    const std::string data = (dir / "data").string();
    gtg_synth_options s{nullptr, data.c_str(), 10, 1, 42};
    size_t written = 0;
    REQUIRE(gtg_synth_write(&s, &written) == GTG_OK);
    REQUIRE(written == 10);
    spit(config, R"({"data_root": "data", "out_dir": "run", "model": {"m": 5, "d_hidden": 8, "d_out": 4,
                    "decoder_hidden": 8}, "train": {"epochs": 2, "batch_size": 4}})");
  }
  ~Fixture() { fs::remove_all(dir); }
};

int run_cli(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string(GTG_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("graph handles round-trip and validate") {
  const double k3[] = {0, 0.5, 0.25, 0.5, 0, 1, 0.25, 1, 0};
  gtg_graph* g = nullptr;
  REQUIRE(gtg_graph_from_dense(3, k3, &g) == GTG_OK);
  CHECK(gtg_graph_size(g) == 3);
  double copy[9];
  CHECK(gtg_graph_copy_dense(g, copy, 9) == GTG_OK);
  for (int i = 0; i < 9; ++i) CHECK(copy[i] == k3[i]);
  CHECK(gtg_graph_copy_dense(g, copy, 4) == GTG_ERR_CONFIG);

  const auto dir = scratch("graph");
  CHECK(gtg_graph_save(g, (dir / "k3.csv").c_str()) == GTG_OK);
  gtg_graph* back = nullptr;
  REQUIRE(gtg_graph_load((dir / "k3.csv").c_str(), &back) == GTG_OK);
  double again[9];
  gtg_graph_copy_dense(back, again, 9);
  for (int i = 0; i < 9; ++i) CHECK(again[i] == k3[i]);

  double out[GTG_METRIC_COUNT];
  CHECK(gtg_metrics(g, back, out) == GTG_OK);
  for (double v : out) CHECK(v <= 1e-9);
  CHECK(std::string(gtg_metric_name(0)) == "mae");
  CHECK(std::string(gtg_metric_name(9)) == "lap_fro");
  CHECK(gtg_metric_name(10) == nullptr);

  char* json = nullptr;
  REQUIRE(gtg_subtrees_json(g, 2, 1, &json) == GTG_OK);
  CHECK(std::string(json).find("\"subtrees\"") != std::string::npos);
  gtg_string_free(json);
  CHECK(gtg_subtrees_json(g, 4, 1, &json) == GTG_ERR_CONFIG);
  CHECK(std::string(gtg_last_error()).find("MTooLarge") != std::string::npos);

  gtg_graph_free(g);
  gtg_graph_free(back);
  fs::remove_all(dir);
}

TEST_CASE("invalid input maps to status codes") {
  const double asym[] = {0, 0.5, 0.4, 0};
  gtg_graph* g = nullptr;
  CHECK(gtg_graph_from_dense(2, asym, &g) == GTG_ERR_CONFIG);
  CHECK(g == nullptr);
  CHECK(std::string(gtg_last_error()).find("NonSymmetric") != std::string::npos);
  CHECK(gtg_graph_load("/nonexistent/graph.csv", &g) == GTG_ERR_IO);
  CHECK(gtg_graph_from_dense(2, nullptr, &g) == GTG_ERR_CONFIG);
  gtg_model* m = nullptr;
  CHECK(gtg_model_load("/nonexistent/ck.json", &m) == GTG_ERR_IO);
  gtg_train_options t{};
  CHECK(gtg_train_run(&t, nullptr) == GTG_ERR_CONFIG);
  CHECK(gtg_debug_set_fault(7) == GTG_ERR_CONFIG);
  CHECK(std::string(gtg_version()).size() > 0);
}

TEST_CASE("gradient self-check through the C API") {
  double err = 1.0;
  REQUIRE(gtg_gradcheck_tiny(1e-5, 42, &err) == GTG_OK);
  CHECK(err < 1e-4);
  REQUIRE(gtg_debug_set_fault(1) == GTG_OK);
  gtg_gradcheck_tiny(1e-5, 42, &err);
  gtg_debug_set_fault(0);
  CHECK(err > 1e-3);
}

TEST_CASE("train, predict and evaluate through the C API") {
  Fixture fx("pipeline");
  std::vector<std::string> lines;
  gtg_train_options t{fx.config.c_str(), "supervised", nullptr, nullptr, 0, 0, 0,
                      [](const char* line, void* user) { static_cast<std::vector<std::string>*>(user)->push_back(line); },
                      &lines};
  double val = -1.0;
  REQUIRE(gtg_train_run(&t, &val) == GTG_OK);
  CHECK(std::isfinite(val));
  CHECK(lines.size() == 3);
  const auto run = fx.dir / "run";
  for (const auto* f : {"checkpoint.json", "history.csv", "folds.json"}) CHECK(fs::exists(run / f));

  gtg_model* m = nullptr;
  REQUIRE(gtg_model_load((run / "checkpoint.json").c_str(), &m) == GTG_OK);
  CHECK(gtg_model_nodes(m) == 35);
  gtg_graph* src = nullptr;
  REQUIRE(gtg_graph_load((fx.dir / "data" / "source" / "g000.csv").c_str(), &src) == GTG_OK);
  gtg_prediction* p = nullptr;
  REQUIRE(gtg_model_predict(m, src, &p) == GTG_OK);
  CHECK(gtg_prediction_save(p, (fx.dir / "pred").c_str()) == GTG_OK);
  for (const auto* f : {"fused.csv", "weights.csv", "logits.csv"}) CHECK(fs::exists(fx.dir / "pred" / f));
  gtg_graph* fused = nullptr;
  REQUIRE(gtg_prediction_fused(p, &fused) == GTG_OK);
  CHECK(gtg_graph_size(fused) == 35);

  const std::string ck = (run / "checkpoint.json").string(), data = (fx.dir / "data").string(),
                    report_path = (fx.dir / "report.csv").string(), targets = (fx.dir / "data" / "target").string();
  gtg_evaluate_options e{ck.c_str(), nullptr, data.c_str(), "test", "fused", report_path.c_str(), nullptr, nullptr};
  double mean = -1.0;
  REQUIRE(gtg_evaluate(&e, &mean) == GTG_OK);
  CHECK(mean >= 0.0);
  const auto report = slurp(fx.dir / "report.csv");
  CHECK(report.starts_with("id,mae,"));
  CHECK(report.find("mean±std") != std::string::npos);

  e.predictions_dir = targets.c_str();
  CHECK(gtg_evaluate(&e, &mean) == GTG_ERR_CONFIG);

  gtg_graph_free(fused);
  gtg_prediction_free(p);
  gtg_graph_free(src);
  gtg_model_free(m);
}

TEST_CASE("command-line interface") {
  Fixture fx("cli");
  const auto log = fx.dir / "log.txt";
  const std::string cfg = fx.config.string();
  const std::string data = (fx.dir / "data").string();

  CHECK(run_cli("--help", log) == 0);
  CHECK(run_cli("", log) == 2);
  CHECK(run_cli("frobnicate", log) == 2);
  CHECK(run_cli("gradcheck --tiny", log) == 0);
  CHECK(slurp(log).find("PASS") != std::string::npos);

  CHECK(run_cli("train --config " + cfg + " --mode supervised --seed 42", log) == 0);
  CHECK(slurp(log).find("epoch 2/2") != std::string::npos);
  const auto ck = (fx.dir / "run" / "checkpoint.json").string();
  CHECK(run_cli("evaluate --checkpoint " + ck + " --data " + data + " --out " + (fx.dir / "r.csv").string(), log) == 0);
  CHECK(run_cli("evaluate --predictions " + data + "/target --data " + data + " --out " + (fx.dir / "z.csv").string(),
                log) == 0);
  const auto zeros = slurp(fx.dir / "z.csv");
  CHECK(zeros.find("0.0000±0.0000,0.0000±0.0000") != std::string::npos);

  CHECK(run_cli("predict --checkpoint " + ck + " --graph " + data + "/source/g001.csv --out " +
                    (fx.dir / "p").string(),
                log) == 0);
  CHECK(fs::exists(fx.dir / "p" / "fused.csv"));
  CHECK(run_cli("subtrees --graph " + data + "/source/g001.csv --m 3 --k 2", log) == 0);
  CHECK(slurp(log).find("\"ranking\"") != std::string::npos);

  spit(fx.dir / "tiny.csv", "0,0.5\n0.5,0\n");
  CHECK(run_cli("predict --checkpoint " + ck + " --graph " + (fx.dir / "tiny.csv").string() + " --out " +
                    (fx.dir / "q").string(),
                log) == 2);
  CHECK(run_cli("subtrees --graph " + data + "/source/g001.csv --m 99", log) == 2);
  CHECK(slurp(log).find("MTooLarge") != std::string::npos);
  CHECK(run_cli("train --config " + cfg + " --mode sideways", log) == 2);
  CHECK(run_cli("train --config " + (fx.dir / "absent.json").string(), log) == 3);
  CHECK(run_cli("gen-data --out /nonexistent/a/b --n-graphs 2", log) == 3);
  CHECK(run_cli("gen-data --out " + (fx.dir / "d2").string() + " --n-graphs 3 --seed 7", log) == 0);
  CHECK(fs::exists(fx.dir / "d2" / "source" / "g002.csv"));
}

TEST_CASE("fault injection makes the CLI gradient check fail") {
  const auto dir = scratch("fault");
  const std::string cmd =
      "GTG_INJECT_FAULT=1 " + std::string(GTG_CLI_HOOKS_PATH) + " gradcheck --tiny > " +
      (dir / "log.txt").string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  CHECK(WIFEXITED(rc));
  CHECK(WEXITSTATUS(rc) == 5);
  CHECK(slurp(dir / "log.txt").find("FAIL") != std::string::npos);
  fs::remove_all(dir);
}
