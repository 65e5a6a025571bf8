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
#include "gtg/pipeline.hpp"

#include <cstdio>
#include <system_error>
#include <thread>

#include "gtg/error.hpp"
#include "gtg/subtree.hpp"

namespace gtg {

namespace {

void say(const ProgressFn& p, const std::string& line) {
  if (p) p(line);
}

void make_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) fail(ErrorKind::Io, "IoError: cannot create directory " + dir.string());
}

std::vector<TrainSample> samples_for(const std::filesystem::path& root, const std::vector<std::string>& ids,
                                     TrainMode mode, const ModelConfig& model) {
  std::vector<TrainSample> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(make_sample(load_pair(root, id), mode, model));
  return out;
}

std::string epoch_line(const EpochRecord& e, std::size_t epochs) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "epoch %zu/%zu total=%.6f struct=%.6f weight=%.6f val_mae=%.6f", e.epoch, epochs,
                e.total, e.structure, e.weight, e.val_mae);
  return buf;
}

}  // namespace

TrainOutcome run_training(const TrainRequest& req) {
  RunConfig rc = req.config;
  if (req.mode) rc.mode = *req.mode;
  if (req.data_root) rc.data_root = *req.data_root;
  if (req.out_dir) rc.out_dir = *req.out_dir;
  if (req.seed) rc.train.seed = *req.seed;
  if (rc.data_root.empty()) fail(ErrorKind::Config, "no data_root given");
  if (rc.out_dir.empty()) fail(ErrorKind::Config, "no out_dir given");
  if (rc.mode == TrainMode::Overfit && !rc.epochs_set) rc.train.epochs = kOverfitEpochs;
  rc.model.validate();
  rc.train.validate();

  const Manifest manifest = load_manifest(rc.data_root / "manifest.json");
  if (manifest.ids.empty()) fail(ErrorKind::Config, "manifest lists no ids");
  std::vector<std::string> train_ids, val_ids;
  if (rc.mode == TrainMode::Overfit) {
    train_ids = val_ids = {manifest.ids.front()};
  } else {
    if (manifest.splits.folds.size() < 2)
      fail(ErrorKind::Config, "dataset has a single fold; at least two are needed to train");
    if (req.fold == 0 || req.fold >= manifest.splits.folds.size())
      fail(ErrorKind::Config, "fold must be in 1.." + std::to_string(manifest.splits.folds.size() - 1));
    std::tie(train_ids, val_ids) = manifest.splits.rotation(req.fold);
    if (train_ids.empty()) train_ids = val_ids;
  }
  const auto train_set = samples_for(rc.data_root, train_ids, rc.mode, rc.model);
  const auto val_set = samples_for(rc.data_root, val_ids, rc.mode, rc.model);
  say(req.progress, "training " + std::string(to_string(rc.mode)) + " on " + std::to_string(train_set.size()) +
                        " pairs, validating on " + std::to_string(val_set.size()));

  make_dir(rc.out_dir);
  const auto result = train(train_set, val_set, rc.train, rc.model,
                            [&](const EpochRecord& e) { say(req.progress, epoch_line(e, rc.train.epochs)); });

  TrainOutcome out{{rc.model, rc.train.seed, result.params, rc.mode}, result.history, rc.out_dir};
  save_checkpoint(out.checkpoint, rc.out_dir / "checkpoint.json");
  write_text(format_history_csv(result.history), rc.out_dir / "history.csv");
  Json folds = parse_json(format_folds(manifest.splits), "folds");
  folds["mode"] = std::string(to_string(rc.mode));
  folds["val_fold"] = rc.mode == TrainMode::Overfit ? Json(nullptr) : Json(req.fold);
  folds["train_ids"] = train_ids;
  folds["val_ids"] = val_ids;
  write_text(folds.dump(1) + "\n", rc.out_dir / "folds.json");
  return out;
}

void write_prediction(const DecodedGraph& d, const std::filesystem::path& dir) {
  make_dir(dir);
  save_graph(d.fused, dir / "fused.csv");
  write_matrix_csv(d.weights, dir / "weights.csv");
  write_matrix_csv(d.logits, dir / "logits.csv");
}

std::string format_report_csv(const std::vector<std::string>& ids, const std::vector<MetricReport>& reports) {
  std::string out = report_csv_header();
  for (std::size_t i = 0; i < reports.size(); ++i) out += format_report_row(ids.at(i), reports[i]);
  out += format_summary_row(reports);
  return out;
}

EvaluateOutcome run_evaluation(const EvaluateRequest& req) {
  if (req.checkpoint.has_value() == req.predictions.has_value())
    fail(ErrorKind::Config, "give exactly one of a checkpoint or a predictions directory");
  const Manifest manifest = load_manifest(req.data_root / "manifest.json");
  EvaluateOutcome out;
  out.ids = split_ids(manifest, req.split);

  std::optional<Checkpoint> ckpt;
  if (req.checkpoint) ckpt = load_checkpoint(*req.checkpoint);
  const bool against_source = ckpt && ckpt->mode && *ckpt->mode != TrainMode::Supervised;

  std::vector<GraphPair> pairs;
  for (const auto& id : out.ids) pairs.push_back(load_pair(req.data_root, id));
  std::vector<std::optional<WeightedGraph>> preds(pairs.size());
  if (req.predictions)
    for (std::size_t i = 0; i < pairs.size(); ++i) preds[i] = load_graph(*req.predictions / (out.ids[i] + ".csv"));
  for (const auto& p : pairs)
    if (ckpt && p.source.n() != ckpt->config.n)
      fail(ErrorKind::ShapeMismatch, "pair " + p.id + " has " + std::to_string(p.source.n()) +
                                         " nodes, the checkpoint expects " + std::to_string(ckpt->config.n));

  // Pairs are independent; results land in fixed slots.
  out.reports.resize(pairs.size());
  std::vector<std::exception_ptr> errors(pairs.size());
  auto score = [&](std::size_t i) {
    try {
      const auto& target = against_source ? pairs[i].source : pairs[i].target;
      if (ckpt)
        out.reports[i] = evaluate_all(predict(pairs[i].source, ckpt->params, ckpt->config), target, req.which);
      else
        out.reports[i] = evaluate_all(*preds[i], target, req.which);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(default_thread_count(), pairs.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < pairs.size(); i += workers) score(i);
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  say(req.progress, "scored " + std::to_string(out.reports.size()) + " pairs (" + std::string(to_string(req.which)) +
                        ")");
  write_text(format_report_csv(out.ids, out.reports), req.out);
  return out;
}

std::string subtrees_json(const WeightedGraph& g, std::size_t m, std::size_t k) {
  const auto ranking = select_roots(g, m);
  const auto trees = extract_all(g, m, k);
  Json j;
  j["m"] = m;
  j["k"] = k;
  j["ranking"] = {{"scores", ranking.scores}, {"order", ranking.order}};
  Json list = Json::array();
  for (const auto& t : trees) {
    Json edges = Json::array();
    for (const auto& e : t.edges) edges.push_back(Json::array({e.parent, e.child, e.weight}));
    list.push_back({{"root", t.root}, {"nodes", t.nodes}, {"edges", std::move(edges)}});
  }
  j["subtrees"] = std::move(list);
  return j.dump(1) + "\n";
}

}  // namespace gtg
