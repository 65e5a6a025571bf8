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
#include "gtg/gtg.h"

#include <array>
#include <cmath>
#include <cstring>
#include <new>
#include <string>

#include "gtg/autodiff.hpp"
#include "gtg/error.hpp"
#include "gtg/pipeline.hpp"

struct gtg_graph {
  gtg::WeightedGraph g;
};

struct gtg_model {
  gtg::Checkpoint ckpt;
};

struct gtg_prediction {
  gtg::DecodedGraph d;
};

namespace {

thread_local std::string last_error;

gtg_status status_of(gtg::ErrorKind k) {
  using gtg::ErrorKind;
  switch (k) {
    case ErrorKind::Io: return GTG_ERR_IO;
    case ErrorKind::NonFiniteGradient: return GTG_ERR_DIVERGENCE;
    case ErrorKind::NonFinite:
    case ErrorKind::NoConvergence:
    case ErrorKind::SingularMatrix:
    case ErrorKind::AlphaTooLarge: return GTG_ERR_NUMERIC;
    case ErrorKind::NonScalarLoss:
    case ErrorKind::DoubleBackward: return GTG_ERR_INTERNAL;
    default: return GTG_ERR_CONFIG;
  }
}

template <typename F>
gtg_status guarded(F&& f) {
  last_error.clear();
  try {
    return f();
  } catch (const gtg::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return GTG_ERR_INTERNAL;
}

gtg_status null_arg(const char* what) {
  last_error = std::string(what) + " must not be NULL";
  return GTG_ERR_CONFIG;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

gtg::ProgressFn progress_of(gtg_progress_fn fn, void* user) {
  if (!fn) return {};
  return [fn, user](std::string_view line) { fn(std::string(line).c_str(), user); };
}

}  // namespace

extern "C" {

const char* gtg_version(void) { return "0.1.0"; }

const char* gtg_last_error(void) { return last_error.c_str(); }

void gtg_string_free(char* s) { delete[] s; }

gtg_status gtg_graph_load(const char* path, gtg_graph** out) {
  if (!path || !out) return null_arg("path and out");
  return guarded([&] {
    *out = new gtg_graph{gtg::load_graph(path)};
    return GTG_OK;
  });
}

gtg_status gtg_graph_from_dense(size_t n, const double* values, gtg_graph** out) {
  if (!values || !out) return null_arg("values and out");
  return guarded([&] {
    gtg::Matrix m(n, n, std::vector<double>(values, values + n * n));
    *out = new gtg_graph{gtg::WeightedGraph(std::move(m))};
    return GTG_OK;
  });
}

gtg_status gtg_graph_save(const gtg_graph* g, const char* path) {
  if (!g || !path) return null_arg("graph and path");
  return guarded([&] {
    gtg::save_graph(g->g, path);
    return GTG_OK;
  });
}

size_t gtg_graph_size(const gtg_graph* g) { return g ? g->g.n() : 0; }

gtg_status gtg_graph_copy_dense(const gtg_graph* g, double* out, size_t len) {
  if (!g || !out) return null_arg("graph and out");
  const auto& adj = g->g.adj();
  if (len < adj.size()) {
    last_error = "output buffer holds " + std::to_string(len) + " values, need " + std::to_string(adj.size());
    return GTG_ERR_CONFIG;
  }
  std::memcpy(out, adj.data().data(), adj.size() * sizeof(double));
  return GTG_OK;
}

void gtg_graph_free(gtg_graph* g) { delete g; }

gtg_status gtg_subtrees_json(const gtg_graph* g, size_t m, size_t k, char** out_json) {
  if (!g || !out_json) return null_arg("graph and out_json");
  return guarded([&] {
    *out_json = dup_string(gtg::subtrees_json(g->g, m, k));
    return GTG_OK;
  });
}

gtg_status gtg_synth_write(const gtg_synth_options* opts, size_t* n_written) {
  if (!opts || !opts->out_dir) return null_arg("options and out_dir");
  return guarded([&] {
    gtg::SynthConfig cfg;
    if (opts->config_path) cfg = gtg::load_run_config(opts->config_path).synth;
    if (opts->n_graphs >= 0) cfg.n_graphs = static_cast<std::size_t>(opts->n_graphs);
    if (opts->has_seed) cfg.seed = opts->seed;
    const auto ids = gtg::write_dataset(cfg, opts->out_dir);
    if (n_written) *n_written = ids.size();
    return GTG_OK;
  });
}

gtg_status gtg_train_run(const gtg_train_options* opts, double* final_val_mae) {
  if (!opts || !opts->config_path) return null_arg("options and config_path");
  return guarded([&] {
    gtg::TrainRequest req;
    req.config = gtg::load_run_config(opts->config_path);
    if (opts->mode) req.mode = gtg::parse_train_mode(opts->mode);
    if (opts->data_root) req.data_root = opts->data_root;
    if (opts->out_dir) req.out_dir = opts->out_dir;
    if (opts->has_seed) req.seed = opts->seed;
    req.fold = opts->fold == 0 ? 1 : opts->fold;
    req.progress = progress_of(opts->progress, opts->user);
    const auto res = gtg::run_training(req);
    if (final_val_mae) *final_val_mae = res.history.empty() ? NAN : res.history.back().val_mae;
    return GTG_OK;
  });
}

gtg_status gtg_model_load(const char* checkpoint_path, gtg_model** out) {
  if (!checkpoint_path || !out) return null_arg("checkpoint_path and out");
  return guarded([&] {
    *out = new gtg_model{gtg::load_checkpoint(checkpoint_path)};
    return GTG_OK;
  });
}

size_t gtg_model_nodes(const gtg_model* m) { return m ? m->ckpt.config.n : 0; }

gtg_status gtg_model_save(const gtg_model* m, const char* checkpoint_path) {
  if (!m || !checkpoint_path) return null_arg("model and checkpoint_path");
  return guarded([&] {
    gtg::save_checkpoint(m->ckpt, checkpoint_path);
    return GTG_OK;
  });
}

void gtg_model_free(gtg_model* m) { delete m; }

gtg_status gtg_model_predict(const gtg_model* m, const gtg_graph* source, gtg_prediction** out) {
  if (!m || !source || !out) return null_arg("model, source and out");
  return guarded([&] {
    if (source->g.n() != m->ckpt.config.n)
      gtg::fail(gtg::ErrorKind::ShapeMismatch, "graph has " + std::to_string(source->g.n()) +
                                                   " nodes, the model expects " + std::to_string(m->ckpt.config.n));
    *out = new gtg_prediction{gtg::predict(source->g, m->ckpt.params, m->ckpt.config)};
    return GTG_OK;
  });
}

gtg_status gtg_prediction_save(const gtg_prediction* p, const char* dir) {
  if (!p || !dir) return null_arg("prediction and dir");
  return guarded([&] {
    gtg::write_prediction(p->d, dir);
    return GTG_OK;
  });
}

gtg_status gtg_prediction_fused(const gtg_prediction* p, gtg_graph** out) {
  if (!p || !out) return null_arg("prediction and out");
  return guarded([&] {
    *out = new gtg_graph{p->d.fused};
    return GTG_OK;
  });
}

void gtg_prediction_free(gtg_prediction* p) { delete p; }

const char* gtg_metric_name(size_t i) {
  static const auto names = [] {
    std::array<std::string, gtg::MetricReport::kCount> out;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::string(gtg::MetricReport::kNames[k]);
    return out;
  }();
  return i < names.size() ? names[i].c_str() : nullptr;
}

gtg_status gtg_metrics(const gtg_graph* pred, const gtg_graph* target, double out[GTG_METRIC_COUNT]) {
  if (!pred || !target || !out) return null_arg("pred, target and out");
  return guarded([&] {
    const auto r = gtg::evaluate_all(pred->g, target->g, gtg::ScoredOutput::Fused);
    for (std::size_t i = 0; i < r.values.size(); ++i) out[i] = r.values[i];
    return GTG_OK;
  });
}

gtg_status gtg_evaluate(const gtg_evaluate_options* opts, double* mean_mae) {
  if (!opts || !opts->data_root || !opts->out_path) return null_arg("options, data_root and out_path");
  return guarded([&] {
    gtg::EvaluateRequest req;
    if (opts->checkpoint) req.checkpoint = opts->checkpoint;
    if (opts->predictions_dir) req.predictions = opts->predictions_dir;
    req.data_root = opts->data_root;
    if (opts->split) req.split = opts->split;
    if (opts->which) req.which = gtg::parse_scored_output(opts->which);
    req.out = opts->out_path;
    req.progress = progress_of(opts->progress, opts->user);
    const auto res = gtg::run_evaluation(req);
    if (mean_mae) {
      double s = 0.0;
      for (const auto& r : res.reports) s += r.mae();
      *mean_mae = res.reports.empty() ? NAN : s / static_cast<double>(res.reports.size());
    }
    return GTG_OK;
  });
}

gtg_status gtg_gradcheck_tiny(double h, uint64_t seed, double* max_rel_error) {
  if (!max_rel_error) return null_arg("max_rel_error");
  return guarded([&] {
    *max_rel_error = gtg::gradcheck_tiny(h, seed).max_rel_error;
    return GTG_OK;
  });
}

gtg_status gtg_debug_set_fault(int fault) {
  if (fault != 0 && fault != 1) {
    last_error = "fault must be 0 or 1";
    return GTG_ERR_CONFIG;
  }
  gtg::ad::set_fault(fault == 1 ? gtg::ad::Fault::SigmoidBackward : gtg::ad::Fault::None);
  return GTG_OK;
}

}  // extern "C"
