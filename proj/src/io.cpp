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
#include "gtg/io.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "gtg/error.hpp"

namespace gtg {

namespace {

[[noreturn]] void config_error(std::string_view where, const std::string& what) {
  fail(ErrorKind::Config, std::string(where) + ": " + what);
}

// Applies j's keys through per-key setters, rejecting unknown keys and type
// mismatches.
using Setter = std::function<void(const Json&)>;

void apply_fields(const Json& j, std::string_view where, const std::map<std::string, Setter, std::less<>>& fields) {
  if (!j.is_object()) config_error(where, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto f = fields.find(it.key());
    if (f == fields.end()) config_error(where, "unknown key '" + it.key() + "'");
    try {
      f->second(it.value());
    } catch (const Json::exception& e) {
      config_error(where, "bad value for '" + it.key() + "': " + e.what());
    }
  }
}

template <typename T>
Setter set_count(T& out) {
  return [&out](const Json& v) {
    if (!v.is_number_unsigned()) throw Json::type_error::create(302, "expected a non-negative integer", &v);
    out = v.get<T>();
  };
}

Setter set_real(double& out) {
  return [&out](const Json& v) {
    if (!v.is_number()) throw Json::type_error::create(302, "expected a number", &v);
    out = v.get<double>();
  };
}

Json matrix_json(const Matrix& m) {
  Json j;
  j["shape"] = {m.rows(), m.cols()};
  j["data"] = m.values();
  return j;
}

Matrix matrix_from_json(const Json& j, std::string_view where) {
  try {
    const auto shape = j.at("shape").get<std::vector<std::size_t>>();
    if (shape.size() != 2) config_error(where, "shape must have two entries");
    return Matrix(shape[0], shape[1], j.at("data").get<std::vector<double>>());
  } catch (const Json::exception& e) {
    config_error(where, e.what());
  } catch (const Error& e) {
    config_error(where, e.what());
  }
}

}  // namespace

Json to_json(const ModelConfig& c) {
  return Json{{"n", c.n},
              {"m", c.m},
              {"k", c.k},
              {"d_hidden", c.d_hidden},
              {"d_out", c.d_out},
              {"layers_encoder", c.layers_encoder},
              {"layers_aggregator", c.layers_aggregator},
              {"decoder_hidden", c.decoder_hidden},
              {"decoder", std::string(to_string(c.decoder))}};
}

Json to_json(const TrainConfig& c) {
  return Json{{"alpha", c.alpha},
              {"beta", c.beta},
              {"lr", c.lr},
              {"batch_size", c.batch_size},
              {"epochs", c.epochs},
              {"seed", c.seed},
              {"adam_beta1", c.adam_beta1},
              {"adam_beta2", c.adam_beta2},
              {"adam_eps", c.adam_eps},
              {"folds", c.folds},
              {"clip_norm", c.clip_norm},
              {"threads", c.threads},
              {"weight_loss", std::string(to_string(c.weight_loss))}};
}

Json to_json(const SynthConfig& c) {
  return Json{{"n_graphs", c.n_graphs},
              {"n", c.n},
              {"modules", c.modules},
              {"p_in", c.p_in},
              {"p_out", c.p_out},
              {"noise_sigma", c.noise_sigma},
              {"transform", std::string(to_string(c.transform))},
              {"seed", c.seed},
              {"folds", c.folds}};
}

ModelConfig model_config_from_json(const Json& j, ModelConfig c) {
  apply_fields(j, "model config",
               {{"n", set_count(c.n)},
                {"m", set_count(c.m)},
                {"k", set_count(c.k)},
                {"d_hidden", set_count(c.d_hidden)},
                {"d_out", set_count(c.d_out)},
                {"layers_encoder", set_count(c.layers_encoder)},
                {"layers_aggregator", set_count(c.layers_aggregator)},
                {"decoder_hidden", set_count(c.decoder_hidden)},
                {"decoder", [&c](const Json& v) { c.decoder = parse_decoder_variant(v.get<std::string>()); }}});
  c.validate();
  return c;
}

TrainConfig train_config_from_json(const Json& j, TrainConfig c) {
  apply_fields(j, "train config",
               {{"alpha", set_real(c.alpha)},
                {"beta", set_real(c.beta)},
                {"lr", set_real(c.lr)},
                {"batch_size", set_count(c.batch_size)},
                {"epochs", set_count(c.epochs)},
                {"seed", set_count(c.seed)},
                {"adam_beta1", set_real(c.adam_beta1)},
                {"adam_beta2", set_real(c.adam_beta2)},
                {"adam_eps", set_real(c.adam_eps)},
                {"folds", set_count(c.folds)},
                {"clip_norm", set_real(c.clip_norm)},
                {"threads", set_count(c.threads)},
                {"weight_loss",
                 [&c](const Json& v) { c.weight_loss = parse_weight_loss_support(v.get<std::string>()); }}});
  c.validate();
  return c;
}

SynthConfig synth_config_from_json(const Json& j, SynthConfig c) {
  apply_fields(j, "synth config",
               {{"n_graphs", set_count(c.n_graphs)},
                {"n", set_count(c.n)},
                {"modules", set_count(c.modules)},
                {"p_in", set_real(c.p_in)},
                {"p_out", set_real(c.p_out)},
                {"noise_sigma", set_real(c.noise_sigma)},
                {"transform", [&c](const Json& v) { c.transform = parse_synth_transform(v.get<std::string>()); }},
                {"seed", set_count(c.seed)},
                {"folds", set_count(c.folds)}});
  c.validate();
  return c;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "IoError: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "IoError: cannot write " + path.string());
  out << text;
  if (!out.flush()) fail(ErrorKind::Io, "IoError: write failed for " + path.string());
}

Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    config_error(what, e.what());
  }
}

// --- checkpoint

std::string format_checkpoint(const Checkpoint& c) {
  Json j;
  j["config"] = to_json(c.config);
  j["seed"] = c.seed;
  if (c.mode) j["mode"] = std::string(to_string(*c.mode));
  Json tensors = Json::object();
  for (std::size_t i = 0; i < c.params.tensor_count(); ++i) tensors[c.params.name(i)] = matrix_json(c.params.tensor(i));
  j["tensors"] = std::move(tensors);
  return j.dump(1) + "\n";
}

Checkpoint parse_checkpoint(std::string_view text) {
  const Json j = parse_json(text, "checkpoint");
  if (!j.is_object()) config_error("checkpoint", "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "config" && it.key() != "seed" && it.key() != "tensors" && it.key() != "mode")
      config_error("checkpoint", "unknown key '" + it.key() + "'");
  if (!j.contains("config") || !j.contains("seed") || !j.contains("tensors"))
    config_error("checkpoint", "missing config, seed or tensors");
  Checkpoint c;
  c.config = model_config_from_json(j["config"]);
  if (!j["seed"].is_number_unsigned()) config_error("checkpoint", "seed must be a non-negative integer");
  c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("mode")) c.mode = parse_train_mode(j["mode"].get<std::string>());
  const auto layout = init_params(c.config, 0);
  const Json& tensors = j["tensors"];
  if (!tensors.is_object() || tensors.size() != layout.tensor_count())
    config_error("checkpoint", "expected " + std::to_string(layout.tensor_count()) + " tensors");
  for (std::size_t i = 0; i < layout.tensor_count(); ++i) {
    const auto& name = layout.name(i);
    if (!tensors.contains(name)) config_error("checkpoint", "missing tensor '" + name + "'");
    Matrix m = matrix_from_json(tensors[name], "checkpoint tensor " + name);
    if (m.rows() != layout.tensor(i).rows() || m.cols() != layout.tensor(i).cols())
      fail(ErrorKind::ShapeMismatch, "checkpoint tensor '" + name + "' has the wrong shape");
    c.params.add(name, std::move(m));
  }
  return c;
}

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path) { write_text(format_checkpoint(c), path); }

Checkpoint load_checkpoint(const std::filesystem::path& path) { return parse_checkpoint(read_text(path)); }

// --- manifest

namespace {

Json folds_json(const FoldPlan& plan) {
  Json j;
  j["k"] = plan.folds.size();
  j["test_fold"] = 0;
  j["folds"] = plan.folds;
  return j;
}

}  // namespace

std::string format_folds(const FoldPlan& plan) { return folds_json(plan).dump(1) + "\n"; }

std::string format_manifest(const Manifest& m) {
  Json j;
  j["ids"] = m.ids;
  j["seed"] = m.seed;
  j["cfg"] = to_json(m.synth);
  Json scales = Json::object();
  for (std::size_t i = 0; i < m.ids.size(); ++i) scales[m.ids[i]] = m.scale_factors.at(i);
  j["scale_factors"] = std::move(scales);
  j["splits"] = folds_json(m.splits);
  return j.dump(1) + "\n";
}

Manifest parse_manifest(std::string_view text) {
  const Json j = parse_json(text, "manifest");
  Manifest m;
  try {
    m.ids = j.at("ids").get<std::vector<std::string>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("cfg")) m.synth = synth_config_from_json(j["cfg"]);
    if (j.contains("scale_factors"))
      for (const auto& id : m.ids) m.scale_factors.push_back(j["scale_factors"].value(id, 1.0));
    else
      m.scale_factors.assign(m.ids.size(), 1.0);
    m.splits.folds = j.at("splits").at("folds").get<std::vector<std::vector<std::string>>>();
  } catch (const Json::exception& e) {
    config_error("manifest", e.what());
  }
  if (m.splits.folds.empty()) config_error("manifest", "splits.folds is empty");
  return m;
}

void save_manifest(const Manifest& m, const std::filesystem::path& path) { write_text(format_manifest(m), path); }

Manifest load_manifest(const std::filesystem::path& path) { return parse_manifest(read_text(path)); }

GraphPair load_pair(const std::filesystem::path& root, const std::string& id) {
  return GraphPair(load_graph(root / "source" / (id + ".csv")), load_graph(root / "target" / (id + ".csv")), id);
}

std::vector<std::string> split_ids(const Manifest& m, std::string_view split) {
  if (split == "all") return m.ids;
  if (split == "test") return m.splits.test();
  if (split == "train") return m.splits.non_test();
  if (split.starts_with("fold")) {
    const std::string digits(split.substr(4));
    if (!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos) {
      const auto r = std::stoul(digits);
      if (r < m.splits.folds.size()) return m.splits.folds[r];
    }
  }
  fail(ErrorKind::Config, "unknown split '" + std::string(split) + "' (test|train|all|fold<r>)");
}

// --- run config

RunConfig run_config_from_json(const Json& j, const std::filesystem::path& base_dir) {
  RunConfig rc;
  auto resolve = [&](const Json& v) {
    std::filesystem::path p(v.get<std::string>());
    return p.is_absolute() ? p : base_dir / p;
  };
  apply_fields(j, "run config",
               {{"model", [&](const Json& v) { rc.model = model_config_from_json(v); }},
                {"train",
                 [&](const Json& v) {
                   rc.train = train_config_from_json(v);
                   rc.epochs_set = v.contains("epochs");
                 }},
                {"mode", [&](const Json& v) { rc.mode = parse_train_mode(v.get<std::string>()); }},
                {"data_root", [&](const Json& v) { rc.data_root = resolve(v); }},
                {"out_dir", [&](const Json& v) { rc.out_dir = resolve(v); }},
                {"synth", [&](const Json& v) { rc.synth = synth_config_from_json(v); }}});
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const auto base = std::filesystem::absolute(path).parent_path();
  return run_config_from_json(parse_json(read_text(path), "run config " + path.string()), base);
}

}  // namespace gtg
