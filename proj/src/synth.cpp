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
#include "gtg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <system_error>

#include "gtg/error.hpp"
#include "gtg/io.hpp"
#include "gtg/rng.hpp"
#include "gtg/training.hpp"

namespace gtg {

namespace {

constexpr std::uint64_t kSourceStream = 10;
constexpr std::uint64_t kTargetStream = 11;

// Within-community edges are stronger than between-community ones.
constexpr double kMeanIn = 0.6, kSdIn = 0.2;
constexpr double kMeanOut = 0.3, kSdOut = 0.15;

double truncated_normal(SplitMix64& rng, double mean, double sd) {
  for (;;) {
    const double x = rng.normal(mean, sd);
    if (x > 0.0 && x <= 1.0) return x;
  }
}

}  // namespace

std::string_view to_string(SynthTransform t) { return t == SynthTransform::Identity ? "identity" : "power"; }

SynthTransform parse_synth_transform(std::string_view s) {
  if (s == "identity") return SynthTransform::Identity;
  if (s == "power") return SynthTransform::Power;
  fail(ErrorKind::Config, "unknown synth transform '" + std::string(s) + "' (identity|power)");
}

void SynthConfig::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorKind::Config, "synth config: " + what); };
  if (n_graphs == 0) bad("n_graphs must be positive");
  if (n < 2) bad("n must be at least 2");
  if (modules == 0 || modules > n) bad("modules must be in 1..n");
  if (!(p_in >= 0.0 && p_in <= 1.0)) bad("p_in must lie in [0,1]");
  if (!(p_out >= 0.0 && p_out <= 1.0)) bad("p_out must lie in [0,1]");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) bad("noise_sigma must be >= 0");
  if (folds == 0) bad("folds must be positive");
}

std::string pair_id(std::size_t index, std::size_t n_graphs) {
  const std::size_t width = std::max<std::size_t>(3, std::to_string(n_graphs > 0 ? n_graphs - 1 : 0).size());
  std::string digits = std::to_string(index);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return "g" + digits;
}

std::size_t community_of(std::size_t i, std::size_t n, std::size_t modules) { return i * modules / n; }

double expected_density(const SynthConfig& cfg) {
  double sum = 0.0;
  for (std::size_t i = 0; i < cfg.n; ++i)
    for (std::size_t j = i + 1; j < cfg.n; ++j)
      sum += community_of(i, cfg.n, cfg.modules) == community_of(j, cfg.n, cfg.modules) ? cfg.p_in : cfg.p_out;
  return sum / static_cast<double>(cfg.n * (cfg.n - 1) / 2);
}

SynthGraph generate(const SynthConfig& cfg, std::size_t index) {
  cfg.validate();
  if (index >= cfg.n_graphs)
    fail(ErrorKind::InvalidArgument, "synth index " + std::to_string(index) + " >= n_graphs " +
                                         std::to_string(cfg.n_graphs));
  const std::size_t n = cfg.n;
  SplitMix64 rng(derive_seed(cfg.seed, kSourceStream, index));
  Matrix raw(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool same = community_of(i, n, cfg.modules) == community_of(j, n, cfg.modules);
      if (rng.uniform() >= (same ? cfg.p_in : cfg.p_out)) continue;
      const double w = same ? truncated_normal(rng, kMeanIn, kSdIn) : truncated_normal(rng, kMeanOut, kSdOut);
      raw(i, j) = raw(j, i) = w;
    }
  WeightedGraph unscaled(std::move(raw));
  const double scale = unscaled.max_weight();
  WeightedGraph source = minmax_normalize(unscaled);

  // t = clamp(f(s) + sigma * u_i * u_j) on the support of s, with the lower
  // clamp kept strictly positive so the support is preserved.
  SplitMix64 noise(derive_seed(cfg.seed, kTargetStream, index));
  std::vector<double> u(n);
  for (auto& v : u) v = noise.normal();
  Matrix t(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = source(i, j);
      if (s <= 0.0) continue;
      const double base = cfg.transform == SynthTransform::Power ? std::pow(s, kPowerExponent) : s;
      const double floor = std::min(base, 1e-3);
      t(i, j) = t(j, i) = std::clamp(base + cfg.noise_sigma * u[i] * u[j], floor, 1.0);
    }
  return {std::move(source), WeightedGraph(std::move(t)), scale > 0.0 ? scale : 1.0};
}

GraphPair generate_pair(const SynthConfig& cfg, std::size_t index) {
  auto g = generate(cfg, index);
  return GraphPair(std::move(g.source), std::move(g.target), pair_id(index, cfg.n_graphs));
}

std::vector<std::string> write_dataset(const SynthConfig& cfg, const std::filesystem::path& root) {
  cfg.validate();
  std::error_code ec;
  if (!root.parent_path().empty() && !std::filesystem::is_directory(root.parent_path(), ec))
    fail(ErrorKind::Io, "IoError: parent directory does not exist: " + root.parent_path().string());
  std::filesystem::create_directories(root / "source", ec);
  if (!ec) std::filesystem::create_directories(root / "target", ec);
  if (ec) fail(ErrorKind::Io, "IoError: cannot create " + root.string() + ": " + ec.message());

  Manifest manifest;
  manifest.seed = cfg.seed;
  manifest.synth = cfg;
  for (std::size_t i = 0; i < cfg.n_graphs; ++i) {
    const auto id = pair_id(i, cfg.n_graphs);
    auto g = generate(cfg, i);
    save_graph(g.source, root / "source" / (id + ".csv"));
    save_graph(g.target, root / "target" / (id + ".csv"));
    manifest.ids.push_back(id);
    manifest.scale_factors.push_back(g.scale_factor);
  }
  manifest.splits = kfold_split(manifest.ids, std::min(cfg.folds, manifest.ids.size()), cfg.seed);
  save_manifest(manifest, root / "manifest.json");
  return manifest.ids;
}

}  // namespace gtg
