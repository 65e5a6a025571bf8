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

// Ten-metric graph comparison suite: edge MAE, seven per-node centrality
// MAEs, a clustering difference and the Laplacian Frobenius distance.
//
// Conventions (all weighted):
//   degree       strength / (n-1)
//   betweenness  Brandes, edge length 1/w, normalized by (n-1)(n-2)/2
//   eigenvector  shifted power iteration on A+I, L2-normalized, >= 0
//   information  Stephenson-Zelen on the weighted Laplacian, largest
//                connected component when disconnected
//   pagerank     damping 0.85, dangling mass spread uniformly, sums to 1
//   katz         (I - 0.1 A) x = 1, L2-normalized
//   laplacian    relative drop of Laplacian energy on node removal
//   clustering   Onnela geometric-mean clustering, per-node mean |diff|

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "gtg/graph.hpp"
#include "gtg/model.hpp"

namespace gtg {

double mae_edges(const WeightedGraph& pred, const WeightedGraph& target);

std::vector<double> degree_centrality(const WeightedGraph& g);
std::vector<double> betweenness_centrality(const WeightedGraph& g);

/// Throws NoConvergence (including for the all-zero graph).
std::vector<double> eigenvector_centrality(const WeightedGraph& g, double tol = 1e-10, int max_iter = 1000);

struct InformationCentrality {
  std::vector<double> values;
  bool used_largest_component = false;  // nodes outside it score 0
};
InformationCentrality information_centrality(const WeightedGraph& g);

std::vector<double> pagerank(const WeightedGraph& g, double damping = 0.85, double tol = 1e-12);

inline constexpr double kKatzAlpha = 0.1;
/// Throws AlphaTooLarge when kKatzAlpha * lambda_max >= 1.
std::vector<double> katz_centrality(const WeightedGraph& g);

/// Sum of squared strengths plus twice the sum of squared edge weights.
double laplacian_energy(const WeightedGraph& g);
std::vector<double> laplacian_centrality(const WeightedGraph& g);

std::vector<double> clustering_coefficients(const WeightedGraph& g);
double clustering_difference(const WeightedGraph& pred, const WeightedGraph& target);

/// Weighted combinatorial Laplacian diag(strength) - A.
Matrix laplacian(const WeightedGraph& g);
double laplacian_frobenius(const WeightedGraph& pred, const WeightedGraph& target);

/// Largest positive-weight eigenvalue estimate used by the Katz validity check.
double spectral_radius(const WeightedGraph& g);

enum class ScoredOutput { Fused, Raw };
std::string_view to_string(ScoredOutput w);
ScoredOutput parse_scored_output(std::string_view s);

struct MetricReport {
  static constexpr std::size_t kCount = 10;
  static constexpr std::array<std::string_view, kCount> kNames = {
      "mae", "mae_deg", "mae_bc", "mae_ec", "mae_ic", "mae_pr", "mae_katz", "mae_lap", "clust_diff", "lap_fro"};

  std::array<double, kCount> values{};  // NaN when a metric failed (see flags)
  ScoredOutput which = ScoredOutput::Fused;
  std::vector<std::string> flags;

  double mae() const { return values[0]; }
  double lap_fro() const { return values[9]; }
};

MetricReport evaluate_all(const WeightedGraph& pred, const WeightedGraph& target, ScoredOutput which);
/// Scores decoded.fused or decoded.weights (diagonal 0) against the target.
MetricReport evaluate_all(const DecodedGraph& decoded, const WeightedGraph& target, ScoredOutput which);

// --- report CSV

std::string report_csv_header();
std::string format_report_row(std::string_view id, const MetricReport& r);
/// "mean±std" row, population std, 4 decimals; NaN entries are skipped.
std::string format_summary_row(const std::vector<MetricReport>& reports);

}  // namespace gtg
