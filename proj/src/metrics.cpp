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
#include "gtg/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "gtg/error.hpp"
#include "gtg/linalg.hpp"

namespace gtg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_same_size(const WeightedGraph& a, const WeightedGraph& b, const char* op) {
  if (a.n() != b.n())
    fail(ErrorKind::ShapeMismatch, std::string("SizeMismatch in ") + op + ": " + std::to_string(a.n()) + " vs " +
                                       std::to_string(b.n()));
}

std::vector<double> strengths(const WeightedGraph& g) {
  std::vector<double> s(g.n(), 0.0);
  for (std::size_t i = 0; i < g.n(); ++i)
    for (double w : g.adj().row(i)) s[i] += w;
  return s;
}

double mean_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return a.empty() ? 0.0 : s / static_cast<double>(a.size());
}

bool is_zero_graph(const WeightedGraph& g) { return g.max_weight() == 0.0; }

// Power iteration on A + I (same eigenvectors as A, but the shift keeps
// bipartite graphs from oscillating). Returns false on no convergence.
bool perron_vector(const WeightedGraph& g, double tol, int max_iter, std::vector<double>& x) {
  const std::size_t n = g.n();
  x.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> next(n);
  for (int it = 0; it < max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = x[i];
      auto row = g.adj().row(i);
      for (std::size_t j = 0; j < n; ++j) s += row[j] * x[j];
      next[i] = s;
    }
    double norm = 0.0;
    for (double v : next) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) return false;
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= norm;
      change += (next[i] - x[i]) * (next[i] - x[i]);
    }
    x.swap(next);
    if (std::sqrt(change) < tol) return true;
  }
  return false;
}

std::vector<std::vector<std::size_t>> components(const WeightedGraph& g) {
  const std::size_t n = g.n();
  std::vector<int> seen(n, 0);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> comp{s};
    seen[s] = 1;
    for (std::size_t head = 0; head < comp.size(); ++head)
      for (std::size_t v = 0; v < n; ++v)
        if (!seen[v] && g(comp[head], v) > 0.0) {
          seen[v] = 1;
          comp.push_back(v);
        }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

std::vector<double> information_connected(const Matrix& w) {
  const std::size_t n = w.rows();
  Matrix m(n, n, 1.0);  // L + J
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      s += w(i, j);
      if (i != j) m(i, j) -= w(i, j);
    }
    m(i, i) += s;
  }
  const Matrix c = inverse(m);
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += c(i, i);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += c(i, j);
    out[i] = 1.0 / (c(i, i) + (trace - 2.0 * row) / static_cast<double>(n));
  }
  return out;
}

}  // namespace

double mae_edges(const WeightedGraph& pred, const WeightedGraph& target) {
  require_same_size(pred, target, "mae_edges");
  const std::size_t n = pred.n();
  if (n < 2) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s += std::abs(pred(i, j) - target(i, j));
  return s / static_cast<double>(n * (n - 1) / 2);
}

std::vector<double> degree_centrality(const WeightedGraph& g) {
  auto s = strengths(g);
  if (g.n() < 2) return std::vector<double>(g.n(), 0.0);
  for (double& v : s) v /= static_cast<double>(g.n() - 1);
  return s;
}

std::vector<double> betweenness_centrality(const WeightedGraph& g) {
  const std::size_t n = g.n();
  std::vector<double> bc(n, 0.0);
  if (n < 3) return bc;
  std::vector<double> dist(n), sigma(n), delta(n);
  std::vector<std::vector<std::size_t>> preds(n);
  std::vector<char> done(n);
  std::vector<std::size_t> order;
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(done.begin(), done.end(), 0);
    for (auto& p : preds) p.clear();
    order.clear();
    dist[s] = 0.0;
    sigma[s] = 1.0;
    // Dense Dijkstra; path lengths are sums of 1/w so equal lengths are
    // compared with a relative tolerance.
    for (;;) {
      std::size_t u = n;
      for (std::size_t v = 0; v < n; ++v)
        if (!done[v] && dist[v] < kInf && (u == n || dist[v] < dist[u])) u = v;
      if (u == n) break;
      done[u] = 1;
      order.push_back(u);
      for (std::size_t v = 0; v < n; ++v) {
        const double w = g(u, v);
        if (w <= 0.0 || done[v]) continue;
        const double alt = dist[u] + 1.0 / w;
        const double tol = 1e-12 * std::max(1.0, alt);
        if (alt < dist[v] - tol) {
          dist[v] = alt;
          sigma[v] = sigma[u];
          preds[v].assign(1, u);
        } else if (std::abs(alt - dist[v]) <= tol) {
          sigma[v] += sigma[u];
          preds[v].push_back(u);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const auto w = *it;
      for (auto v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) bc[w] += delta[w];
    }
  }
  // Each unordered pair was counted from both endpoints.
  const double norm = static_cast<double>((n - 1) * (n - 2));
  for (double& v : bc) v /= norm;
  return bc;
}

std::vector<double> eigenvector_centrality(const WeightedGraph& g, double tol, int max_iter) {
  if (is_zero_graph(g)) fail(ErrorKind::NoConvergence, "NoConvergence: eigenvector centrality of an edgeless graph");
  std::vector<double> x;
  if (!perron_vector(g, tol, max_iter, x))
    fail(ErrorKind::NoConvergence, "NoConvergence: eigenvector centrality after " + std::to_string(max_iter) +
                                       " iterations");
  for (double& v : x) v = std::abs(v);
  return x;
}

InformationCentrality information_centrality(const WeightedGraph& g) {
  InformationCentrality out;
  out.values.assign(g.n(), 0.0);
  auto comps = components(g);
  if (comps.size() == 1) {
    out.values = information_connected(g.adj());
    return out;
  }
  out.used_largest_component = true;
  // Largest component; ties resolved toward the one holding the smallest id,
  // which is the earliest found.
  const auto& lcc = *std::max_element(comps.begin(), comps.end(),
                                      [](const auto& a, const auto& b) { return a.size() < b.size(); });
  if (lcc.size() < 2) return out;
  Matrix sub(lcc.size(), lcc.size());
  for (std::size_t a = 0; a < lcc.size(); ++a)
    for (std::size_t b = 0; b < lcc.size(); ++b) sub(a, b) = g(lcc[a], lcc[b]);
  const auto vals = information_connected(sub);
  for (std::size_t a = 0; a < lcc.size(); ++a) out.values[lcc[a]] = vals[a];
  return out;
}

std::vector<double> pagerank(const WeightedGraph& g, double damping, double tol) {
  const std::size_t n = g.n();
  const auto s = strengths(g);
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> x(n, inv_n), next(n);
  for (int it = 0; it < 100000; ++it) {
    double dangling = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (s[i] == 0.0) dangling += x[i];
    std::fill(next.begin(), next.end(), (1.0 - damping) * inv_n + damping * dangling * inv_n);
    for (std::size_t i = 0; i < n; ++i) {
      if (s[i] == 0.0) continue;
      const double share = damping * x[i] / s[i];
      auto row = g.adj().row(i);
      for (std::size_t j = 0; j < n; ++j) next[j] += share * row[j];
    }
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change += std::abs(next[i] - x[i]);
    x.swap(next);
    if (change < tol) break;
  }
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  for (double& v : x) v /= total;
  return x;
}

double spectral_radius(const WeightedGraph& g) {
  if (is_zero_graph(g)) return 0.0;
  std::vector<double> x;
  perron_vector(g, 1e-12, 100000, x);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < g.n(); ++i) {
    double ax = 0.0;
    for (std::size_t j = 0; j < g.n(); ++j) ax += g(i, j) * x[j];
    num += x[i] * ax;
    den += x[i] * x[i];
  }
  return num / den;
}

std::vector<double> katz_centrality(const WeightedGraph& g) {
  const std::size_t n = g.n();
  const auto s = strengths(g);
  // Gershgorin: lambda_max <= max strength; only estimate when that is not
  // already conclusive.
  const double bound = s.empty() ? 0.0 : *std::max_element(s.begin(), s.end());
  if (kKatzAlpha * bound >= 1.0) {
    const double lambda = spectral_radius(g);
    if (kKatzAlpha * lambda >= 1.0 - 1e-9)
      fail(ErrorKind::AlphaTooLarge, "AlphaTooLarge(" + std::to_string(lambda) + "): Katz alpha 0.1 needs lambda_max < 10");
  }
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = (i == j ? 1.0 : 0.0) - kKatzAlpha * g(i, j);
  auto x = lu_solve(std::move(m), std::vector<double>(n, 1.0));
  double norm = 0.0;
  for (double v : x) norm += v * v;
  norm = std::sqrt(norm);
  for (double& v : x) v /= norm;
  return x;
}

double laplacian_energy(const WeightedGraph& g) {
  double e = 0.0;
  for (double s : strengths(g)) e += s * s;
  for (std::size_t i = 0; i < g.n(); ++i)
    for (std::size_t j = i + 1; j < g.n(); ++j) e += 2.0 * g(i, j) * g(i, j);
  return e;
}

std::vector<double> laplacian_centrality(const WeightedGraph& g) {
  const std::size_t n = g.n();
  const double energy = laplacian_energy(g);
  std::vector<double> out(n, 0.0);
  if (energy == 0.0) return out;
  const auto s = strengths(g);
  // Removing i drops s_i^2, lowers every neighbor strength by w_ij and removes
  // the 2 w_ij^2 edge terms: s_i^2 + sum_j (2 s_j w_ij - w_ij^2) + 2 sum_j w_ij^2.
  for (std::size_t i = 0; i < n; ++i) {
    double drop = s[i] * s[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double w = g(i, j);
      drop += 2.0 * s[j] * w + w * w;
    }
    out[i] = drop / energy;
  }
  return out;
}

std::vector<double> clustering_coefficients(const WeightedGraph& g) {
  const std::size_t n = g.n();
  std::vector<double> c(n, 0.0);
  const double wmax = g.max_weight();
  if (wmax == 0.0) return c;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> nb;
    for (std::size_t j = 0; j < n; ++j)
      if (g(i, j) > 0.0) nb.push_back(j);
    const std::size_t k = nb.size();
    if (k < 2) continue;
    double sum = 0.0;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a + 1; b < k; ++b) {
        const double wjh = g(nb[a], nb[b]);
        if (wjh <= 0.0) continue;
        sum += std::cbrt((g(i, nb[a]) / wmax) * (wjh / wmax) * (g(nb[b], i) / wmax));
      }
    // Ordered (j,h) pairs count each triangle twice.
    c[i] = 2.0 * sum / static_cast<double>(k * (k - 1));
  }
  return c;
}

double clustering_difference(const WeightedGraph& pred, const WeightedGraph& target) {
  require_same_size(pred, target, "clustering_difference");
  return mean_abs_diff(clustering_coefficients(pred), clustering_coefficients(target));
}

Matrix laplacian(const WeightedGraph& g) {
  Matrix l(g.n(), g.n());
  const auto s = strengths(g);
  for (std::size_t i = 0; i < g.n(); ++i)
    for (std::size_t j = 0; j < g.n(); ++j) l(i, j) = i == j ? s[i] : -g(i, j);
  return l;
}

double laplacian_frobenius(const WeightedGraph& pred, const WeightedGraph& target) {
  require_same_size(pred, target, "laplacian_frobenius");
  const Matrix a = laplacian(pred), b = laplacian(target);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    s += d * d;
  }
  return std::sqrt(s);
}

std::string_view to_string(ScoredOutput w) { return w == ScoredOutput::Fused ? "fused" : "raw"; }

ScoredOutput parse_scored_output(std::string_view s) {
  if (s == "fused") return ScoredOutput::Fused;
  if (s == "raw") return ScoredOutput::Raw;
  fail(ErrorKind::Config, "unknown prediction output '" + std::string(s) + "' (fused|raw)");
}

MetricReport evaluate_all(const WeightedGraph& pred, const WeightedGraph& target, ScoredOutput which) {
  require_same_size(pred, target, "evaluate_all");
  MetricReport r;
  r.which = which;
  auto& v = r.values;
  auto centrality = [&](std::size_t slot, const char* flag, auto&& fn) {
    try {
      v[slot] = mean_abs_diff(fn(pred), fn(target));
    } catch (const Error& e) {
      v[slot] = kNaN;
      r.flags.emplace_back(flag);
    }
  };
  v[0] = mae_edges(pred, target);
  centrality(1, "deg_error", degree_centrality);
  centrality(2, "bc_error", betweenness_centrality);
  centrality(3, "ec_noconv", [](const WeightedGraph& g) { return eigenvector_centrality(g); });
  try {
    const auto ip = information_centrality(pred), it = information_centrality(target);
    if (ip.used_largest_component) r.flags.emplace_back("ic_lcc_pred");
    if (it.used_largest_component) r.flags.emplace_back("ic_lcc_target");
    v[4] = mean_abs_diff(ip.values, it.values);
  } catch (const Error&) {
    v[4] = kNaN;
    r.flags.emplace_back("ic_singular");
  }
  centrality(5, "pr_error", [](const WeightedGraph& g) { return pagerank(g); });
  centrality(6, "katz_alpha", katz_centrality);
  centrality(7, "lap_error", laplacian_centrality);
  v[8] = clustering_difference(pred, target);
  v[9] = laplacian_frobenius(pred, target);
  return r;
}

MetricReport evaluate_all(const DecodedGraph& decoded, const WeightedGraph& target, ScoredOutput which) {
  if (which == ScoredOutput::Fused) return evaluate_all(decoded.fused, target, which);
  Matrix w = decoded.weights;
  for (std::size_t i = 0; i < w.rows(); ++i) w(i, i) = 0.0;
  return evaluate_all(WeightedGraph(std::move(w)), target, which);
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

std::string fixed4(double v) {
  if (std::isnan(v)) return "nan";
  char buf[48];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 4);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string report_csv_header() {
  std::string h = "id";
  for (auto name : MetricReport::kNames) {
    h.push_back(',');
    h += name;
  }
  return h + ",flags\n";
}

std::string format_report_row(std::string_view id, const MetricReport& r) {
  std::string row(id);
  for (double v : r.values) {
    row.push_back(',');
    append_value(row, v);
  }
  row.push_back(',');
  row += to_string(r.which);
  for (const auto& f : r.flags) {
    row.push_back(';');
    row += f;
  }
  return row + "\n";
}

std::string format_summary_row(const std::vector<MetricReport>& reports) {
  std::string row = "mean±std";
  for (std::size_t m = 0; m < MetricReport::kCount; ++m) {
    // Failed metrics (NaN, flagged per row) are left out of the summary.
    double mean = 0.0, sq = 0.0, count = 0.0;
    for (const auto& r : reports)
      if (!std::isnan(r.values[m])) {
        mean += r.values[m];
        count += 1.0;
      }
    mean = count == 0.0 ? kNaN : mean / count;
    for (const auto& r : reports)
      if (!std::isnan(r.values[m])) sq += (r.values[m] - mean) * (r.values[m] - mean);
    const double sd = count == 0.0 ? kNaN : std::sqrt(sq / count);
    row += "," + fixed4(mean) + "±" + fixed4(sd);
  }
  row += ",";
  if (!reports.empty()) row += to_string(reports.front().which);
  return row + "\n";
}

}  // namespace gtg
