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
#include "gtg/graph.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gtg/error.hpp"

namespace gtg {

std::string Violation::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::NonSquare: os << "NonSquare(" << i << "," << j << ")"; break;
    case Kind::NonFinite: os << "NonFinite(" << i << "," << j << ")"; break;
    case Kind::NegativeWeight: os << "NegativeWeight(" << i << "," << j << ")"; break;
    case Kind::NonzeroDiagonal: os << "NonzeroDiagonal(" << i << ")"; break;
    case Kind::NonSymmetric: os << "NonSymmetric(" << i << "," << j << "," << delta << ")"; break;
  }
  return os.str();
}

std::vector<Violation> validate(const Matrix& adj) {
  using K = Violation::Kind;
  std::vector<Violation> out;
  if (adj.rows() != adj.cols() || adj.rows() == 0) {
    out.push_back({K::NonSquare, adj.rows(), adj.cols()});
    return out;
  }
  const std::size_t n = adj.rows();
  // Entry checks on the upper triangle only; a bad lower entry without its
  // mirror surfaces as NonSymmetric.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double a = adj(i, j);
      if (!std::isfinite(a)) {
        out.push_back({K::NonFinite, i, j});
        continue;
      }
      if (i == j) {
        if (a != 0.0) out.push_back({K::NonzeroDiagonal, i, i});
        continue;
      }
      if (a < 0.0) out.push_back({K::NegativeWeight, i, j});
      const double b = adj(j, i);
      if (a != b) out.push_back({K::NonSymmetric, i, j, std::isfinite(b) ? std::abs(a - b) : HUGE_VAL});
    }
  }
  return out;
}

WeightedGraph::WeightedGraph(Matrix adj) : adj_(std::move(adj)) {
  auto violations = validate(adj_);
  if (!violations.empty()) throw InvalidGraphError(violations.front());
  // Canonicalize -0.0 so formatting and equality are stable.
  for (double& v : adj_.data())
    if (v == 0.0) v = 0.0;
}

double WeightedGraph::max_weight() const noexcept {
  double m = 0.0;
  for (double v : adj_.data()) m = std::max(m, v);
  return m;
}

std::size_t BinaryGraph::edge_count() const noexcept {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) c += edge(i, j);
  return c;
}

GraphPair::GraphPair(WeightedGraph s, WeightedGraph t, std::string name)
    : source(std::move(s)), target(std::move(t)), id(std::move(name)) {
  if (source.n() != target.n())
    fail(ErrorKind::ShapeMismatch, "pair " + id + ": source has " + std::to_string(source.n()) +
                                       " nodes, target has " + std::to_string(target.n()));
}

BinaryGraph binarize(const WeightedGraph& g, double eps) {
  if (!(eps >= 0.0)) fail(ErrorKind::InvalidArgument, "binarize: eps must be >= 0");
  BinaryGraph b(g.n());
  for (std::size_t i = 0; i < g.n(); ++i)
    for (std::size_t j = i + 1; j < g.n(); ++j) b.set_edge(i, j, g(i, j) > eps);
  return b;
}

Matrix normalize_adjacency(const Matrix& a) {
  if (a.rows() != a.cols()) fail(ErrorKind::ShapeMismatch, "normalize_adjacency: matrix is not square");
  const std::size_t n = a.rows();
  std::vector<double> inv_sqrt_deg(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 1.0;
    for (std::size_t j = 0; j < n; ++j) d += a(i, j);
    inv_sqrt_deg[i] = 1.0 / std::sqrt(d);
  }
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double aij = a(i, j) + (i == j ? 1.0 : 0.0);
      out(i, j) = aij * (inv_sqrt_deg[i] * inv_sqrt_deg[j]);
    }
  return out;
}

WeightedGraph minmax_normalize(const WeightedGraph& g) {
  const double m = g.max_weight();
  if (m == 0.0) return g;
  Matrix out = g.adj();
  for (double& v : out.data()) v /= m;
  return WeightedGraph(std::move(out));
}

namespace {

void append_number(std::string& out, double v) {
  if (v == 0.0) v = 0.0;
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
  out.append(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string format_matrix_csv(const Matrix& m) {
  std::string out;
  out.reserve(m.size() * 12);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out.push_back(',');
      append_number(out, m(i, j));
    }
    out.push_back('\n');
  }
  return out;
}

Matrix parse_matrix_csv(std::string_view text) {
  std::vector<double> values;
  std::size_t cols = 0, rows = 0, line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty()) {
      if (!trim(text).empty()) fail(ErrorKind::Parse, "ParseError(" + std::to_string(line_no) + "): empty line");
      break;
    }
    std::size_t count = 0;
    while (true) {
      const auto comma = line.find(',');
      std::string_view cell = trim(line.substr(0, comma));
      double v = 0.0;
      const char* end = cell.data() + cell.size();
      auto res = std::from_chars(cell.data(), end, v);
      if (cell.empty() || res.ec != std::errc{} || res.ptr != end)
        fail(ErrorKind::Parse, "ParseError(" + std::to_string(line_no) + "): bad number '" + std::string(cell) + "'");
      values.push_back(v);
      ++count;
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    if (rows == 0) cols = count;
    else if (count != cols)
      fail(ErrorKind::Parse, "ParseError(" + std::to_string(line_no) + "): expected " + std::to_string(cols) +
                                 " values, found " + std::to_string(count));
    ++rows;
  }
  if (rows == 0) fail(ErrorKind::Parse, "ParseError(1): empty matrix");
  return Matrix(rows, cols, std::move(values));
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_matrix_csv(buf.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_matrix_csv(const Matrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  const std::string text = format_matrix_csv(m);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
}

WeightedGraph load_graph(const std::filesystem::path& path) { return WeightedGraph(read_matrix_csv(path)); }

void save_graph(const WeightedGraph& g, const std::filesystem::path& path) { write_matrix_csv(g.adj(), path); }

}  // namespace gtg
