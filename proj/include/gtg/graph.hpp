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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gtg/error.hpp"
#include "gtg/matrix.hpp"

namespace gtg {

struct Violation {
  enum class Kind { NonSquare, NonFinite, NegativeWeight, NonzeroDiagonal, NonSymmetric };
  Kind kind;
  std::size_t i = 0;
  std::size_t j = 0;
  double delta = 0.0;  // |a_ij - a_ji| for NonSymmetric

  std::string to_string() const;
  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Raised when a matrix fails the WeightedGraph invariants; carries the first
/// violation found.
class InvalidGraphError : public Error {
 public:
  explicit InvalidGraphError(Violation v) : Error(ErrorKind::InvalidGraph, v.to_string()), violation_(v) {}
  const Violation& violation() const noexcept { return violation_; }

 private:
  Violation violation_;
};

/// Every invariant violation of a candidate adjacency matrix, in row-major
/// scan order. Symmetry is checked exactly (tolerance 0).
std::vector<Violation> validate(const Matrix& adj);

/// Undirected weighted graph: symmetric, zero diagonal, finite nonnegative
/// weights. The invariants are checked on construction, so every live
/// instance is valid.
class WeightedGraph {
 public:
  explicit WeightedGraph(Matrix adj);

  std::size_t n() const noexcept { return adj_.rows(); }
  const Matrix& adj() const noexcept { return adj_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return adj_(i, j); }

  double max_weight() const noexcept;
  friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;

 private:
  Matrix adj_;
};

class BinaryGraph {
 public:
  explicit BinaryGraph(std::size_t n) : n_(n), bits_(n * n, 0) {}

  std::size_t n() const noexcept { return n_; }
  bool edge(std::size_t i, std::size_t j) const noexcept { return bits_[i * n_ + j] != 0; }
  void set_edge(std::size_t i, std::size_t j, bool on) noexcept {
    bits_[i * n_ + j] = on;
    bits_[j * n_ + i] = on;
  }
  std::size_t edge_count() const noexcept;

 private:
  std::size_t n_;
  std::vector<std::uint8_t> bits_;
};

struct GraphPair {
  WeightedGraph source;
  WeightedGraph target;
  std::string id;

  GraphPair(WeightedGraph s, WeightedGraph t, std::string name);
};

/// out(i,j) = 1 iff adj(i,j) > eps.
BinaryGraph binarize(const WeightedGraph& g, double eps = 0.0);

/// D^-1/2 (A + I) D^-1/2 with D = rowsum(A + I).
Matrix normalize_adjacency(const Matrix& a);

/// Divides every weight by the maximum weight; the all-zero graph is returned
/// unchanged.
WeightedGraph minmax_normalize(const WeightedGraph& g);

// --- CSV interchange: N lines of N comma-separated values, LF endings,
// 9 significant digits, locale independent.

std::string format_matrix_csv(const Matrix& m);
Matrix parse_matrix_csv(std::string_view text);
Matrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const Matrix& m, const std::filesystem::path& path);

/// read_matrix_csv + invariant check; the first violation becomes an
/// InvalidGraph error naming it.
WeightedGraph load_graph(const std::filesystem::path& path);
void save_graph(const WeightedGraph& g, const std::filesystem::path& path);

}  // namespace gtg
