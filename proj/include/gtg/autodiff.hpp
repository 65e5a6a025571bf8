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

// Dense define-by-run reverse-mode differentiation.
//
// A Tape owns every value produced during one forward pass. Ops append a node
// holding the forward result plus a closure that pushes the node's gradient
// into its parents. Since nodes are appended after their parents, the tape is
// already in topological order and backward() is a single reverse sweep.
//
// Only row-vector bias addition broadcasts; every other shape mismatch throws.

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "gtg/graph.hpp"
#include "gtg/matrix.hpp"

namespace gtg::ad {

using Tensor = Matrix;

/// Handle to a node on a Tape. Only meaningful for the tape that issued it.
struct Var {
  std::size_t id = 0;
};

class Tape {
 public:
  using Backward = std::function<void(Tape&, std::size_t self)>;

  Var constant(Tensor value);
  /// Differentiable input (a parameter).
  Var leaf(Tensor value);

  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  /// Gradient of the last backward() target; zeros if v never received one.
  Tensor grad(Var v) const;
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }

  std::size_t size() const noexcept { return nodes_.size(); }

  /// Reverse sweep from a 1x1 node. Throws NonScalarLoss, or DoubleBackward
  /// if called again without clear_grads().
  void backward(Var loss);
  void clear_grads();

  // --- for op implementations
  Var record(std::string_view op, Tensor value, std::vector<Var> parents, Backward rule);
  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  const Tensor& grad_of(std::size_t id) const { return nodes_[id].grad; }
  /// Parent gradient buffer to accumulate into; nullptr if the parent does not
  /// require a gradient.
  Tensor* grad_sink(Var parent);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    std::vector<Var> parents;
    Backward rule;
  };
  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

// --- primitive ops

Var matmul(Tape& t, Var a, Var b);
Var add(Tape& t, Var a, Var b);
Var sub(Tape& t, Var a, Var b);
Var scale(Tape& t, Var a, double c);
Var relu(Tape& t, Var x);
Var sigmoid(Tape& t, Var x);
Var abs(Tape& t, Var x);
Var concat_cols(Tape& t, std::span<const Var> parts);
Var concat_rows(Tape& t, std::span<const Var> parts);
/// 1 x cols mean over rows.
Var mean_rows(Tape& t, Var x);
/// x (r x c) + b (1 x c) on every row.
Var add_rowvec(Tape& t, Var x, Var b);
/// out[r] = x[index[r]]; backward scatter-adds.
Var gather_rows(Tape& t, Var x, std::vector<std::size_t> index);
Var slice_rows(Tape& t, Var x, std::size_t begin, std::size_t end);
/// Builds an n x n symmetric matrix from an (n(n-1)/2) x 1 column of
/// upper-triangle values in lexicographic (i<j) order; the diagonal is filled
/// with `diagonal`.
Var mirror_pairs(Tape& t, Var pairs, std::size_t n, double diagonal);

/// Entries of an n x n matrix a loss is taken over.
class PairMask {
 public:
  /// Strict upper triangle.
  static PairMask upper_triangle(std::size_t n);
  /// Strict upper-triangle entries where support is positive.
  static PairMask upper_triangle_support(const Matrix& support);
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t n() const noexcept { return n_; }
  std::span<const std::pair<std::size_t, std::size_t>> entries() const noexcept { return entries_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> entries_;
};

/// Mean over masked entries of max(l,0) - t*l + ln(1 + e^-|l|). Throws
/// EmptyMask / ShapeMismatch.
Var bce_with_logits_masked(Tape& t, Var logits, const BinaryGraph& targets, const PairMask& mask);

/// Mean |pred - target| over masked entries; subgradient sign(0) = 0.
Var mae_masked(Tape& t, Var pred, const Matrix& target, const PairMask& mask);

// --- gradient checking

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

/// Objective for grad_check: returns f(theta); when `grad` is non-null also
/// fills it with the analytic gradient.
using Objective = std::function<double(std::span<const double> theta, std::vector<double>* grad)>;

/// Central differences per coordinate, relative error
/// |g_a - g_n| / max(1, |g_a|, |g_n|).
GradCheckResult grad_check(const Objective& f, std::vector<double> theta, double h);

// --- mutation testing hook

enum class Fault { None, SigmoidBackward };
void set_fault(Fault f) noexcept;
Fault fault() noexcept;

}  // namespace gtg::ad
