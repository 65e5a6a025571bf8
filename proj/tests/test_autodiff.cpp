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
#include <doctest.h>

#include <cmath>
#include <functional>

#include "gtg/autodiff.hpp"
#include "gtg/rng.hpp"

using namespace gtg;
using namespace gtg::ad;

namespace {

struct Shape {
  std::size_t rows, cols;
};

// Random inputs kept away from the relu/abs kink at 0.
Matrix random_input(Shape s, SplitMix64& rng) {
  Matrix m(s.rows, s.cols);
  for (double& v : m.data()) {
    const double mag = rng.uniform(0.1, 1.5);
    v = rng.uniform() < 0.5 ? -mag : mag;
  }
  return m;
}

using OpFn = std::function<Var(Tape&, std::span<const Var>)>;

// Reduces the op output to a scalar with a fixed random bilinear form
// r1^T out r2 and checks the gradient of every input.
double op_grad_error(std::vector<Shape> shapes, const OpFn& op, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> theta;
  for (auto s : shapes) {
    const auto m = random_input(s, rng);
    theta.insert(theta.end(), m.values().begin(), m.values().end());
  }
  Tape probe;
  std::vector<Var> probe_in;
  {
    std::size_t off = 0;
    for (auto s : shapes) {
      probe_in.push_back(probe.constant(Matrix(s.rows, s.cols, std::vector<double>(theta.begin() + off,
                                                                                     theta.begin() + off + s.rows * s.cols))));
      off += s.rows * s.cols;
    }
  }
  const Matrix out_shape = probe.value(op(probe, probe_in));
  const Matrix r1 = random_input({1, out_shape.rows()}, rng), r2 = random_input({out_shape.cols(), 1}, rng);

  Objective f = [&](std::span<const double> th, std::vector<double>* grad) {
    Tape t;
    std::vector<Var> in;
    std::size_t off = 0;
    for (auto s : shapes) {
      in.push_back(t.leaf(Matrix(s.rows, s.cols, std::vector<double>(th.begin() + off, th.begin() + off + s.rows * s.cols))));
      off += s.rows * s.cols;
    }
    const Var loss = matmul(t, matmul(t, t.constant(r1), op(t, in)), t.constant(r2));
    if (grad) {
      t.backward(loss);
      grad->clear();
      for (auto v : in) {
        const auto g = t.grad(v);
        grad->insert(grad->end(), g.values().begin(), g.values().end());
      }
    }
    return t.value(loss)(0, 0);
  };
  return grad_check(f, theta, 1e-5).max_rel_error;
}

}  // namespace

TEST_CASE("every primitive op matches central differences") {
  const std::vector<std::pair<const char*, std::pair<std::vector<Shape>, OpFn>>> cases = {
      {"matmul", {{{3, 4}, {4, 2}}, [](Tape& t, std::span<const Var> x) { return matmul(t, x[0], x[1]); }}},
      {"add", {{{3, 2}, {3, 2}}, [](Tape& t, std::span<const Var> x) { return add(t, x[0], x[1]); }}},
      {"sub", {{{3, 2}, {3, 2}}, [](Tape& t, std::span<const Var> x) { return sub(t, x[0], x[1]); }}},
      {"scale", {{{2, 3}}, [](Tape& t, std::span<const Var> x) { return scale(t, x[0], -2.5); }}},
      {"relu", {{{4, 3}}, [](Tape& t, std::span<const Var> x) { return relu(t, x[0]); }}},
      {"sigmoid", {{{4, 3}}, [](Tape& t, std::span<const Var> x) { return sigmoid(t, x[0]); }}},
      {"abs", {{{4, 3}}, [](Tape& t, std::span<const Var> x) { return ad::abs(t, x[0]); }}},
      {"concat_cols", {{{3, 2}, {3, 1}}, [](Tape& t, std::span<const Var> x) { return concat_cols(t, x); }}},
      {"concat_rows", {{{2, 3}, {1, 3}}, [](Tape& t, std::span<const Var> x) { return concat_rows(t, x); }}},
      {"mean_rows", {{{5, 3}}, [](Tape& t, std::span<const Var> x) { return mean_rows(t, x[0]); }}},
      {"add_rowvec", {{{4, 3}, {1, 3}}, [](Tape& t, std::span<const Var> x) { return add_rowvec(t, x[0], x[1]); }}},
      {"gather_rows",
       {{{3, 2}}, [](Tape& t, std::span<const Var> x) { return gather_rows(t, x[0], {2, 0, 2, 1}); }}},
      {"slice_rows", {{{5, 2}}, [](Tape& t, std::span<const Var> x) { return slice_rows(t, x[0], 1, 4); }}},
      {"mirror_pairs", {{{6, 1}}, [](Tape& t, std::span<const Var> x) { return mirror_pairs(t, x[0], 4, -3.0); }}},
  };
  for (std::uint64_t seed = 1; seed <= 5; ++seed)
    for (const auto& [name, c] : cases) {
      CAPTURE(name);
      CAPTURE(seed);
      CHECK(op_grad_error(c.first, c.second, seed) < 1e-6);
    }
}

TEST_CASE("losses match central differences") {
  SplitMix64 rng(9);
  const std::size_t n = 5;
  BinaryGraph targets(n);
  Matrix wt(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool on = rng.uniform() < 0.5;
      targets.set_edge(i, j, on);
      wt(i, j) = wt(j, i) = on ? rng.uniform(0.1, 1.0) : 0.0;
    }
  const auto mask = PairMask::upper_triangle(n);
  Objective f = [&](std::span<const double> th, std::vector<double>* grad) {
    Tape t;
    const Var l = t.leaf(Matrix(n, n, std::vector<double>(th.begin(), th.begin() + n * n)));
    const Var w = t.leaf(Matrix(n, n, std::vector<double>(th.begin() + n * n, th.end())));
    const Var loss = add(t, scale(t, bce_with_logits_masked(t, l, targets, mask), 10.0),
                         scale(t, mae_masked(t, w, wt, mask), 5.0));
    if (grad) {
      t.backward(loss);
      *grad = t.grad(l).values();
      const auto gw = t.grad(w).values();
      grad->insert(grad->end(), gw.begin(), gw.end());
    }
    return t.value(loss)(0, 0);
  };
  std::vector<double> theta(2 * n * n);
  for (std::size_t i = 0; i < n * n; ++i) theta[i] = rng.uniform(-3, 3);
  for (std::size_t i = n * n; i < 2 * n * n; ++i) theta[i] = rng.uniform(0.0, 1.0) + 0.013;  // off the targets
  CHECK(grad_check(f, theta, 1e-5).max_rel_error < 1e-6);
}

TEST_CASE("bce examples and stability") {
  Tape t;
  const auto mask = PairMask::upper_triangle(2);
  BinaryGraph one(2);
  one.set_edge(0, 1, true);
  const auto zero_logits = t.constant(Matrix(2, 2));
  CHECK(t.value(bce_with_logits_masked(t, zero_logits, one, mask))(0, 0) == doctest::Approx(std::log(2.0)));
  const auto huge = t.constant(Matrix{{0, 800}, {800, 0}});
  CHECK(t.value(bce_with_logits_masked(t, huge, one, mask))(0, 0) == doctest::Approx(0.0));
  const auto tiny = t.constant(Matrix{{0, -800}, {-800, 0}});
  CHECK(t.value(bce_with_logits_masked(t, tiny, one, mask))(0, 0) == doctest::Approx(800.0));
}

TEST_CASE("mae matches a brute-force loop over the upper triangle") {
  SplitMix64 rng(3);
  const std::size_t n = 35;
  Matrix p(n, n), q(n, n);
  for (double& v : p.data()) v = rng.uniform();
  for (double& v : q.data()) v = rng.uniform();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s += std::abs(p(i, j) - q(i, j));
  Tape t;
  const double got = t.value(mae_masked(t, t.constant(p), q, PairMask::upper_triangle(n)))(0, 0);
  CHECK(got == doctest::Approx(s / (n * (n - 1) / 2.0)).epsilon(1e-14));
}

TEST_CASE("abs and mae use sign(0) = 0") {
  Tape t;
  const Var x = t.leaf(Matrix{{0.0, -2.0, 3.0}});
  const Var y = matmul(t, ad::abs(t, x), t.constant(Matrix{{1.0}, {1.0}, {1.0}}));
  t.backward(y);
  CHECK(t.grad(x) == Matrix{{0.0, -1.0, 1.0}});

  Tape u;
  const Var p = u.leaf(Matrix{{0, 0.5}, {0.5, 0}});
  const Var loss = mae_masked(u, p, Matrix{{0, 0.5}, {0.5, 0}}, PairMask::upper_triangle(2));
  u.backward(loss);
  const Matrix gp = u.grad(p);
  for (double g : gp.values()) CHECK(g == 0.0);
}

TEST_CASE("tape errors") {
  Tape t;
  const Var x = t.leaf(Matrix{{1, 2}});
  CHECK_THROWS_AS(t.backward(x), Error);
  try {
    t.backward(x);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonScalarLoss);
  }

  const Var s = mean_rows(t, matmul(t, x, t.constant(Matrix{{1}, {1}})));
  t.backward(s);
  try {
    t.backward(s);
    FAIL("expected DoubleBackward");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DoubleBackward);
  }

  try {
    matmul(t, x, x);
    FAIL("expected ShapeMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ShapeMismatch);
  }

  try {
    Tape u;
    mae_masked(u, u.constant(Matrix(1, 1)), Matrix(1, 1), PairMask::upper_triangle(1));
    FAIL("expected EmptyMask");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyMask);
  }

  try {
    Tape u;
    const Var big = u.constant(Matrix{{1e308}});
    add(u, big, big);
    FAIL("expected NonFinite");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonFinite);
  }
}

TEST_CASE("gradients accumulate over shared uses") {
  Tape t;
  const Var x = t.leaf(Matrix{{2.0}});
  const Var y = add(t, matmul(t, x, x), x);  // x^2 + x
  t.backward(y);
  CHECK(t.grad(x)(0, 0) == 5.0);
}

TEST_CASE("grad_check detects a corrupted backward rule") {
  set_fault(Fault::SigmoidBackward);
  const double err = op_grad_error({{3, 3}}, [](Tape& t, std::span<const Var> x) { return sigmoid(t, x[0]); }, 4);
  set_fault(Fault::None);
  CHECK(err > 1e-2);
}
