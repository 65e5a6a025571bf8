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
#include "gtg/autodiff.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "gtg/error.hpp"

namespace gtg::ad {

namespace {

std::atomic<Fault> g_fault{Fault::None};

std::string shape(const Tensor& t) { return std::to_string(t.rows()) + "x" + std::to_string(t.cols()); }

void require_same_shape(std::string_view op, const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorKind::ShapeMismatch, std::string(op) + ": " + shape(a) + " vs " + shape(b));
}

// c += a * b^T
void add_matmul_bt(Tensor& c, const Tensor& a, const Tensor& b) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto arow = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      auto brow = b.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < arow.size(); ++k) s += arow[k] * brow[k];
      c(i, j) += s;
    }
  }
}

// c += a^T * b
void add_matmul_at(Tensor& c, const Tensor& a, const Tensor& b) {
  for (std::size_t k = 0; k < a.rows(); ++k) {
    auto arow = a.row(k);
    auto brow = b.row(k);
    for (std::size_t i = 0; i < arow.size(); ++i) {
      const double aki = arow[i];
      if (aki == 0.0) continue;
      auto crow = c.row(i);
      for (std::size_t j = 0; j < brow.size(); ++j) crow[j] += aki * brow[j];
    }
  }
}

// Elementwise unary op with derivative expressed through (x, y).
template <typename Fwd, typename Deriv>
Var unary(Tape& t, std::string_view name, Var x, Fwd fwd, Deriv deriv) {
  Tensor out = t.value(x);
  for (double& v : out.data()) v = fwd(v);
  return t.record(name, std::move(out), {x}, [x, deriv](Tape& tp, std::size_t self) {
    Tensor* gx = tp.grad_sink(x);
    if (!gx) return;
    const auto& xv = tp.value(x.id).data();
    const auto& yv = tp.value(self).data();
    const auto& gy = tp.grad_of(self).data();
    auto g = gx->data();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i] * deriv(xv[i], yv[i]);
  });
}

}  // namespace

void set_fault(Fault f) noexcept { g_fault.store(f); }
Fault fault() noexcept { return g_fault.load(); }

// --- Tape

Var Tape::constant(Tensor value) { return record("constant", std::move(value), {}, nullptr); }

Var Tape::leaf(Tensor value) {
  Var v = record("leaf", std::move(value), {}, nullptr);
  nodes_[v.id].requires_grad = true;
  return v;
}

Tensor Tape::grad(Var v) const {
  const auto& n = nodes_[v.id];
  if (n.grad.empty() && !n.value.empty()) return Tensor(n.value.rows(), n.value.cols());
  return n.grad;
}

Var Tape::record(std::string_view op, Tensor value, std::vector<Var> parents, Backward rule) {
  if (!value.all_finite()) fail(ErrorKind::NonFinite, "non-finite value produced by " + std::string(op));
  Node node;
  node.value = std::move(value);
  for (auto p : parents) node.requires_grad = node.requires_grad || nodes_[p.id].requires_grad;
  node.parents = std::move(parents);
  if (node.requires_grad) node.rule = std::move(rule);
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

Tensor* Tape::grad_sink(Var parent) {
  auto& n = nodes_[parent.id];
  if (!n.requires_grad) return nullptr;
  if (n.grad.empty()) n.grad = Tensor(n.value.rows(), n.value.cols());
  return &n.grad;
}

void Tape::backward(Var loss) {
  const auto& l = nodes_[loss.id];
  if (l.value.rows() != 1 || l.value.cols() != 1)
    fail(ErrorKind::NonScalarLoss, "backward: loss has shape " + shape(l.value));
  if (backward_done_) fail(ErrorKind::DoubleBackward, "backward called twice without clear_grads()");
  backward_done_ = true;
  if (!l.requires_grad) return;
  nodes_[loss.id].grad = Tensor(1, 1, 1.0);
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    auto& n = nodes_[i];
    if (!n.rule || n.grad.empty()) continue;
    n.rule(*this, i);
  }
}

void Tape::clear_grads() {
  for (auto& n : nodes_) n.grad = Tensor();
  backward_done_ = false;
}

// --- ops

Var matmul(Tape& t, Var a, Var b) {
  Tensor out = gtg::matmul(t.value(a), t.value(b));
  return t.record("matmul", std::move(out), {a, b}, [a, b](Tape& tp, std::size_t self) {
    const auto& gc = tp.grad_of(self);
    if (Tensor* ga = tp.grad_sink(a)) add_matmul_bt(*ga, gc, tp.value(b.id));
    if (Tensor* gb = tp.grad_sink(b)) add_matmul_at(*gb, tp.value(a.id), gc);
  });
}

Var add(Tape& t, Var a, Var b) {
  require_same_shape("add", t.value(a), t.value(b));
  Tensor out = t.value(a);
  auto o = out.data();
  auto bv = t.value(b).data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += bv[i];
  return t.record("add", std::move(out), {a, b}, [a, b](Tape& tp, std::size_t self) {
    const auto& g = tp.grad_of(self).data();
    for (Var p : {a, b})
      if (Tensor* gp = tp.grad_sink(p)) {
        auto d = gp->data();
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i];
      }
  });
}

Var sub(Tape& t, Var a, Var b) {
  require_same_shape("sub", t.value(a), t.value(b));
  Tensor out = t.value(a);
  auto o = out.data();
  auto bv = t.value(b).data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= bv[i];
  return t.record("sub", std::move(out), {a, b}, [a, b](Tape& tp, std::size_t self) {
    const auto& g = tp.grad_of(self).data();
    if (Tensor* ga = tp.grad_sink(a)) {
      auto d = ga->data();
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i];
    }
    if (Tensor* gb = tp.grad_sink(b)) {
      auto d = gb->data();
      for (std::size_t i = 0; i < d.size(); ++i) d[i] -= g[i];
    }
  });
}

Var scale(Tape& t, Var a, double c) {
  return unary(t, "scale", a, [c](double x) { return c * x; }, [c](double, double) { return c; });
}

Var relu(Tape& t, Var x) {
  return unary(t, "relu", x, [](double v) { return v > 0.0 ? v : 0.0; },
               [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Var sigmoid(Tape& t, Var x) {
  auto fwd = [](double v) {
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  };
  if (fault() == Fault::SigmoidBackward)
    return unary(t, "sigmoid", x, fwd, [](double, double s) { return s; });
  return unary(t, "sigmoid", x, fwd, [](double, double s) { return s * (1.0 - s); });
}

Var abs(Tape& t, Var x) {
  return unary(t, "abs", x, [](double v) { return std::abs(v); },
               [](double v, double) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Var concat_cols(Tape& t, std::span<const Var> parts) {
  if (parts.empty()) fail(ErrorKind::ShapeMismatch, "concat_cols: no inputs");
  const std::size_t rows = t.value(parts[0]).rows();
  std::size_t cols = 0;
  for (Var p : parts) {
    if (t.value(p).rows() != rows) fail(ErrorKind::ShapeMismatch, "concat_cols: row counts differ");
    cols += t.value(p).cols();
  }
  Tensor out(rows, cols);
  std::size_t off = 0;
  for (Var p : parts) {
    const auto& v = t.value(p);
    for (std::size_t i = 0; i < rows; ++i) std::copy_n(v.row(i).begin(), v.cols(), out.row(i).begin() + off);
    off += v.cols();
  }
  std::vector<Var> ps(parts.begin(), parts.end());
  return t.record("concat_cols", std::move(out), ps, [ps](Tape& tp, std::size_t self) {
    const auto& g = tp.grad_of(self);
    std::size_t off = 0;
    for (Var p : ps) {
      const std::size_t c = tp.value(p.id).cols();
      if (Tensor* gp = tp.grad_sink(p))
        for (std::size_t i = 0; i < g.rows(); ++i) {
          auto src = g.row(i).subspan(off, c);
          auto dst = gp->row(i);
          for (std::size_t j = 0; j < c; ++j) dst[j] += src[j];
        }
      off += c;
    }
  });
}

Var concat_rows(Tape& t, std::span<const Var> parts) {
  if (parts.empty()) fail(ErrorKind::ShapeMismatch, "concat_rows: no inputs");
  const std::size_t cols = t.value(parts[0]).cols();
  std::vector<double> data;
  std::size_t rows = 0;
  for (Var p : parts) {
    const auto& v = t.value(p);
    if (v.cols() != cols) fail(ErrorKind::ShapeMismatch, "concat_rows: column counts differ");
    data.insert(data.end(), v.data().begin(), v.data().end());
    rows += v.rows();
  }
  std::vector<Var> ps(parts.begin(), parts.end());
  return t.record("concat_rows", Tensor(rows, cols, std::move(data)), ps, [ps](Tape& tp, std::size_t self) {
    const auto g = tp.grad_of(self).data();
    std::size_t off = 0;
    for (Var p : ps) {
      const std::size_t len = tp.value(p.id).size();
      if (Tensor* gp = tp.grad_sink(p)) {
        auto d = gp->data();
        for (std::size_t i = 0; i < len; ++i) d[i] += g[off + i];
      }
      off += len;
    }
  });
}

Var mean_rows(Tape& t, Var x) {
  const auto& v = t.value(x);
  if (v.rows() == 0) fail(ErrorKind::ShapeMismatch, "mean_rows: empty input");
  Tensor out(1, v.cols());
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t j = 0; j < v.cols(); ++j) out(0, j) += v(i, j);
  const double inv = 1.0 / static_cast<double>(v.rows());
  for (double& o : out.data()) o *= inv;
  return t.record("mean_rows", std::move(out), {x}, [x, inv](Tape& tp, std::size_t self) {
    Tensor* gx = tp.grad_sink(x);
    if (!gx) return;
    const auto g = tp.grad_of(self).row(0);
    for (std::size_t i = 0; i < gx->rows(); ++i) {
      auto d = gx->row(i);
      for (std::size_t j = 0; j < d.size(); ++j) d[j] += g[j] * inv;
    }
  });
}

Var add_rowvec(Tape& t, Var x, Var b) {
  const auto& xv = t.value(x);
  const auto& bv = t.value(b);
  if (bv.rows() != 1 || bv.cols() != xv.cols())
    fail(ErrorKind::ShapeMismatch, "add_rowvec: " + shape(xv) + " + " + shape(bv));
  Tensor out = xv;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += bv(0, j);
  }
  return t.record("add_rowvec", std::move(out), {x, b}, [x, b](Tape& tp, std::size_t self) {
    const auto& g = tp.grad_of(self);
    if (Tensor* gx = tp.grad_sink(x)) {
      auto d = gx->data();
      auto s = g.data();
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
    }
    if (Tensor* gb = tp.grad_sink(b))
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) (*gb)(0, j) += g(i, j);
  });
}

Var gather_rows(Tape& t, Var x, std::vector<std::size_t> index) {
  const auto& v = t.value(x);
  Tensor out(index.size(), v.cols());
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (index[r] >= v.rows()) fail(ErrorKind::ShapeMismatch, "gather_rows: index out of range");
    std::copy_n(v.row(index[r]).begin(), v.cols(), out.row(r).begin());
  }
  return t.record("gather_rows", std::move(out), {x}, [x, idx = std::move(index)](Tape& tp, std::size_t self) {
    Tensor* gx = tp.grad_sink(x);
    if (!gx) return;
    const auto& g = tp.grad_of(self);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      auto src = g.row(r);
      auto dst = gx->row(idx[r]);
      for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
    }
  });
}

Var slice_rows(Tape& t, Var x, std::size_t begin, std::size_t end) {
  const auto& v = t.value(x);
  if (begin > end || end > v.rows()) fail(ErrorKind::ShapeMismatch, "slice_rows: bad range");
  const std::size_t c = v.cols();
  std::vector<double> data(v.data().begin() + begin * c, v.data().begin() + end * c);
  return t.record("slice_rows", Tensor(end - begin, c, std::move(data)), {x},
                  [x, begin, c](Tape& tp, std::size_t self) {
                    Tensor* gx = tp.grad_sink(x);
                    if (!gx) return;
                    const auto g = tp.grad_of(self).data();
                    auto d = gx->data().subspan(begin * c, g.size());
                    for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
                  });
}

Var mirror_pairs(Tape& t, Var pairs, std::size_t n, double diagonal) {
  const auto& p = t.value(pairs);
  if (p.cols() != 1 || p.rows() != n * (n - 1) / 2)
    fail(ErrorKind::ShapeMismatch, "mirror_pairs: expected " + std::to_string(n * (n - 1) / 2) + "x1, got " + shape(p));
  Tensor out(n, n);
  std::size_t r = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out(i, i) = diagonal;
    for (std::size_t j = i + 1; j < n; ++j, ++r) out(i, j) = out(j, i) = p(r, 0);
  }
  return t.record("mirror_pairs", std::move(out), {pairs}, [pairs, n](Tape& tp, std::size_t self) {
    Tensor* gp = tp.grad_sink(pairs);
    if (!gp) return;
    const auto& g = tp.grad_of(self);
    std::size_t r = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j, ++r) (*gp)(r, 0) += g(i, j) + g(j, i);
  });
}

PairMask PairMask::upper_triangle(std::size_t n) {
  PairMask m;
  m.n_ = n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m.entries_.emplace_back(i, j);
  return m;
}

PairMask PairMask::upper_triangle_support(const Matrix& support) {
  if (support.rows() != support.cols()) fail(ErrorKind::ShapeMismatch, "PairMask: support is not square");
  PairMask m;
  m.n_ = support.rows();
  for (std::size_t i = 0; i < m.n_; ++i)
    for (std::size_t j = i + 1; j < m.n_; ++j)
      if (support(i, j) > 0.0) m.entries_.emplace_back(i, j);
  return m;
}

Var bce_with_logits_masked(Tape& t, Var logits, const BinaryGraph& targets, const PairMask& mask) {
  const auto& l = t.value(logits);
  if (l.rows() != mask.n() || l.cols() != mask.n() || targets.n() != mask.n())
    fail(ErrorKind::ShapeMismatch, "bce_with_logits_masked: logits " + shape(l) + ", targets " +
                                       std::to_string(targets.n()) + ", mask " + std::to_string(mask.n()));
  if (mask.entries().empty()) fail(ErrorKind::EmptyMask, "bce_with_logits_masked: empty mask");
  double sum = 0.0;
  for (auto [i, j] : mask.entries()) {
    const double x = l(i, j);
    const double y = targets.edge(i, j) ? 1.0 : 0.0;
    sum += std::max(x, 0.0) - y * x + std::log1p(std::exp(-std::abs(x)));
  }
  const double inv = 1.0 / static_cast<double>(mask.entries().size());
  std::vector<std::pair<std::size_t, std::size_t>> entries(mask.entries().begin(), mask.entries().end());
  std::vector<double> ys;
  ys.reserve(entries.size());
  for (auto [i, j] : entries) ys.push_back(targets.edge(i, j) ? 1.0 : 0.0);
  return t.record("bce_with_logits", Tensor(1, 1, sum * inv), {logits},
                  [logits, inv, entries = std::move(entries), ys = std::move(ys)](Tape& tp, std::size_t self) {
                    Tensor* gl = tp.grad_sink(logits);
                    if (!gl) return;
                    const double g = tp.grad_of(self)(0, 0) * inv;
                    const auto& lv = tp.value(logits.id);
                    for (std::size_t e = 0; e < entries.size(); ++e) {
                      auto [i, j] = entries[e];
                      const double x = lv(i, j);
                      const double s = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
                      (*gl)(i, j) += g * (s - ys[e]);
                    }
                  });
}

Var mae_masked(Tape& t, Var pred, const Matrix& target, const PairMask& mask) {
  const auto& p = t.value(pred);
  if (p.rows() != mask.n() || p.cols() != mask.n() || target.rows() != mask.n() || target.cols() != mask.n())
    fail(ErrorKind::ShapeMismatch, "mae_masked: pred " + shape(p) + ", target " + shape(target));
  if (mask.entries().empty()) fail(ErrorKind::EmptyMask, "mae_masked: empty mask");
  double sum = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> entries(mask.entries().begin(), mask.entries().end());
  std::vector<double> signs;
  signs.reserve(entries.size());
  for (auto [i, j] : entries) {
    const double d = p(i, j) - target(i, j);
    sum += std::abs(d);
    signs.push_back(d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0));
  }
  const double inv = 1.0 / static_cast<double>(entries.size());
  return t.record("mae", Tensor(1, 1, sum * inv), {pred},
                  [pred, inv, entries = std::move(entries), signs = std::move(signs)](Tape& tp, std::size_t self) {
                    Tensor* gp = tp.grad_sink(pred);
                    if (!gp) return;
                    const double g = tp.grad_of(self)(0, 0) * inv;
                    for (std::size_t e = 0; e < entries.size(); ++e) {
                      auto [i, j] = entries[e];
                      (*gp)(i, j) += g * signs[e];
                    }
                  });
}

GradCheckResult grad_check(const Objective& f, std::vector<double> theta, double h) {
  if (!(h > 0.0)) fail(ErrorKind::InvalidArgument, "grad_check: h must be > 0");
  std::vector<double> analytic;
  f(theta, &analytic);
  if (analytic.size() != theta.size()) fail(ErrorKind::ShapeMismatch, "grad_check: gradient length mismatch");
  GradCheckResult res;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double orig = theta[i];
    theta[i] = orig + h;
    const double fp = f(theta, nullptr);
    theta[i] = orig - h;
    const double fm = f(theta, nullptr);
    theta[i] = orig;
    const double numeric = (fp - fm) / (2.0 * h);
    const double ga = analytic[i];
    const double err = std::abs(ga - numeric) / std::max({1.0, std::abs(ga), std::abs(numeric)});
    if (err > res.max_rel_error || i == 0) res = {err, i, ga, numeric};
  }
  return res;
}

}  // namespace gtg::ad
