// Copyright 2026 The derivgen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "derivgen/autodiff.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "derivgen/errors.h"

namespace derivgen {
namespace {

double sigmoid_scalar(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

std::string vec_shape(std::size_t n) { return "[" + std::to_string(n) + "]"; }

}  // namespace

std::size_t Var::size() const { return tape_->node(*this).size; }

std::span<const double> Var::value() const {
  const auto &n = tape_->node(*this);
  return {tape_->values_.data() + n.offset, n.size};
}

double Var::scalar() const {
  if (size() != 1) {
    throw DimensionError("expected a scalar, got " + vec_shape(size()));
  }
  return value()[0];
}

void Tape::reset() {
  nodes_.clear();
  values_.clear();
  grads_.clear();
  lists_.clear();
  differentiated_ = false;
}

const Tape::Node &Tape::node(Var v) const {
  check_owned(v);
  return nodes_[v.id_];
}

void Tape::check_owned(Var v) const {
  if (v.tape_ != this || v.id_ >= nodes_.size()) {
    throw Error("variable does not belong to this tape");
  }
}

Var Tape::push(Op op, std::size_t size) {
  Node n{};
  n.op = op;
  n.size = static_cast<std::uint32_t>(size);
  n.offset = values_.size();
  values_.resize(values_.size() + size, 0.0);
  nodes_.push_back(n);
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::constant(std::span<const double> values) {
  Var v = push(Op::kConstant, values.size());
  std::copy(values.begin(), values.end(), values_.begin() + nodes_[v.id_].offset);
  return v;
}

Var Tape::lookup(Parameter &table, std::size_t row) {
  if (table.value.rank() != 2 || row >= table.value.rows()) {
    throw VocabularyError("row " + std::to_string(row) + " outside table " + table.name +
                          " " + table.value.shape_string());
  }
  std::size_t cols = table.value.cols();
  Var v = push(Op::kLookup, cols);
  nodes_[v.id_].p = &table;
  nodes_[v.id_].aux = row;
  auto src = table.value.row(row);
  std::copy(src.begin(), src.end(), values_.begin() + nodes_[v.id_].offset);
  return v;
}

Var Tape::affine(Parameter &w, Var x, Parameter *b) {
  check_owned(x);
  const Tensor &wv = w.value;
  std::size_t n = nodes_[x.id_].size;
  if (wv.rank() != 2 || wv.cols() != n) {
    throw DimensionError("affine: weight " + w.name + " " + wv.shape_string() +
                         " does not match input " + vec_shape(n));
  }
  std::size_t m = wv.rows();
  if (b != nullptr && (b->value.rank() != 1 || b->value.size() != m)) {
    throw DimensionError("affine: bias " + b->name + " " + b->value.shape_string() +
                         " does not match weight " + w.name + " " + wv.shape_string());
  }
  Var out = push(Op::kAffine, m);
  Node &nd = nodes_[out.id_];
  nd.a = x.id_;
  nd.p = &w;
  nd.q = b;
  const double *xv = val(x.id_);
  double *y = values_.data() + nd.offset;
  const double *wd = wv.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    const double *row = wd + i * n;
    double acc = b != nullptr ? b->value[i] : 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * xv[j];
    y[i] = acc;
  }
  return out;
}

Var Tape::add(Var a, Var b) {
  check_owned(a);
  check_owned(b);
  std::size_t n = nodes_[a.id_].size;
  if (nodes_[b.id_].size != n) {
    throw DimensionError("add: " + vec_shape(n) + " vs " + vec_shape(nodes_[b.id_].size));
  }
  Var out = push(Op::kAdd, n);
  nodes_[out.id_].a = a.id_;
  nodes_[out.id_].b = b.id_;
  const double *x = val(a.id_), *y = val(b.id_);
  double *z = values_.data() + nodes_[out.id_].offset;
  for (std::size_t i = 0; i < n; ++i) z[i] = x[i] + y[i];
  return out;
}

Var Tape::mul(Var a, Var b) {
  check_owned(a);
  check_owned(b);
  std::size_t n = nodes_[a.id_].size;
  if (nodes_[b.id_].size != n) {
    throw DimensionError("mul: " + vec_shape(n) + " vs " + vec_shape(nodes_[b.id_].size));
  }
  Var out = push(Op::kMul, n);
  nodes_[out.id_].a = a.id_;
  nodes_[out.id_].b = b.id_;
  const double *x = val(a.id_), *y = val(b.id_);
  double *z = values_.data() + nodes_[out.id_].offset;
  for (std::size_t i = 0; i < n; ++i) z[i] = x[i] * y[i];
  return out;
}

Var Tape::unary(ElementwiseOp op, Var a) {
  check_owned(a);
  std::size_t n = nodes_[a.id_].size;
  Op code;
  switch (op) {
    case ElementwiseOp::kRelu:
      code = Op::kRelu;
      break;
    case ElementwiseOp::kSigmoid:
      code = Op::kSigmoid;
      break;
    case ElementwiseOp::kTanh:
      code = Op::kTanh;
      break;
    default:
      throw Error("unary: pairwise_max takes two operands");
  }
  Var out = push(code, n);
  nodes_[out.id_].a = a.id_;
  const double *x = val(a.id_);
  double *y = values_.data() + nodes_[out.id_].offset;
  for (std::size_t i = 0; i < n; ++i) {
    switch (code) {
      case Op::kRelu:
        y[i] = x[i] > 0.0 ? x[i] : 0.0;
        break;
      case Op::kSigmoid:
        y[i] = sigmoid_scalar(x[i]);
        break;
      default:
        y[i] = std::tanh(x[i]);
        break;
    }
  }
  return out;
}

Var Tape::pairwise_max(Var a, Var b) {
  check_owned(a);
  check_owned(b);
  std::size_t n = nodes_[a.id_].size;
  if (nodes_[b.id_].size != n) {
    throw DimensionError("pairwise_max: " + vec_shape(n) + " vs " +
                         vec_shape(nodes_[b.id_].size));
  }
  Var out = push(Op::kMax, n);
  nodes_[out.id_].a = a.id_;
  nodes_[out.id_].b = b.id_;
  const double *x = val(a.id_), *y = val(b.id_);
  double *z = values_.data() + nodes_[out.id_].offset;
  for (std::size_t i = 0; i < n; ++i) z[i] = x[i] >= y[i] ? x[i] : y[i];
  return out;
}

Var Tape::concat(std::span<const Var> parts) {
  if (parts.empty()) throw DimensionError("concat: no operands");
  std::size_t total = 0;
  for (Var p : parts) {
    check_owned(p);
    total += nodes_[p.id_].size;
  }
  std::size_t begin = lists_.size();
  for (Var p : parts) lists_.push_back(p.id_);
  Var out = push(Op::kConcat, total);
  nodes_[out.id_].aux = begin;
  nodes_[out.id_].aux2 = lists_.size();
  std::size_t pos = nodes_[out.id_].offset;
  for (Var p : parts) {
    const Node &src = nodes_[p.id_];
    std::copy_n(values_.begin() + src.offset, src.size, values_.begin() + pos);
    pos += src.size;
  }
  return out;
}

Var Tape::slice(Var a, std::size_t offset, std::size_t length) {
  check_owned(a);
  std::size_t n = nodes_[a.id_].size;
  if (length == 0 || offset + length > n) {
    throw DimensionError("slice [" + std::to_string(offset) + ", " +
                         std::to_string(offset + length) + ") of " + vec_shape(n));
  }
  Var out = push(Op::kSlice, length);
  nodes_[out.id_].a = a.id_;
  nodes_[out.id_].aux = offset;
  std::copy_n(values_.begin() + nodes_[a.id_].offset + offset, length,
              values_.begin() + nodes_[out.id_].offset);
  return out;
}

Var Tape::sum(Var a) {
  check_owned(a);
  Var out = push(Op::kSum, 1);
  nodes_[out.id_].a = a.id_;
  const double *x = val(a.id_);
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes_[a.id_].size; ++i) acc += x[i];
  values_[nodes_[out.id_].offset] = acc;
  return out;
}

Var Tape::add_n(std::span<const Var> terms) {
  if (terms.empty()) throw DimensionError("add_n: no operands");
  std::size_t n = 0;
  for (Var t : terms) {
    check_owned(t);
    if (n == 0) n = nodes_[t.id_].size;
    if (nodes_[t.id_].size != n) {
      throw DimensionError("add_n: " + vec_shape(n) + " vs " +
                           vec_shape(nodes_[t.id_].size));
    }
  }
  std::size_t begin = lists_.size();
  for (Var t : terms) lists_.push_back(t.id_);
  Var out = push(Op::kAddN, n);
  nodes_[out.id_].aux = begin;
  nodes_[out.id_].aux2 = lists_.size();
  double *z = values_.data() + nodes_[out.id_].offset;
  for (Var t : terms) {
    const double *x = val(t.id_);
    for (std::size_t i = 0; i < n; ++i) z[i] += x[i];
  }
  return out;
}

Var Tape::softmax_xent(Var logits, std::size_t target) {
  check_owned(logits);
  std::size_t k = nodes_[logits.id_].size;
  if (k == 0) throw DimensionError("softmax_xent: empty distribution");
  if (target >= k) {
    throw VocabularyError("softmax_xent: target " + std::to_string(target) + " outside " +
                          vec_shape(k));
  }
  // The probabilities live right after the scalar loss in the arena.
  Var out = push(Op::kSoftmaxXent, 1);
  std::size_t probs_offset = values_.size();
  values_.resize(values_.size() + k);
  Node &nd = nodes_[out.id_];
  nd.a = logits.id_;
  nd.aux = target;
  nd.aux2 = probs_offset;
  const double *x = val(logits.id_);
  double peak = *std::max_element(x, x + k);
  double z = 0.0;
  for (std::size_t i = 0; i < k; ++i) z += std::exp(x[i] - peak);
  double log_z = std::log(z);
  double *probs = values_.data() + probs_offset;
  for (std::size_t i = 0; i < k; ++i) probs[i] = std::exp(x[i] - peak - log_z);
  values_[nd.offset] = -(x[target] - peak - log_z);
  return out;
}

std::span<const double> Tape::softmax_probs(Var xent) const {
  const Node &nd = node(xent);
  if (nd.op != Op::kSoftmaxXent) throw Error("node is not a softmax_xent");
  return {values_.data() + nd.aux2, nodes_[nd.a].size};
}

std::span<const double> Tape::grad(Var v) const {
  const Node &nd = node(v);
  if (!differentiated_) throw StaleTapeError("grad() before backward()");
  return {grads_.data() + nd.offset, nd.size};
}

std::vector<bool> Tape::branch_pattern() const {
  std::vector<bool> out;
  for (const Node &nd : nodes_) {
    if (nd.op == Op::kRelu) {
      const double *x = val(nd.a);
      for (std::size_t i = 0; i < nd.size; ++i) out.push_back(x[i] > 0.0);
    } else if (nd.op == Op::kMax) {
      const double *x = val(nd.a), *z = val(nd.b);
      for (std::size_t i = 0; i < nd.size; ++i) out.push_back(x[i] >= z[i]);
    }
  }
  return out;
}

void Tape::backward(Var loss) {
  check_owned(loss);
  if (differentiated_) {
    throw StaleTapeError(
        "backward() called twice on the same forward pass; reset the tape "
        "and run a new forward pass");
  }
  if (nodes_[loss.id_].size != 1) {
    throw DimensionError("backward: loss must be a scalar, got " +
                         vec_shape(nodes_[loss.id_].size));
  }
  differentiated_ = true;
  grads_.assign(values_.size(), 0.0);
  grads_[nodes_[loss.id_].offset] = 1.0;

  for (std::size_t idx = loss.id_ + 1; idx-- > 0;) {
    const Node &nd = nodes_[idx];
    const double *g = grads_.data() + nd.offset;
    const double *y = values_.data() + nd.offset;
    std::size_t n = nd.size;
    switch (nd.op) {
      case Op::kConstant:
        break;
      case Op::kLookup: {
        Tensor &tg = nd.p->grad;
        std::size_t cols = tg.cols();
        double *row = tg.data().data() + nd.aux * cols;
        for (std::size_t i = 0; i < n; ++i) row[i] += g[i];
        break;
      }
      case Op::kAffine: {
        std::size_t in = nodes_[nd.a].size;
        const double *x = val(nd.a);
        double *gx = gr(nd.a);
        const double *w = nd.p->value.data().data();
        double *gw = nd.p->grad.data().data();
        for (std::size_t i = 0; i < n; ++i) {
          double gi = g[i];
          if (gi == 0.0) continue;
          const double *wr = w + i * in;
          double *gwr = gw + i * in;
          for (std::size_t j = 0; j < in; ++j) {
            gx[j] += wr[j] * gi;
            gwr[j] += gi * x[j];
          }
        }
        if (nd.q != nullptr) {
          double *gb = nd.q->grad.data().data();
          for (std::size_t i = 0; i < n; ++i) gb[i] += g[i];
        }
        break;
      }
      case Op::kAdd: {
        double *ga = gr(nd.a);
        for (std::size_t i = 0; i < n; ++i) ga[i] += g[i];
        double *gb = gr(nd.b);
        for (std::size_t i = 0; i < n; ++i) gb[i] += g[i];
        break;
      }
      case Op::kMul: {
        const double *x = val(nd.a), *z = val(nd.b);
        double *ga = gr(nd.a);
        for (std::size_t i = 0; i < n; ++i) ga[i] += g[i] * z[i];
        double *gb = gr(nd.b);
        for (std::size_t i = 0; i < n; ++i) gb[i] += g[i] * x[i];
        break;
      }
      case Op::kRelu: {
        double *ga = gr(nd.a);
        for (std::size_t i = 0; i < n; ++i) {
          if (y[i] > 0.0) ga[i] += g[i];
        }
        break;
      }
      case Op::kSigmoid: {
        double *ga = gr(nd.a);
        for (std::size_t i = 0; i < n; ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
        break;
      }
      case Op::kTanh: {
        double *ga = gr(nd.a);
        for (std::size_t i = 0; i < n; ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
        break;
      }
      case Op::kMax: {
        const double *x = val(nd.a), *z = val(nd.b);
        double *ga = gr(nd.a);
        double *gb = gr(nd.b);
        for (std::size_t i = 0; i < n; ++i) {
          if (x[i] >= z[i]) {
            ga[i] += g[i];
          } else {
            gb[i] += g[i];
          }
        }
        break;
      }
      case Op::kConcat: {
        std::size_t pos = 0;
        for (std::size_t k = nd.aux; k < nd.aux2; ++k) {
          std::uint32_t src = lists_[k];
          double *gs = gr(src);
          std::size_t m = nodes_[src].size;
          for (std::size_t i = 0; i < m; ++i) gs[i] += g[pos + i];
          pos += m;
        }
        break;
      }
      case Op::kSlice: {
        double *ga = gr(nd.a) + nd.aux;
        for (std::size_t i = 0; i < n; ++i) ga[i] += g[i];
        break;
      }
      case Op::kSum: {
        double *ga = gr(nd.a);
        for (std::size_t i = 0; i < nodes_[nd.a].size; ++i) ga[i] += g[0];
        break;
      }
      case Op::kAddN: {
        for (std::size_t k = nd.aux; k < nd.aux2; ++k) {
          double *gs = gr(lists_[k]);
          for (std::size_t i = 0; i < n; ++i) gs[i] += g[i];
        }
        break;
      }
      case Op::kSoftmaxXent: {
        std::size_t k = nodes_[nd.a].size;
        const double *probs = values_.data() + nd.aux2;
        double *ga = gr(nd.a);
        for (std::size_t i = 0; i < k; ++i) {
          ga[i] += g[0] * (probs[i] - (i == nd.aux ? 1.0 : 0.0));
        }
        break;
      }
    }
  }
}

Var affine(Parameter &w, Var x, Parameter &b) { return x.tape()->affine(w, x, &b); }
Var matvec(Parameter &w, Var x) { return x.tape()->affine(w, x, nullptr); }
Var add(Var a, Var b) { return a.tape()->add(a, b); }
Var mul(Var a, Var b) { return a.tape()->mul(a, b); }
Var relu(Var a) { return a.tape()->unary(ElementwiseOp::kRelu, a); }
Var sigmoid(Var a) { return a.tape()->unary(ElementwiseOp::kSigmoid, a); }
Var tanh(Var a) { return a.tape()->unary(ElementwiseOp::kTanh, a); }
Var pairwise_max(Var a, Var b) { return a.tape()->pairwise_max(a, b); }

Var elementwise(ElementwiseOp op, Var a, std::optional<Var> b) {
  if (op == ElementwiseOp::kPairwiseMax) {
    if (!b) throw DimensionError("pairwise_max needs a second operand");
    return pairwise_max(a, *b);
  }
  if (b) throw DimensionError("unary elementwise op given two operands");
  return a.tape()->unary(op, a);
}

Var concat(std::span<const Var> parts) {
  if (parts.empty()) throw DimensionError("concat: no operands");
  return parts.front().tape()->concat(parts);
}
Var slice(Var a, std::size_t offset, std::size_t length) {
  return a.tape()->slice(a, offset, length);
}
Var sum(Var a) { return a.tape()->sum(a); }
Var add_n(std::span<const Var> terms) {
  if (terms.empty()) throw DimensionError("add_n: no operands");
  return terms.front().tape()->add_n(terms);
}

XentResult softmax_xent(Var logits, std::size_t target) {
  Tape *tape = logits.tape();
  Var loss = tape->softmax_xent(logits, target);
  auto probs = tape->softmax_probs(loss);
  return {loss, std::vector<double>(probs.begin(), probs.end())};
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw DimensionError("softmax: empty distribution");
  double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    z += out[i];
  }
  for (double &v : out) v /= z;
  return out;
}

}  // namespace derivgen
