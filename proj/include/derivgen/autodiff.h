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

#ifndef DERIVGEN_AUTODIFF_H_
#define DERIVGEN_AUTODIFF_H_

// Reverse-mode differentiation over a flat tape.
//
// Every op appends one node whose value lives in the tape's arena. Values of
// Parameters are read in place and never copied onto the tape; their
// gradients are accumulated straight into Parameter::grad by backward().
// Tapes are single-threaded. Call reset() before each forward pass.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "derivgen/tensor.h"

namespace derivgen {

class Tape;

// Handle to a node on a tape. Cheap to copy; invalid after Tape::reset().
class Var {
 public:
  Var() = default;

  bool valid() const { return tape_ != nullptr; }
  Tape *tape() const { return tape_; }
  std::size_t size() const;
  std::span<const double> value() const;
  double scalar() const;

 private:
  friend class Tape;
  Var(Tape *tape, std::uint32_t id) : tape_(tape), id_(id) {}

  Tape *tape_ = nullptr;
  std::uint32_t id_ = 0;
};

enum class ElementwiseOp { kRelu, kSigmoid, kTanh, kPairwiseMax };

class Tape {
 public:
  Tape() = default;
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  // Drops every node. Arena capacity is kept for the next pass.
  void reset();

  std::size_t num_nodes() const { return nodes_.size(); }
  bool differentiated() const { return differentiated_; }

  Var constant(std::span<const double> values);
  Var constant(const Tensor &t) { return constant(t.data()); }
  // Row `row` of a rank-2 parameter, e.g. an embedding lookup.
  Var lookup(Parameter &table, std::size_t row);

  // Accumulates d(loss)/d(value) into the grad of every reachable Parameter.
  // Throws StaleTapeError if this tape was already differentiated.
  void backward(Var loss);

  // Gradient of an arbitrary node; valid after backward().
  std::span<const double> grad(Var v) const;

  // Op recorders. Prefer the free functions below.
  Var affine(Parameter &w, Var x, Parameter *b);
  Var add(Var a, Var b);
  Var mul(Var a, Var b);
  Var unary(ElementwiseOp op, Var a);
  Var pairwise_max(Var a, Var b);
  Var concat(std::span<const Var> parts);
  Var slice(Var a, std::size_t offset, std::size_t length);
  Var sum(Var a);
  Var add_n(std::span<const Var> terms);
  Var softmax_xent(Var logits, std::size_t target);
  std::span<const double> softmax_probs(Var xent) const;

  // Which side of its kink every relu and max component is on, in tape
  // order. Two passes of the same graph with equal patterns lie on the same
  // differentiable piece.
  std::vector<bool> branch_pattern() const;

 private:
  friend class Var;

  enum class Op : std::uint8_t {
    kConstant,
    kLookup,
    kAffine,
    kAdd,
    kMul,
    kRelu,
    kSigmoid,
    kTanh,
    kMax,
    kConcat,
    kSlice,
    kSum,
    kAddN,
    kSoftmaxXent,
  };

  struct Node {
    Op op;
    std::uint32_t size;
    std::size_t offset;      // into values_/grads_
    std::uint32_t a = 0;     // first input
    std::uint32_t b = 0;     // second input
    Parameter *p = nullptr;  // weight / table
    Parameter *q = nullptr;  // bias
    std::size_t aux = 0;     // row, slice offset, target, list start
    std::size_t aux2 = 0;    // list end, probs offset
  };

  Var push(Op op, std::size_t size);
  const Node &node(Var v) const;
  void check_owned(Var v) const;
  const double *val(std::uint32_t id) const { return values_.data() + nodes_[id].offset; }
  double *gr(std::uint32_t id) { return grads_.data() + nodes_[id].offset; }

  std::vector<Node> nodes_;
  std::vector<double> values_;
  std::vector<double> grads_;
  std::vector<std::uint32_t> lists_;
  bool differentiated_ = false;
};

// W·x + b. Throws DimensionError naming both shapes on mismatch.
Var affine(Parameter &w, Var x, Parameter &b);
// W·x without bias.
Var matvec(Parameter &w, Var x);
Var add(Var a, Var b);
Var mul(Var a, Var b);
Var relu(Var a);
Var sigmoid(Var a);
Var tanh(Var a);
// Componentwise max. Ties route the gradient to `a`.
Var pairwise_max(Var a, Var b);
// Dispatches to the ops above; `b` is required only for kPairwiseMax.
Var elementwise(ElementwiseOp op, Var a, std::optional<Var> b = std::nullopt);
Var concat(std::span<const Var> parts);
Var slice(Var a, std::size_t offset, std::size_t length);
Var sum(Var a);
Var add_n(std::span<const Var> terms);

struct XentResult {
  Var loss;  // scalar, -log probs[target]
  std::vector<double> probs;
};
XentResult softmax_xent(Var logits, std::size_t target);

// Max-subtracted softmax outside of any tape.
std::vector<double> softmax(std::span<const double> logits);

}  // namespace derivgen

#endif  // DERIVGEN_AUTODIFF_H_
