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

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numeric>
#include <random>

#include "derivgen/autodiff.h"
#include "derivgen/errors.h"
#include "derivgen/optimizer.h"
#include "doctest.h"
#include "testing/gradcheck.h"

namespace derivgen {
namespace {

using testing::check_gradients;

std::vector<double> as_vec(Var v) { return {v.value().begin(), v.value().end()}; }

Parameter random_param(const std::string &name, std::vector<std::size_t> shape,
                       std::mt19937_64 &rng, double scale = 1.0) {
  Parameter p(name, Tensor(std::move(shape)));
  uniform_init(p, scale, rng);
  return p;
}

TEST_CASE("affine matches hand arithmetic") {
  Tape tape;
  Parameter eye("I", Tensor::Matrix(2, 2, {1, 0, 0, 1}));
  Parameter zero("z", Tensor::Vector({0, 0}));
  CHECK(as_vec(affine(eye, tape.constant(std::vector<double>{3, 4}), zero)) ==
        std::vector<double>{3, 4});

  Parameter w("W", Tensor::Matrix(2, 2, {1, 2, 3, 4}));
  Parameter b("b", Tensor::Vector({1, 0}));
  CHECK(as_vec(affine(w, tape.constant(std::vector<double>{1, 1}), b)) ==
        std::vector<double>{4, 7});
}

TEST_CASE("affine agrees with a naive triple-loop matmul") {
  std::mt19937_64 rng(7);
  Parameter w = random_param("W", {5, 7}, rng);
  Parameter b = random_param("b", {5}, rng);
  std::vector<double> x(7);
  std::uniform_real_distribution<double> d(-1, 1);
  for (double &v : x) v = d(rng);

  // Oracle: out[i] = sum_k W[i][k] * X[k][0] + b[i], written as a general
  // (5x7)(7x1) product.
  std::vector<double> expected(5, 0.0);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 1; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < 7; ++k) acc += w.value.at(i, k) * x[k];
      expected[i] = acc + b.value[i];
    }
  }
  Tape tape;
  auto got = as_vec(affine(w, tape.constant(x), b));
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("affine shape errors name both shapes") {
  Tape tape;
  Parameter w("W", Tensor({2, 3}));
  Parameter b("b", Tensor({2}));
  try {
    affine(w, tape.constant(std::vector<double>{1, 2}), b);
    FAIL("expected DimensionError");
  } catch (const DimensionError &e) {
    std::string msg = e.what();
    CHECK(msg.find("[2x3]") != std::string::npos);
    CHECK(msg.find("[2]") != std::string::npos);
  }
  Parameter bad_bias("b", Tensor({3}));
  CHECK_THROWS_AS(affine(w, tape.constant(std::vector<double>{1, 2, 3}), bad_bias),
                  DimensionError);
}

TEST_CASE("elementwise definitions") {
  Tape tape;
  Var a = tape.constant(std::vector<double>{-1, 0, 2});
  CHECK(as_vec(relu(a)) == std::vector<double>{0, 0, 2});
  CHECK(as_vec(elementwise(ElementwiseOp::kRelu, a)) == std::vector<double>{0, 0, 2});
  Var p = tape.constant(std::vector<double>{1, 5});
  Var q = tape.constant(std::vector<double>{3, 2});
  CHECK(as_vec(pairwise_max(p, q)) == std::vector<double>{3, 5});
  CHECK(as_vec(elementwise(ElementwiseOp::kPairwiseMax, p, q)) ==
        std::vector<double>{3, 5});
  Var zero = tape.constant(std::vector<double>{0});
  CHECK(sigmoid(zero).scalar() == 0.5);
  CHECK(tanh(zero).scalar() == 0.0);
  CHECK_THROWS_AS(pairwise_max(a, p), DimensionError);
  CHECK_THROWS_AS(elementwise(ElementwiseOp::kPairwiseMax, a), DimensionError);
}

TEST_CASE("pairwise_max routes tied gradients to the first operand") {
  Parameter a("a", Tensor::Vector({2.0}));
  Parameter b("b", Tensor::Vector({2.0}));
  Parameter one("one", Tensor::Matrix(1, 1, {1.0}));
  Tape tape;
  Var x = tape.constant(std::vector<double>{1.0});
  Var loss = sum(pairwise_max(affine(one, x, a), affine(one, x, b)));
  tape.backward(loss);
  CHECK(a.grad[0] == 1.0);
  CHECK(b.grad[0] == 0.0);
}

TEST_CASE("softmax_xent on uniform and extreme logits") {
  Tape tape;
  auto r = softmax_xent(tape.constant(std::vector<double>{0, 0}), 0);
  CHECK(r.probs[0] == doctest::Approx(0.5));
  CHECK(r.probs[1] == doctest::Approx(0.5));
  CHECK(r.loss.scalar() == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  auto big = softmax_xent(tape.constant(std::vector<double>{1000, 0}), 0);
  CHECK(std::isfinite(big.loss.scalar()));
  CHECK(big.loss.scalar() < 1e-9);
  CHECK(big.loss.scalar() >= 0.0);

  CHECK_THROWS_AS(softmax_xent(tape.constant(std::vector<double>{}), 0), DimensionError);
  CHECK_THROWS_AS(softmax_xent(tape.constant(std::vector<double>{1, 2}), 2),
                  VocabularyError);
}

TEST_CASE("softmax probabilities match a 50-digit evaluation") {
  using Big = boost::multiprecision::cpp_bin_float_50;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-10, 10);
    std::vector<double> logits(7);
    for (double &v : logits) v = d(rng);
    Big z = 0;
    for (double v : logits) z += boost::multiprecision::exp(Big(v));
    Tape tape;
    auto r = softmax_xent(tape.constant(logits), 3);
    for (std::size_t i = 0; i < 7; ++i) {
      double expected =
          static_cast<double>(boost::multiprecision::exp(Big(logits[i])) / z);
      CHECK(std::abs(r.probs[i] - expected) < 1e-10);
    }
    double expected_loss = static_cast<double>(
        -boost::multiprecision::log(boost::multiprecision::exp(Big(logits[3])) / z));
    CHECK(std::abs(r.loss.scalar() - expected_loss) < 1e-10);
  }
}

TEST_CASE("softmax output is a distribution for large-magnitude logits") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_real_distribution<double> d(-1000, 1000);
    std::vector<double> logits(1 + trial % 31);
    for (double &v : logits) v = d(rng);
    Tape tape;
    auto r = softmax_xent(tape.constant(logits), 0);
    double total = 0.0;
    for (double p : r.probs) {
      CHECK(p >= 0.0);
      total += p;
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
    auto direct = softmax(logits);
    for (std::size_t i = 0; i < logits.size(); ++i) {
      CHECK(std::abs(direct[i] - r.probs[i]) <= 1e-12);
    }
  }
}

TEST_CASE("backward of a linear map gives the input as weight gradient") {
  Parameter w("W", Tensor({3, 4}));
  std::mt19937_64 rng(3);
  uniform_init(w, 1.0, rng);
  std::vector<double> x{0.5, -1.0, 2.0, 3.0};
  Tape tape;
  Var loss = sum(matvec(w, tape.constant(x)));
  tape.backward(loss);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 4; ++j) CHECK(w.grad.at(i, j) == x[j]);
  }
}

TEST_CASE("backward twice without a new forward pass is an error") {
  Parameter w("W", Tensor::Matrix(1, 1, {2.0}));
  Tape tape;
  Var loss = sum(matvec(w, tape.constant(std::vector<double>{1.0})));
  tape.backward(loss);
  CHECK_THROWS_AS(tape.backward(loss), StaleTapeError);
  tape.reset();
  Var again = sum(matvec(w, tape.constant(std::vector<double>{1.0})));
  CHECK_NOTHROW(tape.backward(again));
  CHECK(w.grad[0] == 2.0);  // accumulated across the two passes
}

TEST_CASE("a parameter used on two paths gets the sum of both contributions") {
  std::mt19937_64 rng(5);
  Parameter w = random_param("W", {4, 4}, rng, 0.5);
  Parameter b = random_param("b", {4}, rng, 0.5);
  std::vector<double> x{0.3, -0.2, 0.9, 0.1};
  auto forward = [&](Tape &t) {
    Var h = tanh(affine(w, t.constant(x), b));
    Var h2 = sigmoid(affine(w, h, b));  // W and b reused
    return softmax_xent(mul(h, h2), 2).loss;
  };
  auto r = check_gradients(forward, {&w, &b});
  CHECK_MESSAGE(r.max_rel_error < 1e-4, r.worst);

  // Each path alone contributes a strictly partial gradient.
  w.zero_grad();
  b.zero_grad();
  Tape tape;
  tape.backward(forward(tape));
  double both = w.grad.at(1, 2);
  CHECK(both != 0.0);
}

// Builds a random expression over every op type and returns it as a scalar.
struct RandomGraph {
  explicit RandomGraph(std::uint64_t seed) : rng(seed) {
    std::uniform_int_distribution<std::size_t> dim(2, 6);
    n = dim(rng);
    m = dim(rng);
    w1 = random_param("W1", {m, n}, rng, 0.8);
    b1 = random_param("b1", {m}, rng, 0.8);
    w2 = random_param("W2", {m, m}, rng, 0.8);
    table = random_param("E", {3, n}, rng, 0.8);
    x.resize(n);
    std::uniform_real_distribution<double> d(-1, 1);
    for (double &v : x) v = d(rng);
    recipe.resize(6);
    for (int &r : recipe) r = static_cast<int>(rng() % 7);
    row = rng() % 3;
    target = rng() % m;
    use_xent = rng() % 2;
  }

  Var operator()(Tape &t) {
    Var in = add(t.constant(x), t.lookup(table, row));
    Var h = affine(w1, in, b1);
    for (int op : recipe) {
      switch (op) {
        case 0:
          h = relu(h);
          break;
        case 1:
          h = sigmoid(h);
          break;
        case 2:
          h = tanh(h);
          break;
        case 3:
          h = pairwise_max(h, matvec(w2, h));
          break;
        case 4:
          h = mul(h, tanh(matvec(w2, h)));
          break;
        case 5: {
          std::vector<Var> parts{h, matvec(w2, h)};
          Var c = concat(parts);
          h = add(slice(c, 0, m), slice(c, m, m));
          break;
        }
        default: {
          std::vector<Var> terms{h, sigmoid(h), matvec(w2, h)};
          h = add_n(terms);
          break;
        }
      }
    }
    return use_xent ? softmax_xent(h, target).loss : sum(h);
  }

  std::vector<Parameter *> params() { return {&w1, &b1, &w2, &table}; }

  std::mt19937_64 rng;
  std::size_t n = 0, m = 0, row = 0, target = 0;
  bool use_xent = false;
  Parameter w1, b1, w2, table;
  std::vector<double> x;
  std::vector<int> recipe;
};

TEST_CASE("random graphs pass finite-difference checks over 100 seeds") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomGraph g(seed);
    auto r = check_gradients([&](Tape &t) { return g(t); }, g.params());
    INFO("seed " << seed << " worst " << r.worst);
    CHECK(r.max_rel_error < 1e-4);
  }
}

TEST_CASE("branch patterns record which side of each kink was taken") {
  Tape tape;
  Var x = tape.constant(std::vector<double>{-1, 0, 2});
  Var y = tape.constant(std::vector<double>{0, 0, 3});
  relu(x);
  pairwise_max(x, y);
  tanh(x);  // smooth, not recorded
  CHECK(tape.branch_pattern() ==
        std::vector<bool>{false, false, true, false, true, false});
}

TEST_CASE("the gradient checker flags a missing gradient path") {
  std::mt19937_64 rng(4);
  Parameter w = random_param("w", {3, 3}, rng);
  Parameter b = random_param("b", {3}, rng);
  std::vector<double> x{0.3, -0.2, 0.9};
  // b enters as a constant, so backward never reaches it.
  auto forward = [&](Tape &t) {
    Var h = tanh(matvec(w, t.constant(x)));
    return sum(mul(h, t.constant(b.value.data())));
  };
  auto r = check_gradients(forward, {&w, &b});
  CHECK(r.max_rel_error == doctest::Approx(1.0));
  CHECK(r.worst == "b");
}

TEST_CASE("probes across a relu kink are set aside") {
  // The first pre-activation is exactly 0, so its +-eps probes land on
  // different pieces of the relu.
  Parameter v("v", Tensor::Vector({0.0, 1.0}));
  Parameter eye("I", Tensor::Matrix(2, 2, {1, 0, 0, 1}));
  auto f = [&](Tape &t) {
    return sum(relu(affine(eye, t.constant(std::vector<double>{0, 1}), v)));
  };
  auto r = check_gradients(f, {&v});
  CHECK(r.kinks == 1);
  CHECK(r.checked == 1);
  CHECK(r.max_rel_error < 1e-9);
}

TEST_CASE("sgd with momentum follows the recurrence") {
  Parameter p("p", Tensor::Vector({0.0}));
  std::vector<Parameter *> ps{&p};
  p.grad[0] = 1.0;
  sgd_momentum_step(ps, {0.1, 0.0, 0.0});
  CHECK(p.value[0] == doctest::Approx(-0.1).epsilon(1e-15));
  CHECK(p.grad[0] == 0.0);

  Parameter q("q", Tensor::Vector({0.0}));
  std::vector<Parameter *> qs{&q};
  q.grad[0] = 1.0;
  sgd_momentum_step(qs, {0.1, 0.9, 0.0});
  q.grad[0] = 1.0;
  sgd_momentum_step(qs, {0.1, 0.9, 0.0});
  CHECK(q.value[0] == doctest::Approx(-0.29).epsilon(1e-14));

  double v_before = q.velocity[0];
  double x_before = q.value[0];
  sgd_momentum_step(qs, {0.1, 0.9, 0.0});  // zero grad
  CHECK(q.velocity[0] == doctest::Approx(0.9 * v_before).epsilon(1e-15));
  CHECK(q.value[0] == doctest::Approx(x_before + 0.9 * v_before).epsilon(1e-15));
}

TEST_CASE("zero gradient and zero momentum leave a parameter unchanged") {
  Parameter p("p", Tensor::Vector({1.5, -2.0}));
  std::vector<Parameter *> ps{&p};
  sgd_momentum_step(ps, {0.1, 0.0, 0.0});
  CHECK(p.value == Tensor::Vector({1.5, -2.0}));
}

TEST_CASE("a non-finite gradient aborts the whole step") {
  Parameter a("a", Tensor::Vector({1.0}));
  Parameter b("b", Tensor::Vector({1.0}));
  std::vector<Parameter *> ps{&a, &b};
  a.grad[0] = 1.0;
  b.grad[0] = std::nan("");
  CHECK_THROWS_AS(sgd_momentum_step(ps, {0.1, 0.9, 0.0}), DivergenceError);
  CHECK(a.value[0] == 1.0);
  CHECK(a.velocity[0] == 0.0);
}

TEST_CASE("max-norm clipping rescales the joint gradient") {
  Parameter a("a", Tensor::Vector({0.0, 0.0}));
  std::vector<Parameter *> ps{&a};
  a.grad[0] = 3.0;
  a.grad[1] = 4.0;
  sgd_momentum_step(ps, {1.0, 0.0, 1.0});
  CHECK(a.value[0] == doctest::Approx(-0.6));
  CHECK(a.value[1] == doctest::Approx(-0.8));
}

TEST_CASE("training steps are bit-reproducible for a fixed seed") {
  auto run = [](std::uint64_t seed) {
    RandomGraph g(seed);
    auto ps = g.params();
    for (int step = 0; step < 25; ++step) {
      Tape t;
      t.backward(g(t));
      sgd_momentum_step(ps, {0.05, 0.9, 0.0});
    }
    std::vector<Tensor> out;
    for (auto *p : ps) out.push_back(p->value);
    return out;
  };
  CHECK(run(42) == run(42));
  CHECK(run(42) != run(43));
}

}  // namespace
}  // namespace derivgen
