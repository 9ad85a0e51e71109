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

#ifndef DERIVGEN_TESTS_GRADCHECK_H_
#define DERIVGEN_TESTS_GRADCHECK_H_

// Central finite-difference gradient checking. Only forward evaluations are
// used to build the numeric side, so the check is independent of backward().

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "derivgen/autodiff.h"
#include "derivgen/tensor.h"

namespace derivgen::testing {

struct GradCheckResult {
  // Worst over parameters of |analytic - numeric| / max(|analytic|,
  // |numeric|, floor), with norms taken over the parameter's entries.
  double max_rel_error = 0.0;
  std::string worst;  // parameter holding max_rel_error
  // Worst single entry, judged on the same formula. Diagnostic only.
  double max_entry_error = 0.0;
  std::string worst_entry;  // "param[index]: analytic vs numeric"
  std::size_t checked = 0;
  // Entries whose +-eps probes changed the side of a relu or max kink. The
  // central difference is meaningless there, so they are left out.
  std::size_t kinks = 0;
};

// Relative error with a floor on the denominator so values that are ~0 are
// judged on absolute error instead.
inline double rel_error(double analytic, double numeric, double floor = 1e-6) {
  double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

// `forward` receives a freshly reset tape each call.
inline GradCheckResult check_gradients(const std::function<Var(Tape &)> &forward,
                                       const std::vector<Parameter *> &params,
                                       double eps = 1e-5, std::size_t stride = 1,
                                       double floor = 1e-8) {
  for (Parameter *p : params) p->zero_grad();
  Tape tape;
  Var loss = forward(tape);
  const std::vector<bool> pattern = tape.branch_pattern();
  tape.backward(loss);
  std::vector<std::vector<double>> analytic;
  for (Parameter *p : params) {
    analytic.emplace_back(p->grad.data().begin(), p->grad.data().end());
    p->zero_grad();
  }
  GradCheckResult r;
  std::size_t counter = 0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto values = params[k]->value.data();
    double diff2 = 0, a2 = 0, n2 = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (counter++ % stride != 0) continue;
      double saved = values[i];
      values[i] = saved + eps;
      tape.reset();
      double up = forward(tape).scalar();
      bool same = tape.branch_pattern() == pattern;
      values[i] = saved - eps;
      tape.reset();
      double down = forward(tape).scalar();
      same = same && tape.branch_pattern() == pattern;
      values[i] = saved;
      if (!same) {
        ++r.kinks;
        continue;
      }
      double a = analytic[k][i];
      double numeric = (up - down) / (2 * eps);
      diff2 += (a - numeric) * (a - numeric);
      a2 += a * a;
      n2 += numeric * numeric;
      ++r.checked;
      double err = rel_error(a, numeric);
      if (err > r.max_entry_error) {
        r.max_entry_error = err;
        r.worst_entry = params[k]->name + "[" + std::to_string(i) +
                        "]: " + std::to_string(a) + " vs " + std::to_string(numeric);
      }
    }
    double err = std::sqrt(diff2) / std::max({std::sqrt(a2), std::sqrt(n2), floor});
    if (err > r.max_rel_error) {
      r.max_rel_error = err;
      r.worst = params[k]->name;
    }
  }
  return r;
}

}  // namespace derivgen::testing

#endif  // DERIVGEN_TESTS_GRADCHECK_H_
