/*
 * Copyright 2026 The DLCM Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Finite-difference gradient checker. The analytic gradient comes from a
// float32 graph; the reference is a central difference of a float64 shadow
// evaluation of the same function.

#ifndef DLCM_TESTS_GRADCHECK_H_
#define DLCM_TESTS_GRADCHECK_H_

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dlcm/gradcore/graph.h"
#include "dlcm/models/params.h"

namespace dlcm::testing {

struct GradCheckOptions {
  double step = 1e-3;
  double rel_tol = 1e-3;
  double abs_tol = 1e-5;
};

struct GradCheckResult {
  std::size_t checked = 0;
  std::size_t failures = 0;
  double worst_excess = 0.0;  // largest |a - f| / allowed
  std::string worst;          // description of the worst entry

  bool ok() const { return failures == 0; }
};

// |analytic - numeric| <= max(rel * max(|a|, |f|), abs).
bool GradientsAgree(double analytic, double numeric,
                    const GradCheckOptions& opt = {});

void RecordComparison(GradCheckResult& r, const std::string& where,
                      double analytic, double numeric,
                      const GradCheckOptions& opt);

// `fn` is a generic callable
//   grad::Tensor<T> fn(grad::Graph<T>&, const std::vector<grad::Tensor<T>>&)
// returning a single-element tensor, invoked with T = float and T = double.
template <typename Fn>
GradCheckResult CheckParamGradients(const models::ParamSet<float>& params,
                                    Fn&& fn, const GradCheckOptions& opt = {}) {
  std::vector<grad::Array<float>> analytic;
  {
    grad::Graph<float> g;
    const auto bound = models::Bind(g, params, true);
    const grad::Tensor<float> out = fn(g, bound);
    g.Backward(out);
    analytic = models::CollectGrads(bound);
  }
  models::ParamSet<double> shadow = models::CastParams<double>(params);
  auto eval = [&]() {
    grad::Graph<double> g;
    const auto bound = models::Bind(g, shadow, false);
    return fn(g, bound).item();
  };
  GradCheckResult r;
  for (std::size_t p = 0; p < shadow.size(); ++p) {
    auto& values = shadow[p].value.data;
    for (std::size_t e = 0; e < values.size(); ++e) {
      const double saved = values[e];
      values[e] = saved + opt.step;
      const double up = eval();
      values[e] = saved - opt.step;
      const double down = eval();
      values[e] = saved;
      RecordComparison(r, shadow[p].name + "[" + std::to_string(e) + "]",
                       analytic[p].data[e], (up - down) / (2.0 * opt.step), opt);
    }
  }
  return r;
}

}  // namespace dlcm::testing

#endif  // DLCM_TESTS_GRADCHECK_H_
