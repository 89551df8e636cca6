// Copyright 2026 The GAMT Authors. All Rights Reserved.
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

#pragma once

// Central finite-difference oracle shared by the gradient tests. It only
// evaluates the loss function; it never touches the tape.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "gamt/autodiff.hpp"

namespace gamt::testing {

struct GradientMismatch {
  std::string parameter;
  std::size_t element;
  double analytic;
  double numeric;
};

inline double numeric_derivative(ParameterStore& store, std::size_t p, std::size_t e,
                                 const std::function<double(const ParameterStore&)>& loss,
                                 double step = 1e-5) {
  const Tensor original = store.value(p);
  auto with = [&](double delta) {
    std::vector<double> data(original.data().begin(), original.data().end());
    data[e] += delta;
    store.set(p, Tensor(original.shape(), std::move(data)));
    const double v = loss(store);
    store.set(p, original);
    return v;
  };
  return (with(step) - with(-step)) / (2.0 * step);
}

// Compares every parameter entry; relative error <= rel_tol, or absolute error
// <= abs_tol when both values are near zero.
inline std::vector<GradientMismatch> check_gradients(
    ParameterStore& store, const Gradients& analytic,
    const std::function<double(const ParameterStore&)>& loss, double rel_tol = 1e-4,
    double abs_tol = 1e-7, double step = 1e-5) {
  std::vector<GradientMismatch> bad;
  for (std::size_t p = 0; p < store.size(); ++p) {
    for (std::size_t e = 0; e < store.value(p).size(); ++e) {
      const double num = numeric_derivative(store, p, e, loss, step);
      const double ana = analytic[p][e];
      const double diff = std::fabs(num - ana);
      const double denom = std::max(std::fabs(num), std::fabs(ana));
      if (diff > abs_tol && diff > rel_tol * denom) {
        bad.push_back({store.name(p), e, ana, num});
      }
    }
  }
  return bad;
}

}  // namespace gamt::testing
