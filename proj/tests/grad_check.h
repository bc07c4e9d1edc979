// Copyright 2026 The notesynth Authors.
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

#ifndef NOTESYNTH_TESTS_GRAD_CHECK_H_
#define NOTESYNTH_TESTS_GRAD_CHECK_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "notesynth/lstm_lm.h"
#include "notesynth/rng.h"

namespace notesynth::testing {

// Relative error |a - n| / max(|a|, |n|, floor).
inline constexpr double kRelativeErrorFloor = 1e-6;

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst;
  int coordinates = 0;
};

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), kRelativeErrorFloor});
}

// Central differences at `coords` coordinates. With `per_group` set, every
// tensor gets `coords` coordinates; otherwise coordinates are drawn uniformly
// over all parameters.
template <typename Params, typename LossFn>
GradCheckResult check_gradients(Params& params, Params& analytic, LossFn&& loss,
                                int coords, bool per_group, std::uint64_t seed,
                                double eps = 1e-5) {
  auto p = params.tensors();
  auto g = analytic.tensors();
  Rng rng(seed);
  std::vector<std::pair<std::size_t, Eigen::Index>> picks;
  if (per_group) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      for (int c = 0; c < coords; ++c) {
        picks.emplace_back(k, static_cast<Eigen::Index>(rng.below(p[k].second->size())));
      }
    }
  } else {
    Eigen::Index total = 0;
    for (auto& [name, t] : p) total += t->size();
    for (int c = 0; c < coords; ++c) {
      Eigen::Index flat = static_cast<Eigen::Index>(rng.below(total));
      std::size_t k = 0;
      while (flat >= p[k].second->size()) flat -= p[k++].second->size();
      picks.emplace_back(k, flat);
    }
  }

  GradCheckResult result;
  for (const auto& [k, idx] : picks) {
    double& w = p[k].second->data()[idx];
    const double saved = w;
    w = saved + eps;
    const double up = loss();
    w = saved - eps;
    const double down = loss();
    w = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double a = g[k].second->data()[idx];
    const double err = relative_error(a, numeric);
    ++result.coordinates;
    if (err >= result.max_relative_error) {
      result.max_relative_error = err;
      result.worst = p[k].first + "[" + std::to_string(idx) + "] analytic " +
                     std::to_string(a) + " numeric " + std::to_string(numeric);
    }
  }
  return result;
}

struct LstmCheckSetup {
  nn::LstmLmParams<double> params;
  nn::TokenBatch inputs;
  std::vector<TokenId> targets;
  double dropout = 0.0;
  std::uint64_t dropout_seed = 99;

  double loss(nn::LstmLmParams<double>* grads) const {
    auto state = nn::LmState<double>::zeros(params, inputs.batch);
    Rng rng(dropout_seed);
    const nn::Dropout drop{dropout, dropout > 0.0 ? &rng : nullptr};
    nn::LmForwardCache<double> cache;
    nn::lstm_forward(params, inputs, state, drop, &cache);
    auto scratch = params.zeros_like();
    return nn::lstm_backward(params, cache, targets, grads ? *grads : scratch);
  }
};

// Random parameters in [-0.5, 0.5] so that the gates are away from linear.
inline LstmCheckSetup make_lstm_check(int vocab, int hidden, int layers,
                                      int steps, int batch,
                                      std::uint64_t seed) {
  LstmCheckSetup s;
  s.params = nn::LstmLmParams<double>::zeros(vocab, hidden, layers);
  Rng rng(seed);
  for (auto& [name, t] : s.params.tensors()) nn::fill_uniform(*t, rng, -0.5, 0.5);
  s.inputs.steps = steps;
  s.inputs.batch = batch;
  for (int k = 0; k < steps * batch; ++k) {
    s.inputs.ids.push_back(static_cast<TokenId>(rng.below(vocab)));
    s.targets.push_back(static_cast<TokenId>(rng.below(vocab)));
  }
  return s;
}

inline GradCheckResult run_lstm_check(LstmCheckSetup& s, int coords,
                                      bool per_group, std::uint64_t seed) {
  auto grads = s.params.zeros_like();
  s.loss(&grads);
  return check_gradients(s.params, grads, [&] { return s.loss(nullptr); },
                         coords, per_group, seed);
}

}  // namespace notesynth::testing

#endif  // NOTESYNTH_TESTS_GRAD_CHECK_H_
