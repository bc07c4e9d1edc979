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

#ifndef NOTESYNTH_TENSOR_H_
#define NOTESYNTH_TENSOR_H_

#include <Eigen/Core>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "notesynth/rng.h"

namespace notesynth::nn {

using Index = Eigen::Index;

// Every trainable tensor is a dense column-major matrix; vectors are n x 1.
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Derived>
typename Derived::PlainObject sigmoid(const Eigen::MatrixBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return (S(1) / (S(1) + (-x.array()).exp())).matrix();
}

// Column-wise log-softmax.
template <typename Derived>
typename Derived::PlainObject log_softmax_columns(
    const Eigen::MatrixBase<Derived>& logits) {
  typename Derived::PlainObject out = logits;
  for (Index j = 0; j < out.cols(); ++j) {
    auto col = out.col(j);
    const auto max = col.maxCoeff();
    col.array() -= max;
    const auto log_sum = std::log(col.array().exp().sum());
    col.array() -= log_sum;
  }
  return out;
}

template <typename Scalar>
void fill_uniform(Matrix<Scalar>& m, Rng& rng, double lo, double hi) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      m(i, j) = static_cast<Scalar>(rng.uniform(lo, hi));
    }
  }
}

// Inverted dropout mask: entries are 0 with probability `rate`, otherwise
// 1 / (1 - rate), so the expected activation is unchanged.
template <typename Scalar>
Matrix<Scalar> dropout_mask(Index rows, Index cols, double rate, Rng& rng) {
  Matrix<Scalar> mask(rows, cols);
  const auto keep = static_cast<Scalar>(1.0 / (1.0 - rate));
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      mask(i, j) = rng.bernoulli(rate) ? Scalar(0) : keep;
    }
  }
  return mask;
}

template <typename Scalar>
using NamedTensors = std::vector<std::pair<std::string, Matrix<Scalar>*>>;

template <typename Scalar>
double global_norm(const NamedTensors<Scalar>& tensors) {
  double sq = 0.0;
  for (const auto& [name, t] : tensors) {
    sq += static_cast<double>(t->squaredNorm());
  }
  return std::sqrt(sq);
}

// Rescales so that the global L2 norm is at most `max_norm`. Returns the norm
// before clipping.
template <typename Scalar>
double clip_global_norm(const NamedTensors<Scalar>& tensors, double max_norm) {
  const double norm = global_norm(tensors);
  if (norm > max_norm) {
    const auto scale = static_cast<Scalar>(max_norm / (norm + 1e-12));
    for (auto& [name, t] : tensors) *t *= scale;
  }
  return norm;
}

}  // namespace notesynth::nn

#endif  // NOTESYNTH_TENSOR_H_
