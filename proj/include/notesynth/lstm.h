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

#ifndef NOTESYNTH_LSTM_H_
#define NOTESYNTH_LSTM_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "notesynth/common.h"
#include "notesynth/tensor.h"

namespace notesynth::nn {

// One LSTM layer. Gate blocks are stacked in the order input, forget, cell,
// output, each `hidden` rows tall.
template <typename Scalar>
struct LstmLayer {
  Matrix<Scalar> w_input;      // 4H x In
  Matrix<Scalar> w_recurrent;  // 4H x H
  Matrix<Scalar> bias;         // 4H x 1

  Index hidden() const { return w_recurrent.cols(); }
  Index input_size() const { return w_input.cols(); }

  static LstmLayer zeros(Index input_size, Index hidden) {
    return {Matrix<Scalar>::Zero(4 * hidden, input_size),
            Matrix<Scalar>::Zero(4 * hidden, hidden),
            Matrix<Scalar>::Zero(4 * hidden, 1)};
  }

  void append_tensors(const std::string& prefix, NamedTensors<Scalar>& out) {
    out.emplace_back(prefix + ".w_input", &w_input);
    out.emplace_back(prefix + ".w_recurrent", &w_recurrent);
    out.emplace_back(prefix + ".bias", &bias);
  }
};

template <typename Scalar>
struct LayerState {
  Matrix<Scalar> h;  // H x B
  Matrix<Scalar> c;  // H x B

  static LayerState zeros(Index hidden, Index batch) {
    return {Matrix<Scalar>::Zero(hidden, batch),
            Matrix<Scalar>::Zero(hidden, batch)};
  }
};

// Activations kept for the backward pass. Column t*B + b is time step t of
// stream b.
template <typename Scalar>
struct LayerCache {
  Matrix<Scalar> inputs;     // In x TB
  Matrix<Scalar> gates;      // 4H x TB, after the nonlinearities
  Matrix<Scalar> cells;      // H x TB
  Matrix<Scalar> cell_tanh;  // H x TB
  Matrix<Scalar> outputs;    // H x TB
  Matrix<Scalar> h_prev;     // H x TB, state entering each step
  Matrix<Scalar> c_prev;     // H x TB
  std::vector<std::uint8_t> reset;  // TB flags, empty when unused
};

// Runs the layer over T = inputs.cols() / batch steps, updating `state` in
// place, and returns the hidden outputs (H x TB). A nonzero reset flag for
// column k zeroes that stream's state before step k is computed.
template <typename Scalar>
Matrix<Scalar> layer_forward(const LstmLayer<Scalar>& layer,
                             const Matrix<Scalar>& inputs, Index batch,
                             LayerState<Scalar>& state,
                             LayerCache<Scalar>* cache,
                             const std::vector<std::uint8_t>* reset = nullptr) {
  const Index hidden = layer.hidden();
  if (inputs.rows() != layer.input_size() || batch <= 0 ||
      inputs.cols() % batch != 0 || state.h.rows() != hidden ||
      state.h.cols() != batch ||
      (reset && static_cast<Index>(reset->size()) != inputs.cols())) {
    throw std::invalid_argument("lstm layer: dimension mismatch");
  }
  const Index steps = inputs.cols() / batch;

  Matrix<Scalar> zx = layer.w_input * inputs;
  zx.colwise() += layer.bias.col(0);

  Matrix<Scalar> outputs(hidden, inputs.cols());
  if (cache) {
    cache->inputs = inputs;
    cache->gates.resize(4 * hidden, inputs.cols());
    cache->cells.resize(hidden, inputs.cols());
    cache->cell_tanh.resize(hidden, inputs.cols());
    cache->h_prev.resize(hidden, inputs.cols());
    cache->c_prev.resize(hidden, inputs.cols());
    if (reset) {
      cache->reset = *reset;
    } else {
      cache->reset.clear();
    }
  }

  Matrix<Scalar> z(4 * hidden, batch);
  Matrix<Scalar> tc(hidden, batch);
  for (Index t = 0; t < steps; ++t) {
    if (reset) {
      for (Index b = 0; b < batch; ++b) {
        if ((*reset)[t * batch + b]) {
          state.h.col(b).setZero();
          state.c.col(b).setZero();
        }
      }
    }
    if (cache) {
      cache->h_prev.middleCols(t * batch, batch) = state.h;
      cache->c_prev.middleCols(t * batch, batch) = state.c;
    }
    z.noalias() = layer.w_recurrent * state.h;
    z += zx.middleCols(t * batch, batch);
    auto ifg = z.topRows(2 * hidden).array();
    ifg = Scalar(1) / (Scalar(1) + (-ifg).exp());
    z.middleRows(2 * hidden, hidden).array() =
        z.middleRows(2 * hidden, hidden).array().tanh();
    auto og = z.bottomRows(hidden).array();
    og = Scalar(1) / (Scalar(1) + (-og).exp());

    state.c.array() =
        z.middleRows(hidden, hidden).array() * state.c.array() +
        z.topRows(hidden).array() * z.middleRows(2 * hidden, hidden).array();
    tc.array() = state.c.array().tanh();
    state.h.array() = z.bottomRows(hidden).array() * tc.array();
    outputs.middleCols(t * batch, batch) = state.h;
    if (cache) {
      cache->gates.middleCols(t * batch, batch) = z;
      cache->cells.middleCols(t * batch, batch) = state.c;
      cache->cell_tanh.middleCols(t * batch, batch) = tc;
    }
  }
  if (cache) cache->outputs = outputs;
  return outputs;
}

// Backpropagation through time over one cached chunk. Gradients flowing into
// the initial state, or across a reset, are dropped. Accumulates parameter
// gradients into `grads` and returns d(loss)/d(inputs).
template <typename Scalar>
Matrix<Scalar> layer_backward(const LstmLayer<Scalar>& layer,
                              const LayerCache<Scalar>& cache,
                              const Matrix<Scalar>& d_outputs, Index batch,
                              LstmLayer<Scalar>& grads) {
  const Index hidden = layer.hidden();
  const Index total = cache.outputs.cols();
  if (d_outputs.rows() != hidden || d_outputs.cols() != total) {
    throw std::invalid_argument("lstm layer backward: dimension mismatch");
  }
  const Index steps = total / batch;

  Matrix<Scalar> dz_all(4 * hidden, total);
  Matrix<Scalar> dh_next = Matrix<Scalar>::Zero(hidden, batch);
  Matrix<Scalar> dc_next = Matrix<Scalar>::Zero(hidden, batch);
  Matrix<Scalar> dh(hidden, batch);
  Matrix<Scalar> dc(hidden, batch);

  for (Index t = steps - 1; t >= 0; --t) {
    const Index col = t * batch;
    const auto gates = cache.gates.middleCols(col, batch);
    const auto i = gates.topRows(hidden).array();
    const auto f = gates.middleRows(hidden, hidden).array();
    const auto g = gates.middleRows(2 * hidden, hidden).array();
    const auto o = gates.bottomRows(hidden).array();
    const auto tc = cache.cell_tanh.middleCols(col, batch).array();
    const auto c_prev = cache.c_prev.middleCols(col, batch).array();

    dh = d_outputs.middleCols(col, batch) + dh_next;
    dc.array() = dc_next.array() + dh.array() * o * (Scalar(1) - tc * tc);

    auto dz = dz_all.middleCols(col, batch);
    dz.topRows(hidden).array() = dc.array() * g * i * (Scalar(1) - i);
    dz.middleRows(hidden, hidden).array() =
        dc.array() * c_prev * f * (Scalar(1) - f);
    dz.middleRows(2 * hidden, hidden).array() =
        dc.array() * i * (Scalar(1) - g * g);
    dz.bottomRows(hidden).array() = dh.array() * tc * o * (Scalar(1) - o);

    dc_next.array() = dc.array() * f;
    dh_next.noalias() = layer.w_recurrent.transpose() * dz;
    if (!cache.reset.empty()) {
      for (Index b = 0; b < batch; ++b) {
        if (cache.reset[col + b]) {
          dc_next.col(b).setZero();
          dh_next.col(b).setZero();
        }
      }
    }
  }

  grads.w_recurrent.noalias() += dz_all * cache.h_prev.transpose();
  grads.w_input.noalias() += dz_all * cache.inputs.transpose();
  grads.bias += dz_all.rowwise().sum();
  return layer.w_input.transpose() * dz_all;
}

// A sequence of token ids laid out as T steps x B streams; element (t, b) is
// ids[t * batch + b], matching column t*B + b of the activation matrices.
// When `reset_token` is set, every stream's state is zeroed right before that
// token is consumed.
struct TokenBatch {
  Index steps = 0;
  Index batch = 0;
  std::vector<TokenId> ids;
  TokenId reset_token = -1;

  TokenId at(Index t, Index b) const { return ids[t * batch + b]; }
};

}  // namespace notesynth::nn

#endif  // NOTESYNTH_LSTM_H_
