// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "phpvd/common/rng.hpp"
#include "phpvd/tensor/tensor.hpp"

namespace phpvd::tensor {

enum class Direction { Forward, Backward };

/// One direction of one GRU layer. W_i* are H x D_in, W_h* are H x H,
/// biases have length H.
struct GruLayerParams {
    Tensor W_ir, W_iz, W_in;
    Tensor W_hr, W_hz, W_hn;
    Tensor b_ir, b_iz, b_in;
    Tensor b_hr, b_hz, b_hn;
    Direction direction = Direction::Forward;

    std::size_t hidden_size() const { return W_hr.size(0); }
    std::size_t input_size() const { return W_ir.size(1); }

    /// Throws ShapeMismatch when the twelve tensors disagree.
    void validate() const;
};

/// Forward and backward direction of one layer.
using GruLayerPair = std::pair<GruLayerParams, GruLayerParams>;

/// h_t for a single step:
///   r = sigmoid(W_ir x + b_ir + W_hr h + b_hr)
///   z = sigmoid(W_iz x + b_iz + W_hz h + b_hz)
///   n = tanh(W_in x + b_in + r * (W_hn h + b_hn))
///   h_t = (1 - z) * n + z * h
/// x has length D_in, h_prev length H; returns a length-H vector.
Tensor gru_cell(const Tensor& x, const Tensor& h_prev, const GruLayerParams& p);

/// Runs one direction over x (T x D_in) from h0 (zeros when absent). Row t
/// of the result is the hidden state after consuming x_t; the Backward
/// direction consumes rows T-1..0, so its final state is row 0.
Tensor gru_sequence(const Tensor& x, const GruLayerParams& p, const std::optional<Tensor>& h0 = {});

/// Stacked bidirectional GRU. Layer l > 0 reads [fwd | bwd] outputs of layer
/// l-1. Returns the final states ordered l0.fwd, l0.bwd, l1.fwd, ... as one
/// vector of 2 * layers * H. Dropout with probability `dropout` is applied to
/// each layer's output before the next layer when training. T = 0 yields
/// zeros.
Tensor gru_forward(const Tensor& x, const std::vector<GruLayerPair>& layers, double dropout = 0.0,
                   bool training = false, Rng* rng = nullptr);

}  // namespace phpvd::tensor
