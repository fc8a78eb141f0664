// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "phpvd/common/rng.hpp"
#include "phpvd/tensor/tensor.hpp"

namespace phpvd::tensor {

/// Rows of `table` (V x E) selected by `ids`: len(ids) x E. Throws IdOutOfRange.
Tensor embedding(const Tensor& table, std::span<const std::uint32_t> ids);

/// a (n x k) times b (k x m).
Tensor matmul(const Tensor& a, const Tensor& b);

/// x W^T + b with W out x in. x may be a vector (in) or a batch (n x in);
/// the result keeps x's rank.
Tensor linear(const Tensor& x, const Tensor& W, const Tensor& b);

Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);

/// Inverted dropout: kept entries are scaled by 1/(1-p). Identity when
/// training is false or p is 0.
Tensor dropout(const Tensor& x, double p, bool training, Rng& rng);

/// Row-wise softmax (a vector is one row).
Tensor softmax(const Tensor& x);

/// Mean over rows of -log softmax(logits)[label]; logits is n x C or a
/// single vector. Optional per-class weights follow the weighted-mean
/// convention (sum w_y * loss / sum w_y).
Tensor cross_entropy(const Tensor& logits, std::span<const std::size_t> labels,
                     std::span<const double> class_weights = {});

Tensor add(const Tensor& a, const Tensor& b);
/// Elementwise product of equal shapes.
Tensor mul(const Tensor& a, const Tensor& b);
Tensor sum(const Tensor& x);

/// Same data, new shape of equal element count.
Tensor reshape(const Tensor& x, Shape shape);

/// [a | b] along columns; both n x p / n x q (vectors count as one row).
Tensor concat_cols(const Tensor& a, const Tensor& b);

/// Rows [first, first+count) of a 2-D tensor.
Tensor slice_rows(const Tensor& x, std::size_t first, std::size_t count);

/// Stacks equal-length vectors / 1 x n rows into a k x n matrix.
Tensor stack_rows(const std::vector<Tensor>& rows);

}  // namespace phpvd::tensor
