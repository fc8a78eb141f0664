// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <string_view>

#include "phpvd/corpus/label.hpp"
#include "phpvd/model/checkpoint.hpp"
#include "phpvd/tensor/tensor.hpp"

namespace phpvd::model {

struct Prediction {
    Label label = Label::Safe;
    std::array<double, kNumLabels> probabilities{};
};

/// Softmax of `logits` (length 4); label is the argmax, ties to the lower
/// class index.
Prediction from_logits(std::span<const double> logits);

/// Inference-mode prediction on already featurized input.
Prediction predict(const Model& m, const Features& f);

/// Featurizes `code` with the model's preprocessing and predicts. A unit
/// that lexes but does not parse uses a single-node graph; LexError
/// propagates.
Prediction predict(const Model& m, std::string_view code);

}  // namespace phpvd::model
