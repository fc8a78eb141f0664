// SPDX-License-Identifier: Apache-2.0
#include "phpvd/model/predictor.hpp"

#include "phpvd/common/error.hpp"
#include "phpvd/model/network.hpp"
#include "phpvd/tensor/ops.hpp"

namespace phpvd::model {

Prediction from_logits(std::span<const double> logits) {
    if (logits.size() != kNumLabels) throw ShapeMismatch("expected " + std::to_string(kNumLabels) + " logits");
    const auto probs = tensor::softmax(tensor::Tensor::vector({logits.begin(), logits.end()}));
    Prediction p;
    std::size_t best = 0;
    for (std::size_t i = 0; i < kNumLabels; ++i) {
        p.probabilities[i] = probs.at(i);
        if (logits[i] > logits[best]) best = i;
    }
    p.label = label_from_index(best);
    return p;
}

Prediction predict(const Model& m, const Features& f) {
    check_features(m.arch(), m.vocab.version(), f);
    const tensor::NoGrad no_grad;
    const auto logits = forward(m.params, f, false);
    return from_logits(logits.data());
}

Prediction predict(const Model& m, std::string_view code) { return predict(m, m.featurizer()(code)); }

}  // namespace phpvd::model
