// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>

#include "phpvd/common/rng.hpp"
#include "phpvd/model/featurizer.hpp"
#include "phpvd/model/params.hpp"
#include "phpvd/tensor/tensor.hpp"

namespace phpvd::model {

/// Logits (B x classes) for a batch. The graphs are run as one disjoint
/// union; each sample's max pool only sees its own nodes. `rng` drives
/// dropout and must be non-null when training.
tensor::Tensor forward_batch(const ModelParams& params, std::span<const Features* const> batch,
                             bool training, Rng* rng = nullptr);

/// Logits (length classes) for one sample.
tensor::Tensor forward(const ModelParams& params, const Features& features, bool training = false,
                       Rng* rng = nullptr);

/// Throws ConfigMismatch unless `f` was built for `arch` and `vocab_version`.
void check_features(const ArchitectureConfig& arch, const std::string& vocab_version, const Features& f);

}  // namespace phpvd::model
