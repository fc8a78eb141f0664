// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "phpvd/model/config.hpp"
#include "phpvd/tensor/graph_ops.hpp"
#include "phpvd/tensor/gru.hpp"
#include "phpvd/tensor/tensor.hpp"

namespace phpvd::model {

struct LinearParams {
    tensor::Tensor W;  // out x in
    tensor::Tensor b;  // out
};

/// Every learnable tensor of the hybrid network.
struct ModelParams {
    ArchitectureConfig arch;
    tensor::Tensor token_embed;  // V x E
    tensor::Tensor node_embed;   // V x E
    std::vector<tensor::GruLayerPair> gru;
    std::vector<tensor::GcnLayerParams> gcn;
    std::vector<tensor::EdgePoolParams> pool;
    std::vector<LinearParams> fc;

    /// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases 0, embeddings
    /// 0.1 * N(0, 1), drawn from one generator in named() order.
    static ModelParams init(const ArchitectureConfig& arch, std::uint64_t seed);

    /// Tensors with empty data of the right shapes, for loading.
    static ModelParams shaped(const ArchitectureConfig& arch);

    /// Layer-qualified names in a fixed order, e.g. "gru.l0.fwd.W_ir",
    /// "gcn.l1.Theta", "pool.l2.w", "fc.l0.W".
    std::vector<std::pair<std::string, tensor::Tensor>> named() const;
    std::vector<tensor::Tensor> tensors() const;
    std::size_t parameter_count() const;

    /// Deep copy (no shared storage).
    ModelParams clone() const;
    void set_requires_grad(bool on);
};

}  // namespace phpvd::model
