// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "phpvd/common/granularity.hpp"
#include "phpvd/tensor/optim.hpp"

namespace phpvd::model {

struct ArchitectureConfig {
    Granularity granularity = Granularity::Function;
    std::size_t vocab_size = 0;
    std::size_t seq_len = 200;
    std::size_t cfg_node_len = 20;
    std::size_t embed_dim = 100;
    std::size_t gru_layers = 3;
    std::size_t gru_hidden = 100;
    double gru_dropout = 0.0;
    /// Node feature width followed by each GCN layer's output width.
    std::vector<std::size_t> gcn_dims{2000, 2000, 4000, 4000};
    bool gcn_symmetric = true;
    /// Hidden FC widths followed by the class count.
    std::vector<std::size_t> fc_dims{1000, 500, 4};
    double fc_dropout = 0.3;

    /// Default sizes for a granularity and vocabulary.
    static ArchitectureConfig for_granularity(Granularity g, std::size_t vocab_size);

    std::size_t gru_output_dim() const noexcept { return 2 * gru_layers * gru_hidden; }
    std::size_t fc_input_dim() const noexcept { return gru_output_dim() + gcn_dims.back(); }

    /// Throws ConfigMismatch when the dimensions are inconsistent.
    void validate() const;

    std::string to_json() const;
    static ArchitectureConfig from_json(const std::string& text);
    /// Hex FNV-1a of the canonical JSON.
    std::string hash() const;

    bool operator==(const ArchitectureConfig&) const = default;
};

struct TrainConfig {
    std::size_t batch_size = 64;
    std::size_t epochs = 150;
    std::uint64_t seed = 0;
    tensor::AdamConfig adam{};
    tensor::PlateauConfig scheduler{};
    /// Inverse-frequency class weights in the loss.
    bool class_weights = false;
    /// Worker threads for featurization (results are ordered regardless).
    std::size_t threads = 1;

    void validate() const;
};

}  // namespace phpvd::model
