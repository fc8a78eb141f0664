// SPDX-License-Identifier: Apache-2.0
#include "phpvd/model/network.hpp"

#include <vector>

#include "phpvd/common/error.hpp"
#include "phpvd/tensor/graph_ops.hpp"
#include "phpvd/tensor/gru.hpp"
#include "phpvd/tensor/ops.hpp"

namespace phpvd::model {

using tensor::Tensor;

void check_features(const ArchitectureConfig& arch, const std::string& vocab_version, const Features& f) {
    if (f.seq.granularity != arch.granularity) {
        throw ConfigMismatch("features are " + std::string(to_string(f.seq.granularity)) + "-level, model is " +
                             std::string(to_string(arch.granularity)) + "-level");
    }
    if (f.vocab_version != vocab_version) {
        throw ConfigMismatch("vocabulary " + f.vocab_version + " does not match model vocabulary " + vocab_version);
    }
    if (f.seq.ids.size() != arch.seq_len) {
        throw ConfigMismatch("sequence length " + std::to_string(f.seq.ids.size()) + ", model expects " +
                             std::to_string(arch.seq_len));
    }
}

namespace {

Tensor token_path(const ModelParams& p, const Features& f, bool training, Rng* rng) {
    const auto n = std::min(f.seq.true_len, f.seq.ids.size());
    const auto x = tensor::embedding(p.token_embed, std::span(f.seq.ids).first(n));
    return tensor::gru_forward(x, p.gru, p.arch.gru_dropout, training, rng);
}

}  // namespace

Tensor forward_batch(const ModelParams& params, std::span<const Features* const> batch, bool training, Rng* rng) {
    const auto& arch = params.arch;
    if (batch.empty()) throw ShapeMismatch("forward_batch on an empty batch");
    if (training && rng == nullptr) throw Error("forward_batch: training needs a dropout generator");
    for (const auto* f : batch) {
        if (f->seq.granularity != arch.granularity) {
            throw ConfigMismatch("features granularity does not match the model");
        }
    }

    std::vector<Tensor> seq_rows;
    seq_rows.reserve(batch.size());
    for (const auto* f : batch) seq_rows.push_back(token_path(params, *f, training, rng));
    const auto seq = tensor::stack_rows(seq_rows);

    std::vector<std::uint32_t> ids;
    std::vector<tensor::Edge> edges;
    std::vector<std::size_t> segment;
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const auto& g = batch[b]->graph;
        const auto offset = segment.size();
        if (g.ids.size() != g.node_count() * arch.cfg_node_len) throw ShapeMismatch("cfg feature size");
        ids.insert(ids.end(), g.ids.begin(), g.ids.end());
        for (const auto& [u, v] : g.edges) edges.emplace_back(u + offset, v + offset);
        segment.insert(segment.end(), g.node_count(), b);
    }
    if (segment.empty()) throw EmptyGraph("batch has no graph nodes");
    auto x = tensor::reshape(tensor::embedding(params.node_embed, ids), {segment.size(), arch.gcn_dims.front()});
    for (std::size_t l = 0; l < params.gcn.size(); ++l) {
        x = tensor::gcn_conv(x, edges, params.gcn[l], true, arch.gcn_symmetric);
        auto pooled = tensor::edge_pool(x, edges, params.pool[l]);
        std::vector<std::size_t> next(pooled.x.size(0));
        for (std::size_t i = 0; i < segment.size(); ++i) next[pooled.mapping[i]] = segment[i];
        x = pooled.x;
        edges = std::move(pooled.edges);
        segment = std::move(next);
    }
    const auto graph = tensor::segment_max_pool(x, segment, batch.size());

    Rng unused(0);  // dropout is the identity at inference
    Rng& drop_rng = rng ? *rng : unused;
    auto h = tensor::concat_cols(seq, graph);
    for (std::size_t l = 0; l < params.fc.size(); ++l) {
        h = tensor::linear(h, params.fc[l].W, params.fc[l].b);
        if (l + 1 < params.fc.size()) {
            h = tensor::dropout(h, arch.fc_dropout, training, drop_rng);
            h = tensor::relu(h);
        }
    }
    return h;
}

Tensor forward(const ModelParams& params, const Features& features, bool training, Rng* rng) {
    const Features* one[] = {&features};
    return tensor::reshape(forward_batch(params, one, training, rng), {params.arch.fc_dims.back()});
}

}  // namespace phpvd::model
