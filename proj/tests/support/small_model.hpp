// SPDX-License-Identifier: Apache-2.0
// A narrow network for fast model tests, plus graph permutation helpers.
#pragma once

#include <numeric>
#include <vector>

#include "phpvd/cfg/cfg.hpp"
#include "phpvd/common/rng.hpp"
#include "phpvd/model/config.hpp"
#include "phpvd/model/featurizer.hpp"

namespace testing_support {

inline phpvd::model::ArchitectureConfig small_arch(phpvd::Granularity g, std::size_t vocab_size) {
    auto a = phpvd::model::ArchitectureConfig::for_granularity(g, vocab_size);
    a.embed_dim = 3;
    a.gru_hidden = 4;
    a.gcn_dims = {a.cfg_node_len * 3, 12, 10, 10};
    a.fc_dims = {16, 8, 4};
    return a;
}

/// Node i of `f` becomes node perm[i]; edges are relabelled to match.
inline phpvd::model::Features permuted(const phpvd::model::Features& f, const std::vector<std::size_t>& perm) {
    auto out = f;
    const auto n = f.graph.node_count();
    const auto len = phpvd::cfg::kNodeLength;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < len; ++k) out.graph.ids[perm[i] * len + k] = f.graph.ids[i * len + k];
        out.graph.lines[perm[i]] = f.graph.lines[i];
    }
    out.graph.edges.clear();
    for (const auto& [a, b] : f.graph.edges) out.graph.edges.emplace_back(perm[a], perm[b]);
    return out;
}

inline std::vector<std::size_t> random_permutation(phpvd::Rng& rng, std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    rng.shuffle(p);
    return p;
}

}  // namespace testing_support
