// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "phpvd/tensor/tensor.hpp"

namespace phpvd::tensor {

using Edge = std::pair<std::size_t, std::size_t>;

struct GcnLayerParams {
    Tensor Theta;  // D_in x D_out
};

struct EdgePoolParams {
    Tensor w;  // 2 * D
    Tensor b;  // scalar, stored as length 1
};

/// D^-1/2 (A + I) D^-1/2 X where A is the adjacency of `edges`,
/// symmetrized unless `symmetric` is false (then A_ij = 1 for an edge i->j
/// and D holds 1 + out-degree). Input self-loops and duplicate edges are
/// ignored. Throws ShapeMismatch on an endpoint >= N.
Tensor gcn_propagate(const Tensor& X, std::span<const Edge> edges, bool symmetric = true);

/// gcn_propagate(X Theta), followed by ReLU when `apply_relu`.
Tensor gcn_conv(const Tensor& X, std::span<const Edge> edges, const GcnLayerParams& p,
                bool apply_relu = true, bool symmetric = true);

struct PoolResult {
    Tensor x;                         // pooled node features, M x D
    std::vector<Edge> edges;          // sorted, deduplicated, no self-loops
    std::vector<std::size_t> mapping; // old node -> new node
};

/// Scores every edge with s = sigmoid(w . [x_i ; x_j] + b) and greedily
/// contracts the highest-scoring edges whose endpoints are both still free
/// (ties go to the lower edge index). A contracted pair becomes one node with
/// feature s * (x_i + x_j); free nodes pass through. New nodes are ordered by
/// their smallest original index.
PoolResult edge_pool(const Tensor& X, std::span<const Edge> edges, const EdgePoolParams& p);

/// Column-wise max over the rows of X (N x D). Gradient goes to the first
/// argmax. Throws EmptyGraph when N = 0.
Tensor global_max_pool(const Tensor& X);

/// Column-wise max per segment: row r belongs to segment[r] < count. Returns
/// count x D; a segment with no rows yields zeros.
Tensor segment_max_pool(const Tensor& X, std::span<const std::size_t> segment, std::size_t count);

}  // namespace phpvd::tensor
