// SPDX-License-Identifier: Apache-2.0
#include "phpvd/tensor/graph_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "phpvd/common/error.hpp"
#include "phpvd/tensor/ops.hpp"

namespace phpvd::tensor {

namespace {

// Row i of the normalized matrix: self weight plus (j, weight) pairs.
struct NormAdj {
    std::vector<double> self;
    std::vector<std::vector<std::pair<std::size_t, double>>> row;
};

NormAdj normalized_adjacency(std::size_t n, std::span<const Edge> edges, bool symmetric) {
    std::vector<std::vector<std::size_t>> nbr(n);
    for (const auto& [a, b] : edges) {
        if (a >= n || b >= n) {
            throw ShapeMismatch("edge (" + std::to_string(a) + "," + std::to_string(b) +
                                ") out of range for " + std::to_string(n) + " nodes");
        }
        if (a == b) continue;
        nbr[a].push_back(b);
        if (symmetric) nbr[b].push_back(a);
    }
    std::vector<double> deg(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::sort(nbr[i].begin(), nbr[i].end());
        nbr[i].erase(std::unique(nbr[i].begin(), nbr[i].end()), nbr[i].end());
        deg[i] = 1.0 + static_cast<double>(nbr[i].size());
    }
    NormAdj adj;
    adj.self.resize(n);
    adj.row.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        adj.self[i] = 1.0 / deg[i];
        for (auto j : nbr[i]) adj.row[i].emplace_back(j, 1.0 / std::sqrt(deg[i] * deg[j]));
    }
    return adj;
}

// y += M x, or y += M^T x when `transposed`.
void apply(const NormAdj& adj, const double* x, double* y, std::size_t d, bool transposed) {
    const auto n = adj.self.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < d; ++k) y[i * d + k] += adj.self[i] * x[i * d + k];
        for (const auto& [j, w] : adj.row[i]) {
            const auto dst = transposed ? j : i;
            const auto src = transposed ? i : j;
            double* yi = y + dst * d;
            const double* xj = x + src * d;
            for (std::size_t k = 0; k < d; ++k) yi[k] += w * xj[k];
        }
    }
}

}  // namespace

Tensor gcn_propagate(const Tensor& X, std::span<const Edge> edges, bool symmetric) {
    if (X.dim() != 2) throw ShapeMismatch("gcn input must be N x D");
    const auto n = X.size(0), d = X.size(1);
    auto adj = normalized_adjacency(n, edges, symmetric);
    std::vector<double> y(n * d, 0.0);
    apply(adj, X.data().data(), y.data(), d, false);
    return Tensor::make_result({n, d}, std::move(y), {X}, [adj = std::move(adj), d](detail::Node& self) {
        auto& p = *self.parents[0];
        if (!p.requires_grad) return;
        apply(adj, self.grad.data(), p.ensure_grad().data(), d, true);
    });
}

Tensor gcn_conv(const Tensor& X, std::span<const Edge> edges, const GcnLayerParams& p, bool apply_relu,
                bool symmetric) {
    if (X.dim() != 2 || p.Theta.dim() != 2 || X.size(1) != p.Theta.size(0)) {
        throw ShapeMismatch("gcn_conv X " + shape_string(X.shape()) + " Theta " + shape_string(p.Theta.shape()));
    }
    auto y = gcn_propagate(matmul(X, p.Theta), edges, symmetric);
    return apply_relu ? relu(y) : y;
}

PoolResult edge_pool(const Tensor& X, std::span<const Edge> edges, const EdgePoolParams& p) {
    if (X.dim() != 2) throw ShapeMismatch("edge_pool input must be N x D");
    const auto n = X.size(0), d = X.size(1);
    if (n == 0) throw EmptyGraph("edge_pool on an empty graph");
    if (p.w.numel() != 2 * d || p.b.numel() != 1) throw ShapeMismatch("edge_pool parameter shapes");
    const auto x = X.data();
    const auto w = p.w.data();
    const double b = p.b.data()[0];

    std::vector<std::size_t> candidates;
    std::vector<double> score(edges.size(), 0.0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [i, j] = edges[e];
        if (i >= n || j >= n) throw ShapeMismatch("edge_pool: edge endpoint out of range");
        if (i == j) continue;
        double a = b;
        for (std::size_t k = 0; k < d; ++k) a += w[k] * x[i * d + k] + w[d + k] * x[j * d + k];
        score[e] = 1.0 / (1.0 + std::exp(-a));
        candidates.push_back(e);
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](std::size_t l, std::size_t r) { return score[l] > score[r]; });

    std::vector<std::size_t> partner(n, n);
    std::vector<std::size_t> via(n, edges.size());
    for (auto e : candidates) {
        const auto [i, j] = edges[e];
        if (partner[i] != n || partner[j] != n) continue;
        partner[i] = j;
        partner[j] = i;
        via[i] = via[j] = e;
    }

    // Clusters in order of their smallest member.
    struct Cluster {
        std::size_t a, b;  // b == a for a singleton
        std::size_t edge;
    };
    std::vector<Cluster> clusters;
    std::vector<std::size_t> mapping(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (partner[i] == n) {
            mapping[i] = clusters.size();
            clusters.push_back({i, i, edges.size()});
        } else if (partner[i] > i) {
            mapping[i] = mapping[partner[i]] = clusters.size();
            clusters.push_back({i, partner[i], via[i]});
        }
    }

    const auto m = clusters.size();
    std::vector<double> y(m * d);
    for (std::size_t c = 0; c < m; ++c) {
        const auto& cl = clusters[c];
        if (cl.a == cl.b) {
            std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(cl.a * d), d, y.begin() + static_cast<std::ptrdiff_t>(c * d));
        } else {
            const double s = score[cl.edge];
            for (std::size_t k = 0; k < d; ++k) y[c * d + k] = s * (x[cl.a * d + k] + x[cl.b * d + k]);
        }
    }

    std::vector<Edge> new_edges;
    for (const auto& [i, j] : edges) {
        const auto a = mapping[i], bb = mapping[j];
        if (a != bb) new_edges.emplace_back(a, bb);
    }
    std::sort(new_edges.begin(), new_edges.end());
    new_edges.erase(std::unique(new_edges.begin(), new_edges.end()), new_edges.end());

    // Edge endpoints as stored in the scoring order: [x_i ; x_j].
    std::vector<Edge> saved_edges(edges.begin(), edges.end());
    auto backward = [clusters = std::move(clusters), score = std::move(score),
                     saved_edges = std::move(saved_edges), d](detail::Node& self) {
        auto& px = *self.parents[0];
        auto& pw = *self.parents[1];
        auto& pb = *self.parents[2];
        double* gx = px.requires_grad ? px.ensure_grad().data() : nullptr;
        double* gw = pw.requires_grad ? pw.ensure_grad().data() : nullptr;
        double* gb = pb.requires_grad ? pb.ensure_grad().data() : nullptr;
        const double* xd = px.data.data();
        const double* wd = pw.data.data();
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            const auto& cl = clusters[c];
            const double* gy = self.grad.data() + c * d;
            if (cl.a == cl.b) {
                if (gx) {
                    for (std::size_t k = 0; k < d; ++k) gx[cl.a * d + k] += gy[k];
                }
                continue;
            }
            const auto [i, j] = saved_edges[cl.edge];
            const double s = score[cl.edge];
            double ds = 0.0;
            for (std::size_t k = 0; k < d; ++k) ds += gy[k] * (xd[i * d + k] + xd[j * d + k]);
            const double da = ds * s * (1.0 - s);
            if (gx) {
                for (std::size_t k = 0; k < d; ++k) {
                    gx[i * d + k] += s * gy[k] + da * wd[k];
                    gx[j * d + k] += s * gy[k] + da * wd[d + k];
                }
            }
            if (gw) {
                for (std::size_t k = 0; k < d; ++k) {
                    gw[k] += da * xd[i * d + k];
                    gw[d + k] += da * xd[j * d + k];
                }
            }
            if (gb) gb[0] += da;
        }
    };
    PoolResult out;
    out.x = Tensor::make_result({m, d}, std::move(y), {X, p.w, p.b}, std::move(backward));
    out.edges = std::move(new_edges);
    out.mapping = std::move(mapping);
    return out;
}

Tensor segment_max_pool(const Tensor& X, std::span<const std::size_t> segment, std::size_t count) {
    if (X.dim() != 2) throw ShapeMismatch("max pool input must be N x D");
    const auto n = X.size(0), d = X.size(1);
    if (segment.size() != n) throw ShapeMismatch("max pool: one segment id per row");
    const auto x = X.data();
    std::vector<double> y(count * d, 0.0);
    std::vector<std::size_t> arg(count * d, n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto s = segment[r];
        if (s >= count) throw ShapeMismatch("max pool: segment id out of range");
        for (std::size_t k = 0; k < d; ++k) {
            auto& a = arg[s * d + k];
            if (a == n || x[r * d + k] > y[s * d + k]) {
                a = r;
                y[s * d + k] = x[r * d + k];
            }
        }
    }
    return Tensor::make_result({count, d}, std::move(y), {X}, [arg = std::move(arg), n, d](detail::Node& self) {
        auto& p = *self.parents[0];
        if (!p.requires_grad) return;
        auto& g = p.ensure_grad();
        for (std::size_t i = 0; i < arg.size(); ++i) {
            if (arg[i] != n) g[arg[i] * d + i % d] += self.grad[i];
        }
    });
}

Tensor global_max_pool(const Tensor& X) {
    if (X.dim() != 2) throw ShapeMismatch("max pool input must be N x D");
    if (X.size(0) == 0) throw EmptyGraph("global_max_pool on an empty graph");
    const std::vector<std::size_t> seg(X.size(0), 0);
    return reshape(segment_max_pool(X, seg, 1), {X.size(1)});
}

}  // namespace phpvd::tensor
