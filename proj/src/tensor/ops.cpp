// SPDX-License-Identifier: Apache-2.0
#include "phpvd/tensor/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "phpvd/common/error.hpp"

namespace phpvd::tensor {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using CMapMat = Eigen::Map<const RowMat>;

MapMat view(std::vector<double>& d, std::size_t r, std::size_t c) {
    return MapMat(d.data(), static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
}

std::vector<double>* grad_of(detail::Node& n) {
    return n.requires_grad ? &n.ensure_grad() : nullptr;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ShapeMismatch(what);
}

template <typename F, typename D>
Tensor unary(const Tensor& x, F f, D dfdy) {
    std::vector<double> y(x.numel());
    const auto xd = x.data();
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = f(xd[i]);
    auto saved = y;
    return Tensor::make_result(x.shape(), std::move(y), {x}, [saved, dfdy](detail::Node& self) {
        auto* gx = grad_of(*self.parents[0]);
        if (!gx) return;
        for (std::size_t i = 0; i < saved.size(); ++i) (*gx)[i] += self.grad[i] * dfdy(saved[i]);
    });
}

}  // namespace

Tensor embedding(const Tensor& table, std::span<const std::uint32_t> ids) {
    require(table.dim() == 2, "embedding table must be 2-D");
    const auto V = table.size(0);
    const auto E = table.size(1);
    std::vector<double> out(ids.size() * E);
    const auto t = table.data();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] >= V) {
            throw IdOutOfRange("token id " + std::to_string(ids[i]) + " >= vocabulary size " +
                               std::to_string(V));
        }
        std::copy_n(t.begin() + static_cast<std::ptrdiff_t>(ids[i] * E), E,
                    out.begin() + static_cast<std::ptrdiff_t>(i * E));
    }
    std::vector<std::uint32_t> saved(ids.begin(), ids.end());
    return Tensor::make_result({ids.size(), E}, std::move(out), {table},
                               [saved = std::move(saved), E](detail::Node& self) {
                                   auto* g = grad_of(*self.parents[0]);
                                   if (!g) return;
                                   for (std::size_t i = 0; i < saved.size(); ++i) {
                                       for (std::size_t k = 0; k < E; ++k) {
                                           (*g)[saved[i] * E + k] += self.grad[i * E + k];
                                       }
                                   }
                               });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    require(a.dim() == 2 && b.dim() == 2 && a.size(1) == b.size(0),
            "matmul " + shape_string(a.shape()) + " x " + shape_string(b.shape()));
    const auto n = a.size(0), k = a.size(1), m = b.size(1);
    std::vector<double> out(n * m);
    view(out, n, m).noalias() = CMapMat(a.data().data(), n, k) * CMapMat(b.data().data(), k, m);
    return Tensor::make_result({n, m}, std::move(out), {a, b}, [n, k, m](detail::Node& self) {
        auto& pa = *self.parents[0];
        auto& pb = *self.parents[1];
        const auto gy = view(self.grad, n, m);
        if (auto* ga = grad_of(pa)) view(*ga, n, k).noalias() += gy * view(pb.data, k, m).transpose();
        if (auto* gb = grad_of(pb)) view(*gb, k, m).noalias() += view(pa.data, n, k).transpose() * gy;
    });
}

Tensor linear(const Tensor& x, const Tensor& W, const Tensor& b) {
    require(W.dim() == 2, "linear weight must be 2-D");
    const auto out_dim = W.size(0), in_dim = W.size(1);
    require(x.dim() <= 2 && x.cols() == in_dim,
            "linear input " + shape_string(x.shape()) + " vs weight " + shape_string(W.shape()));
    require(b.numel() == out_dim, "linear bias length");
    const auto n = x.rows();
    std::vector<double> out(n * out_dim);
    auto y = view(out, n, out_dim);
    y.noalias() = CMapMat(x.data().data(), n, in_dim) * CMapMat(W.data().data(), out_dim, in_dim).transpose();
    y.rowwise() += CMapMat(b.data().data(), 1, out_dim).row(0);
    Shape shape = x.dim() == 2 ? Shape{n, out_dim} : Shape{out_dim};
    return Tensor::make_result(std::move(shape), std::move(out), {x, W, b},
                               [n, in_dim, out_dim](detail::Node& self) {
                                   auto& px = *self.parents[0];
                                   auto& pw = *self.parents[1];
                                   auto& pb = *self.parents[2];
                                   const auto gy = view(self.grad, n, out_dim);
                                   if (auto* gx = grad_of(px)) {
                                       view(*gx, n, in_dim).noalias() += gy * view(pw.data, out_dim, in_dim);
                                   }
                                   if (auto* gw = grad_of(pw)) {
                                       view(*gw, out_dim, in_dim).noalias() += gy.transpose() * view(px.data, n, in_dim);
                                   }
                                   if (auto* gb = grad_of(pb)) {
                                       view(*gb, 1, out_dim) += gy.colwise().sum();
                                   }
                               });
}

Tensor relu(const Tensor& x) {
    std::vector<double> y(x.numel());
    std::vector<char> mask(x.numel());
    const auto xd = x.data();
    for (std::size_t i = 0; i < y.size(); ++i) {
        mask[i] = xd[i] > 0.0;
        y[i] = mask[i] ? xd[i] : 0.0;
    }
    return Tensor::make_result(x.shape(), std::move(y), {x}, [mask = std::move(mask)](detail::Node& self) {
        auto* gx = grad_of(*self.parents[0]);
        if (!gx) return;
        for (std::size_t i = 0; i < mask.size(); ++i) {
            if (mask[i]) (*gx)[i] += self.grad[i];
        }
    });
}

Tensor sigmoid(const Tensor& x) {
    return unary(
        x, [](double v) { return 1.0 / (1.0 + std::exp(-v)); },
        [](double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& x) {
    return unary(
        x, [](double v) { return std::tanh(v); }, [](double y) { return 1.0 - y * y; });
}

Tensor dropout(const Tensor& x, double p, bool training, Rng& rng) {
    if (p < 0.0 || p >= 1.0) throw ShapeMismatch("dropout probability must be in [0, 1)");
    if (!training || p == 0.0) return x;
    const double scale = 1.0 / (1.0 - p);
    std::vector<double> keep(x.numel());
    for (auto& k : keep) k = rng.bernoulli(p) ? 0.0 : scale;
    std::vector<double> y(x.numel());
    const auto xd = x.data();
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = xd[i] * keep[i];
    return Tensor::make_result(x.shape(), std::move(y), {x}, [keep = std::move(keep)](detail::Node& self) {
        auto* gx = grad_of(*self.parents[0]);
        if (!gx) return;
        for (std::size_t i = 0; i < keep.size(); ++i) (*gx)[i] += self.grad[i] * keep[i];
    });
}

Tensor softmax(const Tensor& x) {
    const auto n = x.rows(), c = x.cols();
    std::vector<double> y(x.numel());
    const auto xd = x.data();
    for (std::size_t r = 0; r < n; ++r) {
        double mx = xd[r * c];
        for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, xd[r * c + j]);
        double z = 0.0;
        for (std::size_t j = 0; j < c; ++j) z += (y[r * c + j] = std::exp(xd[r * c + j] - mx));
        for (std::size_t j = 0; j < c; ++j) y[r * c + j] /= z;
    }
    auto saved = y;
    return Tensor::make_result(x.shape(), std::move(y), {x}, [saved, n, c](detail::Node& self) {
        auto* gx = grad_of(*self.parents[0]);
        if (!gx) return;
        for (std::size_t r = 0; r < n; ++r) {
            double dot = 0.0;
            for (std::size_t j = 0; j < c; ++j) dot += self.grad[r * c + j] * saved[r * c + j];
            for (std::size_t j = 0; j < c; ++j) {
                (*gx)[r * c + j] += saved[r * c + j] * (self.grad[r * c + j] - dot);
            }
        }
    });
}

Tensor cross_entropy(const Tensor& logits, std::span<const std::size_t> labels,
                     std::span<const double> class_weights) {
    const auto n = logits.rows(), c = logits.cols();
    require(labels.size() == n, "cross_entropy: one label per row");
    require(class_weights.empty() || class_weights.size() == c, "cross_entropy: one weight per class");
    const auto xd = logits.data();
    std::vector<double> probs(n * c);
    std::vector<double> w(n, 1.0);
    double loss = 0.0, wsum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        if (labels[r] >= c) throw ShapeMismatch("cross_entropy: label out of range");
        double mx = xd[r * c];
        for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, xd[r * c + j]);
        double z = 0.0;
        for (std::size_t j = 0; j < c; ++j) z += (probs[r * c + j] = std::exp(xd[r * c + j] - mx));
        for (std::size_t j = 0; j < c; ++j) probs[r * c + j] /= z;
        if (!class_weights.empty()) w[r] = class_weights[labels[r]];
        const double lse = mx + std::log(z);
        loss += w[r] * (lse - xd[r * c + labels[r]]);
        wsum += w[r];
    }
    loss /= wsum;
    std::vector<std::size_t> saved_labels(labels.begin(), labels.end());
    return Tensor::make_result(
        {}, {loss}, {logits},
        [probs = std::move(probs), w = std::move(w), saved_labels = std::move(saved_labels), wsum, n,
         c](detail::Node& self) {
            auto* gx = grad_of(*self.parents[0]);
            if (!gx) return;
            const double g = self.grad[0] / wsum;
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t j = 0; j < c; ++j) {
                    const double onehot = j == saved_labels[r] ? 1.0 : 0.0;
                    (*gx)[r * c + j] += g * w[r] * (probs[r * c + j] - onehot);
                }
            }
        });
}

Tensor add(const Tensor& a, const Tensor& b) {
    require(a.numel() == b.numel(), "add: size mismatch");
    std::vector<double> y(a.numel());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = a.data()[i] + b.data()[i];
    return Tensor::make_result(a.shape(), std::move(y), {a, b}, [](detail::Node& self) {
        for (auto& p : self.parents) {
            if (auto* g = grad_of(*p)) {
                for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += self.grad[i];
            }
        }
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require(a.numel() == b.numel(), "mul: size mismatch");
    std::vector<double> y(a.numel());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = a.data()[i] * b.data()[i];
    return Tensor::make_result(a.shape(), std::move(y), {a, b}, [](detail::Node& self) {
        auto& pa = *self.parents[0];
        auto& pb = *self.parents[1];
        if (auto* g = grad_of(pa)) {
            for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += self.grad[i] * pb.data[i];
        }
        if (auto* g = grad_of(pb)) {
            for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += self.grad[i] * pa.data[i];
        }
    });
}

Tensor sum(const Tensor& x) {
    double s = 0.0;
    for (double v : x.data()) s += v;
    return Tensor::make_result({}, {s}, {x}, [](detail::Node& self) {
        auto* g = grad_of(*self.parents[0]);
        if (!g) return;
        for (auto& v : *g) v += self.grad[0];
    });
}

Tensor reshape(const Tensor& x, Shape shape) {
    require(numel(shape) == x.numel(), "reshape " + shape_string(x.shape()) + " -> " + shape_string(shape));
    std::vector<double> y(x.data().begin(), x.data().end());
    return Tensor::make_result(std::move(shape), std::move(y), {x}, [](detail::Node& self) {
        auto* g = grad_of(*self.parents[0]);
        if (!g) return;
        for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += self.grad[i];
    });
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
    const auto n = a.rows();
    require(b.rows() == n, "concat_cols: row mismatch");
    const auto p = a.cols(), q = b.cols();
    std::vector<double> y(n * (p + q));
    for (std::size_t r = 0; r < n; ++r) {
        std::copy_n(a.data().begin() + static_cast<std::ptrdiff_t>(r * p), p, y.begin() + static_cast<std::ptrdiff_t>(r * (p + q)));
        std::copy_n(b.data().begin() + static_cast<std::ptrdiff_t>(r * q), q,
                    y.begin() + static_cast<std::ptrdiff_t>(r * (p + q) + p));
    }
    Shape shape = (a.dim() == 1 && b.dim() == 1) ? Shape{p + q} : Shape{n, p + q};
    return Tensor::make_result(std::move(shape), std::move(y), {a, b}, [n, p, q](detail::Node& self) {
        if (auto* g = grad_of(*self.parents[0])) {
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t j = 0; j < p; ++j) (*g)[r * p + j] += self.grad[r * (p + q) + j];
        }
        if (auto* g = grad_of(*self.parents[1])) {
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t j = 0; j < q; ++j) (*g)[r * q + j] += self.grad[r * (p + q) + p + j];
        }
    });
}

Tensor slice_rows(const Tensor& x, std::size_t first, std::size_t count) {
    require(x.dim() == 2 && first + count <= x.size(0), "slice_rows out of range");
    const auto c = x.size(1);
    std::vector<double> y(x.data().begin() + static_cast<std::ptrdiff_t>(first * c),
                          x.data().begin() + static_cast<std::ptrdiff_t>((first + count) * c));
    return Tensor::make_result({count, c}, std::move(y), {x}, [first, c](detail::Node& self) {
        auto* g = grad_of(*self.parents[0]);
        if (!g) return;
        for (std::size_t i = 0; i < self.grad.size(); ++i) (*g)[first * c + i] += self.grad[i];
    });
}

Tensor stack_rows(const std::vector<Tensor>& rows) {
    require(!rows.empty(), "stack_rows: no rows");
    const auto c = rows.front().numel();
    std::vector<double> y;
    y.reserve(rows.size() * c);
    for (const auto& r : rows) {
        require(r.numel() == c, "stack_rows: ragged rows");
        y.insert(y.end(), r.data().begin(), r.data().end());
    }
    return Tensor::make_result({rows.size(), c}, std::move(y), rows, [c](detail::Node& self) {
        for (std::size_t i = 0; i < self.parents.size(); ++i) {
            auto* g = grad_of(*self.parents[i]);
            if (!g) continue;
            for (std::size_t j = 0; j < c; ++j) (*g)[j] += self.grad[i * c + j];
        }
    });
}

}  // namespace phpvd::tensor
