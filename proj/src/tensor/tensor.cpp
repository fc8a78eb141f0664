// SPDX-License-Identifier: Apache-2.0
#include "phpvd/tensor/tensor.hpp"

#include <unordered_set>

#include "phpvd/common/error.hpp"

namespace phpvd::tensor {

namespace {
thread_local bool g_grad_enabled = true;
}

bool grad_enabled() noexcept { return g_grad_enabled; }

NoGrad::NoGrad() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGrad::~NoGrad() { g_grad_enabled = previous_; }

std::size_t numel(const Shape& shape) noexcept {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

std::string shape_string(const Shape& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

Tensor::Tensor(Shape shape, std::vector<double> data, bool requires_grad) {
    if (tensor::numel(shape) != data.size()) {
        throw ShapeMismatch("tensor data length " + std::to_string(data.size()) +
                            " does not match shape " + shape_string(shape));
    }
    node_ = std::make_shared<detail::Node>();
    node_->shape = std::move(shape);
    node_->data = std::move(data);
    node_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
    const auto n = tensor::numel(shape);
    return Tensor(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::scalar(double v) { return Tensor({}, {v}); }

Tensor Tensor::vector(std::vector<double> data, bool requires_grad) {
    const auto n = data.size();
    return Tensor({n}, std::move(data), requires_grad);
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> data,
                      bool requires_grad) {
    return Tensor({rows, cols}, std::move(data), requires_grad);
}

std::size_t Tensor::rows() const {
    const auto& s = shape();
    if (s.size() == 2) return s[0];
    if (s.size() <= 1) return 1;
    throw ShapeMismatch("rows() on tensor of shape " + shape_string(s));
}

std::size_t Tensor::cols() const {
    const auto& s = shape();
    if (s.size() == 2) return s[1];
    if (s.size() == 1) return s[0];
    if (s.empty()) return 1;
    throw ShapeMismatch("cols() on tensor of shape " + shape_string(s));
}

double Tensor::item() const {
    if (numel() != 1) throw ShapeMismatch("item() on tensor of shape " + shape_string(shape()));
    return node_->data[0];
}

std::span<const double> Tensor::grad() const { return node_->ensure_grad(); }

void Tensor::backward() {
    if (numel() != 1) throw ShapeMismatch("backward() without seed needs a scalar");
    const double one = 1.0;
    backward(std::span(&one, 1));
}

void Tensor::backward(std::span<const double> seed) {
    if (seed.size() != numel()) throw ShapeMismatch("backward seed size mismatch");
    // Iterative post-order DFS for a topological order.
    std::vector<detail::Node*> order;
    std::unordered_set<detail::Node*> seen;
    std::vector<std::pair<detail::Node*, std::size_t>> stack{{node_.get(), 0}};
    seen.insert(node_.get());
    while (!stack.empty()) {
        auto& [n, next] = stack.back();
        if (next < n->parents.size()) {
            auto* p = n->parents[next++].get();
            if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
        } else {
            order.push_back(n);
            stack.pop_back();
        }
    }
    auto& g = node_->ensure_grad();
    for (std::size_t i = 0; i < seed.size(); ++i) g[i] += seed[i];
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        auto* n = *it;
        if (n->backward && !n->grad.empty()) n->backward(*n);
    }
}

Tensor Tensor::detach() const {
    auto n = std::make_shared<detail::Node>();
    n->shape = node_->shape;
    n->data = node_->data;
    return Tensor(std::move(n));
}

Tensor Tensor::clone() const {
    Tensor t = detach();
    t.node_->requires_grad = node_->requires_grad;
    return t;
}

Tensor Tensor::make_result(Shape shape, std::vector<double> data,
                           const std::vector<Tensor>& parents,
                           std::function<void(detail::Node&)> backward) {
    Tensor out(std::move(shape), std::move(data));
    if (!g_grad_enabled) return out;
    bool any = false;
    for (const auto& p : parents) any = any || p.requires_grad();
    if (!any) return out;
    out.node_->requires_grad = true;
    for (const auto& p : parents) out.node_->parents.push_back(p.node_);
    out.node_->backward = std::move(backward);
    return out;
}

Tensor Tensor::make_result(Shape shape, std::vector<double> data,
                           std::initializer_list<Tensor> parents,
                           std::function<void(detail::Node&)> backward) {
    return make_result(std::move(shape), std::move(data), std::vector<Tensor>(parents),
                       std::move(backward));
}

}  // namespace phpvd::tensor
