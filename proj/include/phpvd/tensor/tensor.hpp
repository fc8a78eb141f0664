// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace phpvd::tensor {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape) noexcept;
std::string shape_string(const Shape& shape);

namespace detail {

struct Node {
    Shape shape;
    std::vector<double> data;
    std::vector<double> grad;  // empty until first accumulation
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    // Reads this->grad, accumulates into parents' grads.
    std::function<void(Node&)> backward;

    std::vector<double>& ensure_grad() {
        if (grad.empty()) grad.assign(data.size(), 0.0);
        return grad;
    }
};

}  // namespace detail

/// Dense row-major float64 tensor with an optional reverse-mode tape.
/// Copies share storage; use clone() for a deep copy.
class Tensor {
public:
    Tensor() = default;
    Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor scalar(double v);
    static Tensor vector(std::vector<double> data, bool requires_grad = false);
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> data,
                         bool requires_grad = false);

    bool defined() const noexcept { return node_ != nullptr; }
    const Shape& shape() const { return node_->shape; }
    std::size_t dim() const { return node_->shape.size(); }
    std::size_t size(std::size_t axis) const { return node_->shape.at(axis); }
    std::size_t numel() const { return node_->data.size(); }
    /// Rows/cols of a 2-D view; a 1-D tensor of n is 1 x n.
    std::size_t rows() const;
    std::size_t cols() const;

    std::span<double> data() { return node_->data; }
    std::span<const double> data() const { return node_->data; }
    double item() const;
    double at(std::size_t i) const { return node_->data.at(i); }
    double at(std::size_t r, std::size_t c) const { return node_->data.at(r * cols() + c); }

    bool requires_grad() const { return node_->requires_grad; }
    void set_requires_grad(bool on) { node_->requires_grad = on; }
    bool has_grad() const { return !node_->grad.empty(); }
    /// Gradient buffer (zeros when nothing was accumulated).
    std::span<const double> grad() const;
    std::span<double> mutable_grad() { return node_->ensure_grad(); }
    void zero_grad() { node_->grad.clear(); }

    /// Reverse pass from a scalar (seed 1) or with an explicit seed gradient.
    void backward();
    void backward(std::span<const double> seed);

    /// Same data, no history.
    Tensor detach() const;
    Tensor clone() const;

    detail::Node* node() const noexcept { return node_.get(); }
    const std::shared_ptr<detail::Node>& node_ptr() const noexcept { return node_; }

    /// Builds an op result. Records the tape only when grad mode is on and a
    /// parent requires grad.
    static Tensor make_result(Shape shape, std::vector<double> data,
                              std::initializer_list<Tensor> parents,
                              std::function<void(detail::Node&)> backward);
    static Tensor make_result(Shape shape, std::vector<double> data,
                              const std::vector<Tensor>& parents,
                              std::function<void(detail::Node&)> backward);

private:
    explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
    std::shared_ptr<detail::Node> node_;
};

/// Grad mode is per thread; NoGrad disables recording in its scope.
bool grad_enabled() noexcept;

class NoGrad {
public:
    NoGrad();
    ~NoGrad();
    NoGrad(const NoGrad&) = delete;
    NoGrad& operator=(const NoGrad&) = delete;

private:
    bool previous_;
};

}  // namespace phpvd::tensor
