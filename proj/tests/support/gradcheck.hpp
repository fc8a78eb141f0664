// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "phpvd/common/rng.hpp"
#include "phpvd/tensor/ops.hpp"
#include "phpvd/tensor/tensor.hpp"

namespace gradcheck {

using phpvd::Rng;
using phpvd::tensor::Shape;
using phpvd::tensor::Tensor;

inline Tensor random_tensor(Rng& rng, Shape shape, double scale = 1.0) {
    std::vector<double> d(phpvd::tensor::numel(shape));
    for (auto& x : d) x = rng.uniform(-scale, scale);
    return Tensor(std::move(shape), std::move(d), true);
}

/// Worst norm-wise relative error between analytic and central-difference
/// gradients of sum(f(inputs) * R) over every input, R fixed and random.
inline double max_relative_error(const std::function<Tensor(const std::vector<Tensor>&)>& f,
                                 std::vector<Tensor> inputs, Rng& rng, double step = 1e-5) {
    const auto probe = f(inputs);
    std::vector<double> r(probe.numel());
    for (auto& x : r) x = rng.uniform(-1.0, 1.0);
    const auto weights = Tensor(probe.shape(), r);
    auto loss_of = [&] { return phpvd::tensor::sum(phpvd::tensor::mul(f(inputs), weights)); };

    for (auto& t : inputs) t.zero_grad();
    loss_of().backward();
    double worst = 0.0;
    for (auto& t : inputs) {
        if (!t.requires_grad()) continue;
        const std::vector<double> analytic(t.grad().begin(), t.grad().end());
        std::vector<double> numeric(t.numel());
        auto data = t.data();
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double keep = data[i];
            data[i] = keep + step;
            const double up = loss_of().item();
            data[i] = keep - step;
            const double down = loss_of().item();
            data[i] = keep;
            numeric[i] = (up - down) / (2.0 * step);
        }
        double diff = 0.0, na = 0.0, nn = 0.0;
        for (std::size_t i = 0; i < numeric.size(); ++i) {
            diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
            na += analytic[i] * analytic[i];
            nn += numeric[i] * numeric[i];
        }
        const double denom = std::max(std::sqrt(na) + std::sqrt(nn), 1e-10);
        worst = std::max(worst, std::sqrt(diff) / denom);
    }
    return worst;
}

}  // namespace gradcheck
