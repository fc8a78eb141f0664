// SPDX-License-Identifier: Apache-2.0
#include "phpvd/tensor/optim.hpp"

#include <algorithm>
#include <cmath>

#include "phpvd/common/error.hpp"

namespace phpvd::tensor {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamConfig& cfg) {
    if (!grads.empty() && grads.size() != params.size()) throw ShapeMismatch("adam: grad size");
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    ++state.t;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads.empty() ? 0.0 : grads[i];
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
}

Adam::Adam(std::vector<Tensor> params, AdamConfig cfg)
    : params_(std::move(params)), states_(params_.size()), cfg_(cfg) {}

void Adam::step() {
    for (std::size_t i = 0; i < params_.size(); ++i) {
        auto& p = params_[i];
        if (p.has_grad()) {
            adam_step(p.data(), p.grad(), states_[i], cfg_);
        } else {
            adam_step(p.data(), {}, states_[i], cfg_);
        }
    }
}

void Adam::zero_grad() {
    for (auto& p : params_) p.zero_grad();
}

double PlateauScheduler::step(double loss, double lr) {
    if (!has_best_ || loss < best_ - cfg_.threshold) {
        has_best_ = true;
        best_ = loss;
        bad_ = 0;
        return lr;
    }
    if (++bad_ >= cfg_.patience) {
        bad_ = 0;
        return std::max(lr * cfg_.factor, cfg_.min_lr);
    }
    return lr;
}

}  // namespace phpvd::tensor
