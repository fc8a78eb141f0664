// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "phpvd/tensor/tensor.hpp"

namespace phpvd::tensor {

struct AdamConfig {
    double lr = 1e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t t = 0;
};

/// One Adam update with bias correction. State starts zeroed (sized on first
/// use). Empty `grads` counts as a zero gradient.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamConfig& cfg);

/// Adam over a fixed list of leaf tensors.
class Adam {
public:
    Adam(std::vector<Tensor> params, AdamConfig cfg);

    /// Applies the accumulated grads (missing grads count as zero).
    void step();
    void zero_grad();

    double lr() const noexcept { return cfg_.lr; }
    void set_lr(double lr) noexcept { cfg_.lr = lr; }
    const std::vector<AdamState>& states() const noexcept { return states_; }

private:
    std::vector<Tensor> params_;
    std::vector<AdamState> states_;
    AdamConfig cfg_;
};

struct PlateauConfig {
    double factor = 0.1;
    std::size_t patience = 10;
    double threshold = 1e-4;  // absolute improvement required
    double min_lr = 1e-8;
};

/// Reduce-on-plateau for a minimized metric. An epoch improves when its loss
/// is below best - threshold. After `patience` consecutive non-improving
/// epochs the lr is multiplied by `factor` (floored at min_lr) and the count
/// restarts.
class PlateauScheduler {
public:
    explicit PlateauScheduler(PlateauConfig cfg = {}) : cfg_(cfg) {}

    /// Feeds one validation loss; returns the lr to use next.
    double step(double loss, double lr);

    std::size_t bad_epochs() const noexcept { return bad_; }
    double best() const noexcept { return best_; }

private:
    PlateauConfig cfg_;
    bool has_best_ = false;
    double best_ = 0.0;
    std::size_t bad_ = 0;
};

}  // namespace phpvd::tensor
