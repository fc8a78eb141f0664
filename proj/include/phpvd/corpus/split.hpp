// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "phpvd/corpus/sample.hpp"

namespace phpvd::corpus {

struct SplitSpec {
    std::array<double, 3> fractions{0.8, 0.1, 0.1};  // train, val, test
    std::uint64_t seed = 0;

    /// Throws FormatError unless every fraction is > 0 and they sum to 1.
    void validate() const;
};

struct Split {
    std::vector<Sample> train, val, test;
};

/// Per-class sizes for n samples: floor(n * f) each, then the remainder goes
/// to the parts with the largest fractional parts (ties: train, val, test).
std::array<std::size_t, 3> stratum_sizes(std::size_t n, const std::array<double, 3>& fractions);

/// Stratified split. Each class is shuffled with the seeded generator (classes
/// in label order) and cut by stratum_sizes. Throws ClassTooSmall when a
/// class present in the input has fewer than 3 samples.
Split split(const std::vector<Sample>& samples, const SplitSpec& spec);

}  // namespace phpvd::corpus
