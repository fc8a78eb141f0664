// SPDX-License-Identifier: Apache-2.0
#include "phpvd/corpus/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "phpvd/common/error.hpp"
#include "phpvd/common/rng.hpp"

namespace phpvd::corpus {

void SplitSpec::validate() const {
    double total = 0.0;
    for (double f : fractions) {
        if (!(f > 0.0)) throw FormatError("split fractions must be positive");
        total += f;
    }
    if (std::abs(total - 1.0) > 1e-9) throw FormatError("split fractions must sum to 1");
}

std::array<std::size_t, 3> stratum_sizes(std::size_t n, const std::array<double, 3>& fractions) {
    std::array<std::size_t, 3> sizes{};
    std::array<double, 3> frac{};
    std::size_t used = 0;
    for (std::size_t k = 0; k < 3; ++k) {
        // The epsilon absorbs representation error in e.g. 100 * 0.1.
        const double ideal = static_cast<double>(n) * fractions[k] + 1e-9;
        sizes[k] = static_cast<std::size_t>(std::floor(ideal));
        frac[k] = ideal - std::floor(ideal);
        used += sizes[k];
    }
    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b] + 1e-12; });
    for (std::size_t i = 0; used < n; ++i, ++used) ++sizes[order[i % 3]];
    return sizes;
}

Split split(const std::vector<Sample>& samples, const SplitSpec& spec) {
    spec.validate();
    std::array<std::vector<const Sample*>, kNumLabels> by_class;
    for (const auto& s : samples) by_class[index_of(s.label)].push_back(&s);
    for (std::size_t c = 0; c < kNumLabels; ++c) {
        if (!by_class[c].empty() && by_class[c].size() < 3) {
            throw ClassTooSmall("class " + std::string(to_string(label_from_index(c))) + " has only " +
                                std::to_string(by_class[c].size()) + " samples; need at least 3");
        }
    }
    Rng rng(spec.seed);
    Split out;
    for (auto& group : by_class) {
        rng.shuffle(group);
        const auto sizes = stratum_sizes(group.size(), spec.fractions);
        std::size_t at = 0;
        for (std::size_t k = 0; k < 3; ++k) {
            auto& dst = k == 0 ? out.train : k == 1 ? out.val : out.test;
            for (std::size_t i = 0; i < sizes[k]; ++i) dst.push_back(*group[at++]);
        }
    }
    return out;
}

}  // namespace phpvd::corpus
