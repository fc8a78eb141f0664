// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "phpvd/common/granularity.hpp"
#include "phpvd/corpus/label.hpp"
#include "phpvd/corpus/sample.hpp"

namespace phpvd::corpus {

struct DatasetStats {
    std::array<std::size_t, kNumLabels> function{};
    std::array<std::size_t, kNumLabels> file{};

    const std::array<std::size_t, kNumLabels>& of(Granularity g) const {
        return g == Granularity::Function ? function : file;
    }
    std::size_t count(Granularity g, Label l) const { return of(g)[index_of(l)]; }
    std::size_t total() const;

    bool operator==(const DatasetStats&) const = default;
};

DatasetStats dataset_stats(const std::vector<Sample>& samples);

/// Label counts of a "path,label" manifest, reported as file granularity.
DatasetStats manifest_stats(const std::map<std::string, Label>& manifest);

/// "granularity,Safe,XSS,SQLi,OSCI,Total" plus one row per granularity.
std::string render_stats(const DatasetStats& stats);

}  // namespace phpvd::corpus
