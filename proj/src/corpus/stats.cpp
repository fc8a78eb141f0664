// SPDX-License-Identifier: Apache-2.0
#include "phpvd/corpus/stats.hpp"

#include <numeric>

namespace phpvd::corpus {

std::size_t DatasetStats::total() const {
    return std::accumulate(function.begin(), function.end(), std::size_t{0}) +
           std::accumulate(file.begin(), file.end(), std::size_t{0});
}

DatasetStats dataset_stats(const std::vector<Sample>& samples) {
    DatasetStats st;
    for (const auto& s : samples) {
        auto& row = s.granularity == Granularity::Function ? st.function : st.file;
        ++row[index_of(s.label)];
    }
    return st;
}

DatasetStats manifest_stats(const std::map<std::string, Label>& manifest) {
    DatasetStats st;
    for (const auto& [path, label] : manifest) ++st.file[index_of(label)];
    return st;
}

std::string render_stats(const DatasetStats& stats) {
    std::string out = "granularity,Safe,XSS,SQLi,OSCI,Total\n";
    for (auto g : {Granularity::Function, Granularity::File}) {
        const auto& row = stats.of(g);
        out += std::string(to_string(g));
        std::size_t total = 0;
        for (auto v : row) {
            out += "," + std::to_string(v);
            total += v;
        }
        out += "," + std::to_string(total) + "\n";
    }
    return out;
}

}  // namespace phpvd::corpus
