// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <vector>

#include "phpvd/corpus/sample.hpp"
#include "support/git_fixture.hpp"

namespace testing_support {

/// Drops the "repo@sha:" prefix of each origin so results can be compared
/// with the fixture's expectations.
inline std::vector<ExpectedSample> comparable(const std::vector<phpvd::corpus::Sample>& samples) {
    std::vector<ExpectedSample> out;
    for (const auto& s : samples) {
        const auto& o = s.provenance.origin;
        const auto at = o.find('@');
        const auto colon = o.find(':', at == std::string::npos ? 0 : at);
        out.push_back({s.label, colon == std::string::npos ? o : o.substr(colon + 1), s.code});
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace testing_support
