// SPDX-License-Identifier: Apache-2.0
#include "phpvd/common/granularity.hpp"

#include "phpvd/common/error.hpp"
#include "phpvd/php/token.hpp"

namespace phpvd {

std::string_view to_string(Granularity g) noexcept {
    return g == Granularity::Function ? "function" : "file";
}

Granularity parse_granularity(std::string_view s) {
    const auto lower = php::to_lower(s);
    if (lower == "function" || lower == "func") return Granularity::Function;
    if (lower == "file") return Granularity::File;
    throw FormatError("unknown granularity '" + std::string(s) + "'");
}

}  // namespace phpvd
