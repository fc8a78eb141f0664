// SPDX-License-Identifier: Apache-2.0
#include "phpvd/corpus/label.hpp"

#include "phpvd/common/error.hpp"
#include "phpvd/php/token.hpp"

namespace phpvd {

std::string_view to_string(Label l) noexcept {
    switch (l) {
        case Label::Safe: return "Safe";
        case Label::XSS: return "XSS";
        case Label::SQLi: return "SQLi";
        case Label::OSCI: return "OSCI";
    }
    return "Safe";
}

Label parse_label(std::string_view text) {
    const auto lower = php::to_lower(text);
    if (lower == "safe") return Label::Safe;
    if (lower == "xss") return Label::XSS;
    if (lower == "sqli") return Label::SQLi;
    if (lower == "osci") return Label::OSCI;
    throw FormatError("unknown label '" + std::string(text) + "'");
}

Label label_from_index(std::size_t i) {
    if (i >= kNumLabels) throw FormatError("label index " + std::to_string(i) + " out of range");
    return static_cast<Label>(i);
}

}  // namespace phpvd
