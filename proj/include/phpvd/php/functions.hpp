// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "phpvd/php/lexer.hpp"
#include "phpvd/php/parser.hpp"

namespace phpvd::php {

/// A named function or method with a body. Lines are 1-based and inclusive;
/// `body` is the exact source slice from the first keyword (or modifier) to
/// the closing brace.
struct FunctionSpan {
    std::string name;
    std::size_t start_line = 0;
    std::size_t end_line = 0;
    std::string body;

    bool operator==(const FunctionSpan&) const = default;
};

/// Every named function and method with a body, in source order. Top-level
/// code, closures and abstract methods are not returned. Nested declarations
/// yield nested spans.
std::vector<FunctionSpan> extract_functions(std::string_view source, LexMode mode);

inline std::vector<FunctionSpan> extract_functions(std::string_view source) {
    return extract_functions(source, detect_mode(source));
}

/// Same, over an already-parsed unit whose tokens came from `source`.
std::vector<FunctionSpan> extract_functions(const ParsedUnit& unit, std::string_view source);

}  // namespace phpvd::php
