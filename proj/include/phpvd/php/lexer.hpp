// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>
#include <vector>

#include "phpvd/php/token.hpp"

namespace phpvd::php {

/// Where lexing starts. Files start in HTML mode and switch on `<?php`;
/// extracted function bodies have no open tag and start in PHP mode.
enum class LexMode { Html, Php };

/// Splits PHP source into tokens. Concatenating the texts of the result
/// reproduces `source` exactly.
///
/// Throws LexError on an unterminated string/comment/heredoc or on a byte
/// that cannot start any token inside a PHP region.
std::vector<RawToken> lex(std::string_view source, LexMode mode = LexMode::Html);

/// Picks Html mode when the text (after leading whitespace) opens with `<?`,
/// Php mode otherwise.
LexMode detect_mode(std::string_view source) noexcept;

/// True for reserved words and language constructs (`echo`, `if`, `array`,
/// `true`, ...). Expects a lowercase name.
bool is_php_keyword(std::string_view lowercase_name) noexcept;

}  // namespace phpvd::php
