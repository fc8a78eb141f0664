// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace phpvd::php {

enum class TokenKind {
    Keyword,
    Identifier,
    Variable,
    ConstantLiteral,
    Operator,
    Punctuation,
    Comment,
    Whitespace,
    PhpTag,
    InlineHtml,
};

std::string_view to_string(TokenKind kind) noexcept;

/// One lexeme of the input. `line`/`col` are 1-based, `offset` is the byte
/// offset of the first character.
struct RawToken {
    TokenKind kind = TokenKind::Whitespace;
    std::string text;
    std::size_t line = 1;
    std::size_t col = 1;
    std::size_t offset = 0;

    /// Line of the last character of the token.
    std::size_t end_line() const noexcept;

    bool is(TokenKind k, std::string_view t) const noexcept { return kind == k && text == t; }
    bool is_punct(std::string_view t) const noexcept { return is(TokenKind::Punctuation, t); }
    bool is_op(std::string_view t) const noexcept { return is(TokenKind::Operator, t); }
    /// Case-insensitive keyword test; `kw` must be lowercase.
    bool is_keyword(std::string_view kw) const noexcept;
    /// Whitespace, comments and PHP tags: everything normalization drops.
    bool is_trivia() const noexcept {
        return kind == TokenKind::Whitespace || kind == TokenKind::Comment || kind == TokenKind::PhpTag;
    }
};

std::string to_lower(std::string_view s);

}  // namespace phpvd::php
