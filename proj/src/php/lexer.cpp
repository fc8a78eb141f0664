// SPDX-License-Identifier: Apache-2.0
#include "phpvd/php/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

#include "phpvd/common/error.hpp"

namespace phpvd::php {

std::string_view to_string(TokenKind kind) noexcept {
    switch (kind) {
        case TokenKind::Keyword: return "Keyword";
        case TokenKind::Identifier: return "Identifier";
        case TokenKind::Variable: return "Variable";
        case TokenKind::ConstantLiteral: return "ConstantLiteral";
        case TokenKind::Operator: return "Operator";
        case TokenKind::Punctuation: return "Punctuation";
        case TokenKind::Comment: return "Comment";
        case TokenKind::Whitespace: return "Whitespace";
        case TokenKind::PhpTag: return "PhpTag";
        case TokenKind::InlineHtml: return "InlineHtml";
    }
    return "?";
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::size_t RawToken::end_line() const noexcept {
    return line + static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

bool RawToken::is_keyword(std::string_view kw) const noexcept {
    if (kind != TokenKind::Keyword || text.size() != kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(text[i])) != kw[i]) return false;
    }
    return true;
}

bool is_php_keyword(std::string_view name) noexcept {
    static const std::unordered_set<std::string_view> kKeywords = {
        "abstract", "and", "array", "as", "break", "callable", "case", "catch",
        "class", "clone", "const", "continue", "declare", "default", "die", "do",
        "echo", "else", "elseif", "empty", "enddeclare", "endfor", "endforeach",
        "endif", "endswitch", "endwhile", "enum", "eval", "exit", "extends",
        "false", "final", "finally", "fn", "for", "foreach", "function", "global",
        "goto", "if", "implements", "include", "include_once", "instanceof",
        "insteadof", "interface", "isset", "list", "match", "namespace", "new",
        "null", "or", "parent", "print", "private", "protected", "public",
        "readonly", "require", "require_once", "return", "self", "static",
        "switch", "throw", "trait", "true", "try", "unset", "use", "var", "while",
        "xor", "yield",
    };
    return kKeywords.contains(name);
}

LexMode detect_mode(std::string_view source) noexcept {
    const auto first = source.find_first_not_of(" \t\r\n\f\v");
    if (first == std::string_view::npos) return LexMode::Html;
    return source.substr(first, 2) == "<?" ? LexMode::Html : LexMode::Php;
}

namespace {

bool is_ident_start(unsigned char c) noexcept {
    return std::isalpha(c) || c == '_' || c >= 0x80;
}

bool is_ident_char(unsigned char c) noexcept {
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

bool is_space(unsigned char c) noexcept {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool iequals_prefix(std::string_view s, std::size_t pos, std::string_view lower) noexcept {
    if (pos + lower.size() > s.size()) return false;
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[pos + i])) != lower[i]) return false;
    }
    return true;
}

// Longest first.
constexpr std::array<std::string_view, 52> kOperators = {
    "<<=", ">>=", "**=", "...", "<=>", "===", "!==", "?\?=", "?->",
    "++", "--", "->", "=>", "::", "==", "!=", "<>", "<=", ">=", "&&", "||",
    "??", "+=", "-=", "*=", "/=", ".=", "%=", "&=", "|=", "^=", "<<", ">>", "**",
    "+", "-", "*", "/", "%", "=", "<", ">", "!", ".", "&", "|", "^", "~", "?",
    ":", "@", "\\",
};

class Lexer {
public:
    Lexer(std::string_view src, LexMode mode) : src_(src), in_php_(mode == LexMode::Php) {}

    std::vector<RawToken> run() {
        while (pos_ < src_.size()) {
            if (in_php_) {
                lex_php();
            } else {
                lex_html();
            }
        }
        return std::move(tokens_);
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
    bool in_php_;
    std::vector<RawToken> tokens_;

    unsigned char peek(std::size_t ahead = 0) const noexcept {
        return pos_ + ahead < src_.size() ? static_cast<unsigned char>(src_[pos_ + ahead]) : 0;
    }

    bool starts_with(std::string_view s) const noexcept { return src_.substr(pos_, s.size()) == s; }

    [[noreturn]] void fail(const std::string& what, std::size_t line, std::size_t col) const {
        throw LexError(what, line, col);
    }

    void emit(TokenKind kind, std::size_t len) {
        RawToken tok;
        tok.kind = kind;
        tok.text = std::string(src_.substr(pos_, len));
        tok.line = line_;
        tok.col = col_;
        tok.offset = pos_;
        for (char c : tok.text) {
            if (c == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
        }
        pos_ += len;
        tokens_.push_back(std::move(tok));
    }

    // Position of the next open tag at or after `from`, with its length.
    std::pair<std::size_t, std::size_t> find_open_tag(std::size_t from) const noexcept {
        for (std::size_t p = src_.find("<?", from); p != std::string_view::npos;
             p = src_.find("<?", p + 1)) {
            if (src_.substr(p, 3) == "<?=") return {p, 3};
            if (iequals_prefix(src_, p, "<?php") &&
                (p + 5 == src_.size() || is_space(static_cast<unsigned char>(src_[p + 5])))) {
                return {p, 5};
            }
        }
        return {std::string_view::npos, 0};
    }

    void lex_html() {
        const auto [tag, len] = find_open_tag(pos_);
        if (tag == std::string_view::npos) {
            emit(TokenKind::InlineHtml, src_.size() - pos_);
            return;
        }
        if (tag > pos_) emit(TokenKind::InlineHtml, tag - pos_);
        emit(TokenKind::PhpTag, len);
        in_php_ = true;
    }

    void lex_php() {
        const unsigned char c = peek();
        if (is_space(c)) {
            std::size_t n = 0;
            while (is_space(peek(n))) ++n;
            emit(TokenKind::Whitespace, n);
            return;
        }
        if (starts_with("?>")) {
            emit(TokenKind::PhpTag, 2);
            in_php_ = false;
            return;
        }
        if (starts_with("#[")) {
            emit(TokenKind::Punctuation, 2);
            return;
        }
        if (c == '#' || starts_with("//")) {
            lex_line_comment();
            return;
        }
        if (starts_with("/*")) {
            const auto end = src_.find("*/", pos_ + 2);
            if (end == std::string_view::npos) fail("unterminated comment", line_, col_);
            emit(TokenKind::Comment, end + 2 - pos_);
            return;
        }
        if (c == '$' && is_ident_start(peek(1))) {
            std::size_t n = 2;
            while (is_ident_char(peek(n))) ++n;
            emit(TokenKind::Variable, n);
            return;
        }
        if (is_ident_start(c)) {
            std::size_t n = 1;
            while (is_ident_char(peek(n))) ++n;
            const auto word = to_lower(src_.substr(pos_, n));
            emit(is_php_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier, n);
            return;
        }
        if (std::isdigit(c) || (c == '.' && std::isdigit(peek(1)))) {
            emit(TokenKind::ConstantLiteral, number_length());
            return;
        }
        if (c == '\'') {
            emit(TokenKind::ConstantLiteral, single_quoted_length());
            return;
        }
        if (c == '"' || c == '`') {
            emit(TokenKind::ConstantLiteral, interpolated_length(static_cast<char>(c)));
            return;
        }
        if (starts_with("<<<")) {
            if (const auto n = heredoc_length(); n > 0) {
                emit(TokenKind::ConstantLiteral, n);
                return;
            }
        }
        if (c == ';' || c == ',' || c == '(' || c == ')' || c == '[' || c == ']' || c == '{' ||
            c == '}') {
            emit(TokenKind::Punctuation, 1);
            return;
        }
        for (auto op : kOperators) {
            if (starts_with(op)) {
                emit(TokenKind::Operator, op.size());
                return;
            }
        }
        if (c == '$') {
            emit(TokenKind::Operator, 1);
            return;
        }
        fail("unrecognized byte 0x" + hex_byte(c), line_, col_);
    }

    static std::string hex_byte(unsigned char c) {
        static constexpr char kDigits[] = "0123456789abcdef";
        return {kDigits[c >> 4], kDigits[c & 0xf]};
    }

    void lex_line_comment() {
        std::size_t n = 0;
        while (pos_ + n < src_.size()) {
            const char ch = src_[pos_ + n];
            if (ch == '\n') break;
            if (ch == '?' && pos_ + n + 1 < src_.size() && src_[pos_ + n + 1] == '>') break;
            ++n;
        }
        emit(TokenKind::Comment, n);
    }

    std::size_t number_length() const noexcept {
        std::size_t n = 0;
        const auto digits = [&](auto pred) {
            while (pred(peek(n)) || (peek(n) == '_' && pred(peek(n + 1)))) ++n;
        };
        const auto dec = [](unsigned char ch) { return std::isdigit(ch) != 0; };
        if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X') && std::isxdigit(peek(2))) {
            n = 2;
            digits([](unsigned char ch) { return std::isxdigit(ch) != 0; });
            return n;
        }
        if (peek() == '0' && (peek(1) == 'b' || peek(1) == 'B') && (peek(2) == '0' || peek(2) == '1')) {
            n = 2;
            digits([](unsigned char ch) { return ch == '0' || ch == '1'; });
            return n;
        }
        if (peek() == '0' && (peek(1) == 'o' || peek(1) == 'O') && std::isdigit(peek(2))) {
            n = 2;
            digits(dec);
            return n;
        }
        digits(dec);
        if (peek(n) == '.' && std::isdigit(peek(n + 1))) {
            ++n;
            digits(dec);
        } else if (peek(n) == '.' && n > 0 && peek(n + 1) != '.' && !is_ident_start(peek(n + 1))) {
            ++n;  // "1." is a float literal
        }
        if ((peek(n) == 'e' || peek(n) == 'E') &&
            (std::isdigit(peek(n + 1)) ||
             ((peek(n + 1) == '+' || peek(n + 1) == '-') && std::isdigit(peek(n + 2))))) {
            n += (peek(n + 1) == '+' || peek(n + 1) == '-') ? 2 : 1;
            digits(dec);
        }
        return n;
    }

    std::size_t single_quoted_length() const {
        std::size_t n = 1;
        while (pos_ + n < src_.size()) {
            const char ch = src_[pos_ + n];
            if (ch == '\\' && pos_ + n + 1 < src_.size()) {
                n += 2;
                continue;
            }
            if (ch == '\'') return n + 1;
            ++n;
        }
        fail("unterminated string", line_, col_);
    }

    // Length of the `{$ ... }` interpolation starting at absolute position p,
    // which may itself contain quoted strings.
    std::size_t skip_brace_interpolation(std::size_t p) const {
        std::size_t depth = 0;
        std::size_t q = p;
        while (q < src_.size()) {
            const char ch = src_[q];
            if (ch == '{') {
                ++depth;
            } else if (ch == '}') {
                if (--depth == 0) return q + 1 - p;
            } else if (ch == '\'' || ch == '"') {
                const char quote = ch;
                ++q;
                while (q < src_.size() && src_[q] != quote) {
                    if (src_[q] == '\\') ++q;
                    ++q;
                }
                if (q >= src_.size()) break;
            }
            ++q;
        }
        fail("unterminated string interpolation", line_, col_);
    }

    std::size_t interpolated_length(char quote) const {
        std::size_t n = 1;
        while (pos_ + n < src_.size()) {
            const char ch = src_[pos_ + n];
            if (ch == '\\' && pos_ + n + 1 < src_.size()) {
                n += 2;
                continue;
            }
            if (ch == '{' && pos_ + n + 1 < src_.size() && src_[pos_ + n + 1] == '$') {
                n += skip_brace_interpolation(pos_ + n);
                continue;
            }
            if (ch == quote) return n + 1;
            ++n;
        }
        fail("unterminated string", line_, col_);
    }

    // Returns 0 when "<<<" does not introduce a heredoc (then it lexes as "<<" "<").
    std::size_t heredoc_length() const {
        std::size_t n = 3;
        while (peek(n) == ' ' || peek(n) == '\t') ++n;
        char quote = 0;
        if (peek(n) == '"' || peek(n) == '\'') quote = static_cast<char>(peek(n++));
        if (!is_ident_start(peek(n))) return 0;
        const std::size_t id_start = n;
        while (is_ident_char(peek(n))) ++n;
        const std::string_view label = src_.substr(pos_ + id_start, n - id_start);
        if (quote != 0) {
            if (peek(n) != static_cast<unsigned char>(quote)) return 0;
            ++n;
        }
        if (peek(n) == '\r') ++n;
        if (peek(n) != '\n') return 0;
        ++n;
        // Body: scan line by line for the closing label.
        std::size_t line_start = pos_ + n;
        while (line_start <= src_.size()) {
            std::size_t p = line_start;
            while (p < src_.size() && (src_[p] == ' ' || src_[p] == '\t')) ++p;
            if (src_.substr(p, label.size()) == label &&
                (p + label.size() == src_.size() ||
                 !is_ident_char(static_cast<unsigned char>(src_[p + label.size()])))) {
                return p + label.size() - pos_;
            }
            const auto nl = src_.find('\n', line_start);
            if (nl == std::string_view::npos) break;
            line_start = nl + 1;
        }
        fail("unterminated heredoc", line_, col_);
    }
};

}  // namespace

std::vector<RawToken> lex(std::string_view source, LexMode mode) {
    return Lexer(source, mode).run();
}

}  // namespace phpvd::php
