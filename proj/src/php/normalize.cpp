// SPDX-License-Identifier: Apache-2.0
#include "phpvd/php/normalize.hpp"

#include <cctype>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "phpvd/php/lexer.hpp"

namespace phpvd::php {

AbstractionLimits AbstractionLimits::for_granularity(Granularity g) noexcept {
    const std::size_t k = g == Granularity::Function ? 10 : 200;
    return {k, k, k};
}

bool is_placeholder(std::string_view s) noexcept {
    if (s == "INLINE_HTML") return true;
    for (std::string_view prefix : {"VAR", "FUNC", "CONST"}) {
        if (s.substr(0, prefix.size()) != prefix) continue;
        const auto rest = s.substr(prefix.size());
        bool digits = true;
        for (char c : rest) digits = digits && std::isdigit(static_cast<unsigned char>(c));
        if (digits && (rest.size() <= 1 || rest[0] != '0')) return true;
    }
    return false;
}

std::vector<std::string> surfaces(std::span<const NormalizedToken> normalized) {
    std::vector<std::string> out;
    out.reserve(normalized.size());
    for (const auto& t : normalized) out.push_back(t.surface);
    return out;
}

namespace {

bool is_retained_variable(std::string_view name) {
    static const std::unordered_set<std::string_view> kRetained = {
        "$_GET", "$_POST", "$_REQUEST", "$_COOKIE", "$_FILES", "$_SERVER",
        "$_SESSION", "$_ENV", "$GLOBALS", "$this",
    };
    return kRetained.contains(name);
}

// Assigns placeholder names in order of first appearance.
class Family {
public:
    Family(std::string prefix, std::size_t k) : prefix_(std::move(prefix)), k_(k) {}

    std::string name_for(const std::string& key) {
        auto [it, inserted] = index_.try_emplace(key, index_.size());
        (void)inserted;
        return it->second < k_ ? prefix_ + std::to_string(it->second) : prefix_;
    }

private:
    std::string prefix_;
    std::size_t k_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace

std::vector<NormalizedToken> normalize(std::span<const RawToken> tokens, const KeepList& keep,
                                       const AbstractionLimits& limits) {
    std::vector<std::size_t> significant;
    significant.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!tokens[i].is_trivia()) significant.push_back(i);
    }

    Family vars("VAR", limits.k_var);
    Family funcs("FUNC", limits.k_func);
    Family consts("CONST", limits.k_const);

    const auto sig = [&](std::ptrdiff_t s) -> const RawToken* {
        if (s < 0 || static_cast<std::size_t>(s) >= significant.size()) return nullptr;
        return &tokens[significant[static_cast<std::size_t>(s)]];
    };

    std::vector<NormalizedToken> out;
    out.reserve(significant.size());
    for (std::size_t s = 0; s < significant.size(); ++s) {
        const RawToken& tok = tokens[significant[s]];
        std::string surface;
        switch (tok.kind) {
            case TokenKind::Keyword:
                surface = to_lower(tok.text);
                break;
            case TokenKind::Variable:
                surface = is_retained_variable(tok.text) ? tok.text : vars.name_for(tok.text);
                break;
            case TokenKind::ConstantLiteral:
                surface = consts.name_for(tok.text);
                break;
            case TokenKind::InlineHtml:
                surface = "INLINE_HTML";
                break;
            case TokenKind::Identifier: {
                if (is_placeholder(tok.text)) {
                    surface = tok.text;
                    break;
                }
                if (keep.contains(tok.text)) {
                    surface = to_lower(tok.text);
                    break;
                }
                const auto* next = sig(static_cast<std::ptrdiff_t>(s) + 1);
                const auto* prev = sig(static_cast<std::ptrdiff_t>(s) - 1);
                const auto* prev2 = sig(static_cast<std::ptrdiff_t>(s) - 2);
                const bool call = next != nullptr && next->is_punct("(");
                const bool definition =
                    (prev != nullptr && prev->is_keyword("function")) ||
                    (prev != nullptr && prev->is_op("&") && prev2 != nullptr &&
                     prev2->is_keyword("function"));
                const bool member = prev != nullptr && (prev->is_op("->") || prev->is_op("?->"));
                if (call || definition) {
                    surface = funcs.name_for(to_lower(tok.text));
                } else if (member) {
                    surface = vars.name_for("->" + tok.text);
                } else {
                    surface = consts.name_for(tok.text);
                }
                break;
            }
            default:
                surface = tok.text;
                break;
        }
        out.push_back({std::move(surface), tok.line, significant[s]});
    }
    return out;
}

std::vector<RawToken> tokens_from_surfaces(std::span<const NormalizedToken> normalized) {
    std::vector<RawToken> out;
    out.reserve(normalized.size());
    for (std::size_t i = 0; i < normalized.size(); ++i) {
        const auto& s = normalized[i].surface;
        RawToken tok;
        tok.text = s;
        tok.line = normalized[i].origin_line;
        tok.offset = i;
        const unsigned char c0 = s.empty() ? 0 : static_cast<unsigned char>(s[0]);
        if (s == "INLINE_HTML") {
            tok.kind = TokenKind::InlineHtml;
        } else if (is_php_keyword(to_lower(s))) {
            tok.kind = TokenKind::Keyword;
        } else if (c0 == '$' && s.size() > 1) {
            tok.kind = TokenKind::Variable;
        } else if (std::isalpha(c0) || c0 == '_' || c0 >= 0x80) {
            tok.kind = TokenKind::Identifier;
        } else if (s.size() == 1 && std::string_view(";,()[]{}").find(s[0]) != std::string_view::npos) {
            tok.kind = TokenKind::Punctuation;
        } else if (s == "#[") {
            tok.kind = TokenKind::Punctuation;
        } else {
            tok.kind = TokenKind::Operator;
        }
        out.push_back(std::move(tok));
    }
    return out;
}

}  // namespace phpvd::php
