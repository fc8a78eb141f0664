// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "phpvd/common/granularity.hpp"
#include "phpvd/php/keep_list.hpp"
#include "phpvd/php/token.hpp"

namespace phpvd::php {

struct NormalizedToken {
    std::string surface;
    std::size_t origin_line = 1;
    /// Index of the source token in the lex() output.
    std::size_t origin_index = 0;

    bool operator==(const NormalizedToken&) const = default;
};

/// How many distinct variables / user functions / constants keep an indexed
/// placeholder (VAR0.., FUNC0.., CONST0..) before falling back to VAR/FUNC/CONST.
struct AbstractionLimits {
    std::size_t k_var = 10;
    std::size_t k_func = 10;
    std::size_t k_const = 10;

    /// 10 at function level, 200 at file level, same k for all three families.
    static AbstractionLimits for_granularity(Granularity g) noexcept;
};

/// Drops whitespace, comments and PHP tags and abstracts the long tail of
/// names and literals. The i-th distinct variable (in order of first
/// appearance) becomes VARi while i < k_var, and VAR afterwards; likewise
/// FUNCi for user function names and CONSTi for literals and named
/// constants. Keywords, superglobals and KeepList names are retained.
///
/// The output has one entry per non-trivia input token, in order.
std::vector<NormalizedToken> normalize(std::span<const RawToken> tokens, const KeepList& keep,
                                       const AbstractionLimits& limits);

inline std::vector<NormalizedToken> normalize(std::span<const RawToken> tokens,
                                              Granularity granularity, const KeepList& keep) {
    return normalize(tokens, keep, AbstractionLimits::for_granularity(granularity));
}

/// Rebuilds a token stream from already-normalized surfaces, e.g. to check
/// that normalization is idempotent.
std::vector<RawToken> tokens_from_surfaces(std::span<const NormalizedToken> normalized);

/// True for VAR, VAR7, FUNC, FUNC0, CONST, CONST12, and INLINE_HTML.
bool is_placeholder(std::string_view surface) noexcept;

std::vector<std::string> surfaces(std::span<const NormalizedToken> normalized);

}  // namespace phpvd::php
