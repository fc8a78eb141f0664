// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "phpvd/common/granularity.hpp"
#include "phpvd/php/vocabulary.hpp"

namespace phpvd::php {

constexpr std::size_t kFunctionSequenceLength = 200;
constexpr std::size_t kFileSequenceLength = 3000;

constexpr std::size_t sequence_length(Granularity g) noexcept {
    return g == Granularity::Function ? kFunctionSequenceLength : kFileSequenceLength;
}

struct TokenSequence {
    std::vector<TokenId> ids;  // always exactly L entries
    std::size_t true_len = 0;
    Granularity granularity = Granularity::Function;

    bool operator==(const TokenSequence&) const = default;
};

/// Fits `ids` into `length` slots: zero-padded at the end when shorter, the
/// last `length` ids when longer. Returns the number of real ids kept.
std::size_t fit_to_length(std::span<const TokenId> ids, std::size_t length,
                          std::vector<TokenId>& out);

/// Maps surfaces to ids (unknown -> UNK) and fits them to `length`.
TokenSequence encode(std::span<const NormalizedToken> tokens, const Vocabulary& vocab,
                     std::size_t length, Granularity granularity);

inline TokenSequence encode(std::span<const NormalizedToken> tokens, const Vocabulary& vocab,
                            Granularity granularity) {
    return encode(tokens, vocab, sequence_length(granularity), granularity);
}

}  // namespace phpvd::php
