// SPDX-License-Identifier: Apache-2.0
#include "phpvd/php/encode.hpp"

#include <algorithm>

namespace phpvd::php {

std::size_t fit_to_length(std::span<const TokenId> ids, std::size_t length,
                          std::vector<TokenId>& out) {
    out.assign(length, Vocabulary::kPadId);
    const std::size_t kept = std::min(ids.size(), length);
    std::copy(ids.end() - static_cast<std::ptrdiff_t>(kept), ids.end(), out.begin());
    return kept;
}

TokenSequence encode(std::span<const NormalizedToken> tokens, const Vocabulary& vocab,
                     std::size_t length, Granularity granularity) {
    std::vector<TokenId> mapped;
    mapped.reserve(tokens.size());
    for (const auto& t : tokens) mapped.push_back(vocab.id(t.surface));
    TokenSequence seq;
    seq.granularity = granularity;
    seq.true_len = fit_to_length(mapped, length, seq.ids);
    return seq;
}

}  // namespace phpvd::php
