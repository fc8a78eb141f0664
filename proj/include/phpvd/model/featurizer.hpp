// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phpvd/cfg/cfg.hpp"
#include "phpvd/common/granularity.hpp"
#include "phpvd/corpus/sample.hpp"
#include "phpvd/php/encode.hpp"
#include "phpvd/php/keep_list.hpp"
#include "phpvd/php/vocabulary.hpp"

namespace phpvd::model {

/// Model input for one unit of code.
struct Features {
    php::TokenSequence seq;
    cfg::Cfg graph;
    std::string vocab_version;
    bool cfg_fallback = false;  // single-node graph used
};

/// Lexing mode used for a unit: file-level code starts in HTML, function
/// code is sniffed (extracted slices have no open tag).
php::LexMode lex_mode_for(std::string_view code, Granularity g);

/// Normalized token surfaces of one unit (as fed to the vocabulary).
std::vector<std::string> normalized_surfaces(std::string_view code, Granularity g, const php::KeepList& keep);

/// Vocabulary over the normalized tokens of `samples`, in order. Samples
/// that fail to lex are skipped. Throws EmptyCorpus.
php::Vocabulary build_vocabulary(std::span<const corpus::Sample> samples, Granularity g,
                                 const php::KeepList& keep);

class Featurizer {
public:
    Featurizer(const php::Vocabulary& vocab, php::KeepList keep, Granularity g, std::size_t seq_len);

    /// Lex, normalize, encode and build the CFG. Falls back to a single-node
    /// graph on ParseError or EmptyUnit; LexError propagates.
    Features operator()(std::string_view code) const;

    Granularity granularity() const noexcept { return granularity_; }
    const php::Vocabulary& vocab() const noexcept { return *vocab_; }
    const php::KeepList& keep() const noexcept { return keep_; }

private:
    const php::Vocabulary* vocab_;
    php::KeepList keep_;
    Granularity granularity_;
    std::size_t seq_len_;
};

/// Featurizes samples on `threads` workers; output order matches input.
/// Samples that fail to lex are dropped and their indices reported.
std::vector<Features> featurize_all(std::span<const corpus::Sample> samples, const Featurizer& f,
                                    std::size_t threads, std::vector<std::size_t>* dropped = nullptr,
                                    std::vector<std::size_t>* kept = nullptr);

}  // namespace phpvd::model
