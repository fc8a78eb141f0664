// SPDX-License-Identifier: Apache-2.0
#include "phpvd/model/featurizer.hpp"

#include <algorithm>
#include <atomic>
#include <optional>
#include <thread>

#include "phpvd/common/error.hpp"
#include "phpvd/php/lexer.hpp"
#include "phpvd/php/normalize.hpp"
#include "phpvd/php/parser.hpp"

namespace phpvd::model {

php::LexMode lex_mode_for(std::string_view code, Granularity g) {
    return g == Granularity::File ? php::LexMode::Html : php::detect_mode(code);
}

std::vector<std::string> normalized_surfaces(std::string_view code, Granularity g, const php::KeepList& keep) {
    const auto tokens = php::lex(code, lex_mode_for(code, g));
    return php::surfaces(php::normalize(tokens, g, keep));
}

php::Vocabulary build_vocabulary(std::span<const corpus::Sample> samples, Granularity g,
                                 const php::KeepList& keep) {
    php::VocabularyBuilder builder;
    for (const auto& s : samples) {
        try {
            builder.add(std::span<const std::string>(normalized_surfaces(s.code, g, keep)));
        } catch (const LexError&) {
        }
    }
    return builder.finish();
}

Featurizer::Featurizer(const php::Vocabulary& vocab, php::KeepList keep, Granularity g, std::size_t seq_len)
    : vocab_(&vocab), keep_(std::move(keep)), granularity_(g), seq_len_(seq_len) {}

Features Featurizer::operator()(std::string_view code) const {
    const auto tokens = php::lex(code, lex_mode_for(code, granularity_));
    const auto normalized = php::normalize(tokens, granularity_, keep_);
    Features f;
    f.seq = php::encode(normalized, *vocab_, seq_len_, granularity_);
    f.vocab_version = vocab_->version();
    try {
        const auto unit = php::parse(tokens);
        f.graph = cfg::build_cfg(unit, normalized, *vocab_, granularity_);
    } catch (const ParseError&) {
        f.graph = cfg::single_node_cfg(normalized, *vocab_);
        f.cfg_fallback = true;
    } catch (const EmptyUnit&) {
        f.graph = cfg::single_node_cfg(normalized, *vocab_);
        f.cfg_fallback = true;
    }
    return f;
}

std::vector<Features> featurize_all(std::span<const corpus::Sample> samples, const Featurizer& f,
                                    std::size_t threads, std::vector<std::size_t>* dropped,
                                    std::vector<std::size_t>* kept) {
    std::vector<std::optional<Features>> slots(samples.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (auto i = next++; i < samples.size(); i = next++) {
            try {
                slots[i] = f(samples[i].code);
            } catch (const LexError&) {
            }
        }
    };
    const auto n = std::max<std::size_t>(1, std::min(threads, samples.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    std::vector<Features> out;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i]) {
            out.push_back(std::move(*slots[i]));
            if (kept) kept->push_back(i);
        } else if (dropped) {
            dropped->push_back(i);
        }
    }
    return out;
}

}  // namespace phpvd::model
