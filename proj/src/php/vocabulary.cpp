// SPDX-License-Identifier: Apache-2.0
#include "phpvd/php/vocabulary.hpp"

#include <charconv>
#include <unordered_set>

#include "phpvd/common/error.hpp"
#include "phpvd/common/hash.hpp"
#include "phpvd/common/process.hpp"

namespace phpvd::php {

namespace {
constexpr std::string_view kHeader = "VOCAB v1";
}

Vocabulary::Vocabulary(std::vector<std::string> surfaces) : surfaces_(std::move(surfaces)) {
    ids_.reserve(surfaces_.size());
    for (std::size_t i = 0; i < surfaces_.size(); ++i) {
        const auto& s = surfaces_[i];
        if (s.empty() || s.find_first_of("\t\n\r") != std::string::npos) {
            throw FormatError("vocabulary surface cannot be empty or contain tabs/newlines");
        }
        if (!ids_.emplace(s, static_cast<TokenId>(i)).second) {
            throw FormatError("duplicate vocabulary surface '" + s + "'");
        }
    }
    Fnv1a64 h;
    for (const auto& s : surfaces_) h.update(s).update(std::string_view("\n", 1));
    version_ = "v1-" + h.hex();
}

Vocabulary Vocabulary::build(std::span<const std::vector<std::string>> corpus) {
    std::vector<std::string> surfaces{std::string(kPad)};
    std::unordered_set<std::string> seen{std::string(kPad), std::string(kUnk)};
    for (const auto& doc : corpus) {
        for (const auto& tok : doc) {
            if (seen.insert(tok).second) surfaces.push_back(tok);
        }
    }
    if (surfaces.size() == 1) throw EmptyCorpus("cannot build a vocabulary from an empty corpus");
    surfaces.emplace_back(kUnk);
    return Vocabulary(std::move(surfaces));
}

TokenId Vocabulary::id(std::string_view surface) const {
    const auto it = ids_.find(std::string(surface));
    return it == ids_.end() ? unk_id() : it->second;
}

bool Vocabulary::contains(std::string_view surface) const {
    return ids_.contains(std::string(surface));
}

const std::string& Vocabulary::surface(TokenId id) const {
    if (id >= surfaces_.size()) throw IdOutOfRange("token id " + std::to_string(id) + " out of range");
    return surfaces_[id];
}

std::string Vocabulary::serialize() const {
    std::string out(kHeader);
    out += '\n';
    for (std::size_t i = 0; i < surfaces_.size(); ++i) {
        out += surfaces_[i];
        out += '\t';
        out += std::to_string(i);
        out += '\n';
    }
    return out;
}

Vocabulary Vocabulary::parse(std::string_view text) {
    std::size_t pos = text.find('\n');
    if (text.substr(0, pos) != kHeader) throw FormatError("vocabulary: missing 'VOCAB v1' header");
    std::vector<std::string> surfaces;
    while (pos != std::string_view::npos && pos + 1 < text.size()) {
        const std::size_t start = pos + 1;
        pos = text.find('\n', start);
        const auto line = text.substr(start, pos == std::string_view::npos ? text.npos : pos - start);
        if (line.empty()) continue;
        const auto tab = line.rfind('\t');
        if (tab == std::string_view::npos) throw FormatError("vocabulary: line without tab");
        std::size_t id = 0;
        const auto digits = line.substr(tab + 1);
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
        if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
            throw FormatError("vocabulary: bad id '" + std::string(digits) + "'");
        }
        if (id != surfaces.size()) throw FormatError("vocabulary: ids must be dense and ordered");
        surfaces.emplace_back(line.substr(0, tab));
    }
    if (surfaces.size() < 2 || surfaces.front() != kPad || surfaces.back() != kUnk) {
        throw FormatError("vocabulary: must start with <PAD> and end with <UNK>");
    }
    return Vocabulary(std::move(surfaces));
}

void Vocabulary::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

Vocabulary Vocabulary::load(const std::filesystem::path& path) { return parse(read_file(path)); }

void VocabularyBuilder::add(std::span<const std::string> tokens) {
    chunks_.emplace_back(tokens.begin(), tokens.end());
}

void VocabularyBuilder::add(std::span<const NormalizedToken> tokens) {
    chunks_.push_back(surfaces(tokens));
}

Vocabulary VocabularyBuilder::finish() const { return Vocabulary::build(chunks_); }

}  // namespace phpvd::php
