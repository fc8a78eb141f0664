// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "phpvd/php/normalize.hpp"

namespace phpvd::php {

using TokenId = std::uint32_t;

/// Dense surface -> id map. Id 0 is padding; the unknown-token id is the last
/// one, appended after every corpus surface.
class Vocabulary {
public:
    static constexpr TokenId kPadId = 0;
    static constexpr std::string_view kPad = "<PAD>";
    static constexpr std::string_view kUnk = "<UNK>";

    /// Ids in first-seen order. Throws EmptyCorpus when no token was seen.
    static Vocabulary build(std::span<const std::vector<std::string>> corpus);

    TokenId id(std::string_view surface) const;
    TokenId unk_id() const noexcept { return static_cast<TokenId>(surfaces_.size() - 1); }
    bool contains(std::string_view surface) const;
    const std::string& surface(TokenId id) const;

    /// Number of ids including PAD and UNK.
    std::size_t size() const noexcept { return surfaces_.size(); }

    /// Content hash, e.g. "v1-3fa2...". Two vocabularies with the same entries
    /// share a version.
    const std::string& version() const noexcept { return version_; }

    /// "VOCAB v1" header, then "surface<TAB>id" per line in id order.
    std::string serialize() const;
    static Vocabulary parse(std::string_view text);
    void save(const std::filesystem::path& path) const;
    static Vocabulary load(const std::filesystem::path& path);

    bool operator==(const Vocabulary& other) const { return surfaces_ == other.surfaces_; }

private:
    explicit Vocabulary(std::vector<std::string> surfaces);

    std::vector<std::string> surfaces_;
    std::unordered_map<std::string, TokenId> ids_;
    std::string version_;
};

/// Incremental form of Vocabulary::build.
class VocabularyBuilder {
public:
    void add(std::span<const std::string> tokens);
    void add(std::span<const NormalizedToken> tokens);
    Vocabulary finish() const;

private:
    std::vector<std::vector<std::string>> chunks_;
};

}  // namespace phpvd::php
