// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "phpvd/common/granularity.hpp"
#include "phpvd/corpus/label.hpp"

namespace phpvd::corpus {

enum class ProvenanceKind { Synthetic, GitMined, Fixture };

std::string_view to_string(ProvenanceKind k) noexcept;
ProvenanceKind parse_provenance_kind(std::string_view s);

struct Provenance {
    ProvenanceKind kind = ProvenanceKind::Synthetic;
    std::string origin;  // repo@commit:path, generator seed, fixture path

    bool operator==(const Provenance&) const = default;
};

struct Sample {
    std::string id;
    Granularity granularity = Granularity::File;
    std::string code;
    Label label = Label::Safe;
    Provenance provenance;

    bool operator==(const Sample&) const = default;
};

/// Hex FNV-1a 64 of the granularity tag, a NUL byte and the code.
std::string sample_id(std::string_view code, Granularity granularity);

/// Fills in the id. Throws FormatError on empty code.
Sample make_sample(std::string code, Granularity granularity, Label label, Provenance provenance);

/// One JSON object: {id, granularity, label, provenance: {kind, origin}, code}.
std::string to_json_line(const Sample& s);
/// Throws FormatError on malformed input or an id that does not match the code.
Sample from_json_line(std::string_view line);

void write_jsonl(const std::filesystem::path& path, const std::vector<Sample>& samples);
void append_jsonl(const std::filesystem::path& path, const std::vector<Sample>& samples);
std::vector<Sample> read_jsonl(const std::filesystem::path& path);

/// Keeps the first sample of every id.
std::vector<Sample> dedup_by_id(std::vector<Sample> samples);

}  // namespace phpvd::corpus
