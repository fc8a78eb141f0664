// SPDX-License-Identifier: Apache-2.0
#include "phpvd/corpus/sample.hpp"

#include <fstream>
#include <json.hpp>
#include <unordered_set>

#include "phpvd/common/error.hpp"
#include "phpvd/common/hash.hpp"
#include "phpvd/common/process.hpp"
#include "phpvd/php/token.hpp"

namespace phpvd::corpus {

using nlohmann::json;

std::string_view to_string(ProvenanceKind k) noexcept {
    switch (k) {
        case ProvenanceKind::Synthetic: return "synthetic";
        case ProvenanceKind::GitMined: return "git";
        case ProvenanceKind::Fixture: return "fixture";
    }
    return "synthetic";
}

ProvenanceKind parse_provenance_kind(std::string_view s) {
    const auto lower = php::to_lower(s);
    if (lower == "synthetic") return ProvenanceKind::Synthetic;
    if (lower == "git" || lower == "gitmined") return ProvenanceKind::GitMined;
    if (lower == "fixture") return ProvenanceKind::Fixture;
    throw FormatError("unknown provenance kind '" + std::string(s) + "'");
}

std::string sample_id(std::string_view code, Granularity granularity) {
    Fnv1a64 h;
    h.update(to_string(granularity));
    h.update(std::string_view("\0", 1));
    h.update(code);
    return h.hex();
}

Sample make_sample(std::string code, Granularity granularity, Label label, Provenance provenance) {
    if (code.empty()) throw FormatError("sample code is empty");
    Sample s;
    s.id = sample_id(code, granularity);
    s.granularity = granularity;
    s.code = std::move(code);
    s.label = label;
    s.provenance = std::move(provenance);
    return s;
}

std::string to_json_line(const Sample& s) {
    json j;
    j["id"] = s.id;
    j["granularity"] = std::string(to_string(s.granularity));
    j["label"] = std::string(to_string(s.label));
    j["provenance"] = {{"kind", std::string(to_string(s.provenance.kind))}, {"origin", s.provenance.origin}};
    j["code"] = s.code;
    // Invalid UTF-8 in mined code is replaced rather than rejected.
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

Sample from_json_line(std::string_view line) {
    try {
        const auto j = json::parse(line);
        Sample s = make_sample(j.at("code").get<std::string>(),
                               parse_granularity(j.at("granularity").get<std::string>()),
                               parse_label(j.at("label").get<std::string>()),
                               {parse_provenance_kind(j.at("provenance").at("kind").get<std::string>()),
                                j.at("provenance").value("origin", "")});
        if (j.contains("id") && j.at("id").get<std::string>() != s.id) {
            throw FormatError("sample id " + j.at("id").get<std::string>() + " does not match its code");
        }
        return s;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed corpus line: ") + e.what());
    }
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Sample>& samples) {
    std::string out;
    for (const auto& s : samples) out += to_json_line(s) + "\n";
    write_file(path, out);
}

void append_jsonl(const std::filesystem::path& path, const std::vector<Sample>& samples) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::app);
    if (!f) throw IoError("cannot open " + path.string() + " for appending");
    for (const auto& s : samples) f << to_json_line(s) << "\n";
}

std::vector<Sample> read_jsonl(const std::filesystem::path& path) {
    const auto text = read_file(path);
    std::vector<Sample> out;
    std::size_t start = 0, line_no = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        ++line_no;
        std::string_view line(text.data() + start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) {
            try {
                out.push_back(from_json_line(line));
            } catch (const FormatError& e) {
                throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
            }
        }
        start = end + 1;
    }
    return out;
}

std::vector<Sample> dedup_by_id(std::vector<Sample> samples) {
    std::unordered_set<std::string> seen;
    std::vector<Sample> out;
    for (auto& s : samples) {
        if (seen.insert(s.id).second) out.push_back(std::move(s));
    }
    return out;
}

}  // namespace phpvd::corpus
