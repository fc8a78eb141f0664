// SPDX-License-Identifier: Apache-2.0
#include "phpvd/corpus/ingest.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "phpvd/common/error.hpp"
#include "phpvd/common/hash.hpp"
#include "phpvd/common/process.hpp"
#include "phpvd/php/lexer.hpp"
#include "phpvd/php/normalize.hpp"

namespace phpvd::corpus {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::map<std::string, Label> parse_manifest(std::string_view text) {
    std::map<std::string, Label> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto comma = line.rfind(',');
        if (comma == std::string::npos) throw FormatError("manifest line " + std::to_string(line_no) + ": no comma");
        const auto path = trim(std::string_view(line).substr(0, comma));
        const auto label = trim(std::string_view(line).substr(comma + 1));
        if (line_no == 1 && path == "path" && label == "label") continue;
        const auto parsed = parse_label(label);
        if (!out.emplace(fs::path(path).lexically_normal().generic_string(), parsed).second) {
            throw FormatError("manifest line " + std::to_string(line_no) + ": repeated path " + path);
        }
    }
    return out;
}

std::map<std::string, Label> load_manifest(const fs::path& path) { return parse_manifest(read_file(path)); }

std::string normalized_key(std::string_view code, const php::KeepList& keep) {
    Fnv1a64 h;
    try {
        const auto tokens = php::lex(code);
        for (const auto& t : php::normalize(tokens, Granularity::File, keep)) {
            h.update(t.surface);
            h.update(std::string_view("\n", 1));
        }
        return "n-" + h.hex();
    } catch (const LexError&) {
        return "r-" + h.update(code).hex();
    }
}

bool has_php_extension(const fs::path& p) {
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".php";
}

std::vector<fs::path> find_php_files(const fs::path& dir) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    for (auto it = fs::recursive_directory_iterator(dir); it != fs::recursive_directory_iterator(); ++it) {
        if (it->is_symlink()) {
            if (it->is_directory()) it.disable_recursion_pending();
            continue;
        }
        if (it->is_regular_file() && has_php_extension(it->path())) out.push_back(it->path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Sample> ingest_synthetic(const fs::path& dir, const fs::path& manifest, const php::KeepList& keep) {
    const auto labels = load_manifest(manifest);
    const auto files = find_php_files(dir);
    std::set<std::string> used;
    std::set<std::string> keys;
    std::vector<Sample> out;
    for (const auto& file : files) {
        const auto rel = file.lexically_relative(dir).lexically_normal().generic_string();
        const auto it = labels.find(rel);
        if (it == labels.end()) throw ManifestMismatch("no manifest label for " + rel);
        used.insert(rel);
        auto code = read_file(file);
        if (code.empty()) continue;
        if (!keys.insert(normalized_key(code, keep)).second) continue;
        out.push_back(make_sample(std::move(code), Granularity::File, it->second,
                                  {ProvenanceKind::Synthetic, rel}));
    }
    for (const auto& [path, label] : labels) {
        if (!used.contains(path)) throw ManifestMismatch("manifest entry without a file: " + path);
    }
    return out;
}

}  // namespace phpvd::corpus
