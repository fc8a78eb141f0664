// SPDX-License-Identifier: Apache-2.0
#include "phpvd/corpus/review.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phpvd/common/error.hpp"
#include "phpvd/common/rng.hpp"
#include "phpvd/php/token.hpp"

namespace phpvd::corpus {

namespace {

std::string quote(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::vector<Sample> select_for_review(const std::vector<Sample>& samples, double fraction, std::uint64_t seed) {
    std::vector<const Sample*> unsafe;
    for (const auto& s : samples) {
        if (is_unsafe(s.label)) unsafe.push_back(&s);
    }
    const auto want = std::min(unsafe.size(), static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(unsafe.size()) - 1e-9)));
    Rng rng(seed);
    rng.shuffle(unsafe);
    unsafe.resize(want);
    std::sort(unsafe.begin(), unsafe.end(), [](const Sample* a, const Sample* b) { return a->id < b->id; });
    std::vector<Sample> out;
    for (const auto* s : unsafe) out.push_back(*s);
    return out;
}

std::string render_review_sheet(const std::vector<Sample>& selected) {
    std::string out = "id,label,origin,verdict\n";
    for (const auto& s : selected) {
        out += s.id + "," + std::string(to_string(s.label)) + "," + quote(s.provenance.origin) + ",\n";
    }
    return out;
}

std::vector<std::string> split_csv_record(std::string_view line) {
    std::vector<std::string> out(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                out.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                out.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.emplace_back();
        } else if (c != '\r') {
            out.back() += c;
        }
    }
    return out;
}

ReviewTally tally_review(std::string_view sheet) {
    ReviewTally t;
    std::istringstream in{std::string(sheet)};
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.find_first_not_of(" \r") == std::string::npos) continue;
        const auto fields = split_csv_record(line);
        if (fields.size() != 4) throw FormatError("review sheet row needs 4 fields: " + line);
        const auto verdict = php::to_lower(fields[3]);
        if (verdict.empty()) ++t.pending;
        else if (verdict == "confirmed") ++t.confirmed;
        else if (verdict == "rejected") {
            ++t.rejected;
            t.rejected_ids.push_back(fields[0]);
        } else throw FormatError("unknown verdict '" + fields[3] + "'");
    }
    return t;
}

}  // namespace phpvd::corpus
