// SPDX-License-Identifier: Apache-2.0
#include "phpvd/corpus/miner.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "phpvd/common/error.hpp"
#include "phpvd/common/process.hpp"
#include "phpvd/corpus/ingest.hpp"
#include "phpvd/corpus/interval_tree.hpp"
#include "phpvd/php/functions.hpp"
#include "phpvd/php/token.hpp"

namespace phpvd::corpus {

namespace fs = std::filesystem;

namespace {

bool is_word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find(sep, start);
        if (end == std::string_view::npos) end = text.size();
        out.emplace_back(text.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

class Git {
public:
    explicit Git(fs::path repo) : repo_(std::move(repo)) {}

    std::string run(std::vector<std::string> args) const {
        std::vector<std::string> argv{"git", "-c", "core.quotepath=off", "-C", repo_.string()};
        argv.insert(argv.end(), args.begin(), args.end());
        const auto r = run_process(argv);
        if (r.exit_code != 0) {
            std::string cmd;
            for (const auto& a : args) cmd += " " + a;
            throw GitError("git" + cmd + " failed: " + trim(r.err));
        }
        return r.out;
    }

private:
    fs::path repo_;
};

std::size_t parse_count(std::string_view s) {
    std::size_t v = 0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
}

// "a,b" or "a"
std::pair<std::size_t, std::size_t> parse_range(std::string_view s) {
    const auto comma = s.find(',');
    if (comma == std::string_view::npos) return {parse_count(s), 1};
    return {parse_count(s.substr(0, comma)), parse_count(s.substr(comma + 1))};
}

// Dedup with the Unsafe label winning over Safe.
class SampleSet {
public:
    void add(Sample s) {
        const auto it = index_.find(s.id);
        if (it == index_.end()) {
            index_.emplace(s.id, samples_.size());
            samples_.push_back(std::move(s));
            return;
        }
        auto& existing = samples_[it->second];
        if (!is_unsafe(existing.label) && is_unsafe(s.label)) {
            existing.label = s.label;
            existing.provenance = std::move(s.provenance);
        }
    }
    std::vector<Sample> take() { return std::move(samples_); }

private:
    std::vector<Sample> samples_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace

KeywordSet KeywordSet::defaults() {
    KeywordSet k;
    for (const char* w : {"xss", "cross-site scripting", "cross site scripting", "cross-site", "crosssite"}) {
        k.entries.emplace_back(Label::XSS, w);
    }
    for (const char* w : {"sqli", "sql injection", "sql-injection", "sql inject", "sqlinjection"}) {
        k.entries.emplace_back(Label::SQLi, w);
    }
    for (const char* w : {"command injection", "os command", "shell injection", "command execution",
                          "osci", "cmd injection"}) {
        k.entries.emplace_back(Label::OSCI, w);
    }
    return k;
}

KeywordSet KeywordSet::parse(std::string_view text) {
    KeywordSet k;
    std::size_t line_no = 0;
    for (auto line : split(text, '\n')) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw FormatError("keywords line " + std::to_string(line_no) + ": expected label,keyword");
        }
        const auto label = parse_label(trim(std::string_view(line).substr(0, comma)));
        if (!is_unsafe(label)) throw FormatError("keywords line " + std::to_string(line_no) + ": Safe has no keywords");
        const auto word = php::to_lower(trim(std::string_view(line).substr(comma + 1)));
        if (word.empty()) throw FormatError("keywords line " + std::to_string(line_no) + ": empty keyword");
        k.entries.emplace_back(label, word);
    }
    if (k.entries.empty()) throw FormatError("keyword list is empty");
    return k;
}

KeywordSet KeywordSet::load(const fs::path& path) { return parse(read_file(path)); }

std::vector<Label> KeywordSet::match(std::string_view message) const {
    const auto text = php::to_lower(message);
    std::set<Label> found;
    for (const auto& [label, word] : entries) {
        for (auto pos = text.find(word); pos != std::string::npos; pos = text.find(word, pos + 1)) {
            const bool left = pos == 0 || !is_word_char(text[pos - 1]);
            const auto end = pos + word.size();
            const bool right = end >= text.size() || !is_word_char(text[end]);
            if (left && right) {
                found.insert(label);
                break;
            }
        }
    }
    return {found.begin(), found.end()};
}

FileDiff parse_unified_diff(std::string_view diff) {
    FileDiff d;
    for (const auto& line : split(diff, '\n')) {
        if (!line.starts_with("@@ ")) continue;
        std::istringstream in(line.substr(3));
        std::string old_part, new_part;
        in >> old_part >> new_part;
        if (old_part.size() < 2 || old_part[0] != '-' || new_part.size() < 2 || new_part[0] != '+') {
            throw GitError("malformed hunk header: " + line);
        }
        const auto [a, b] = parse_range(std::string_view(old_part).substr(1));
        const auto [c, n] = parse_range(std::string_view(new_part).substr(1));
        (void)c;
        if (b == 0) {
            d.insert_after.push_back(a);
        } else {
            for (std::size_t l = a; l < a + b; ++l) d.removed.push_back(l);
        }
        if (n > 0) d.adds_lines = true;
    }
    return d;
}

MineResult mine_repo(const fs::path& repo, const CommitFilter& filter) {
    if (filter.keywords.entries.empty()) throw FormatError("commit filter has no keywords");
    const Git git(repo);
    const auto repo_name = fs::absolute(repo).lexically_normal().filename().string();
    MineResult result;
    SampleSet files, functions;

    const auto log = git.run({"log", "--reverse", "--format=%H %P", "HEAD"});
    for (const auto& entry : split(log, '\n')) {
        const auto parts = split(trim(entry), ' ');
        if (parts.empty() || parts[0].empty()) continue;
        ++result.stats.commits_scanned;
        if (parts.size() > 2) {
            ++result.stats.merges_skipped;
            continue;
        }
        if (parts.size() < 2) continue;  // root commit: no pre-patch version
        const auto& sha = parts[0];
        const auto& parent = parts[1];

        const auto classes = filter.keywords.match(git.run({"show", "-s", "--format=%B", sha}));
        if (classes.empty()) continue;
        ++result.stats.matched;
        if (classes.size() > 1) {
            if (filter.multi_label_exclude) {
                ++result.stats.excluded_multi_label;
                continue;
            }
        }
        const Label label = classes.front();

        const auto status = split(git.run({"diff-tree", "-r", "-z", "--no-commit-id", "--no-renames",
                                           "--name-status", parent, sha}),
                                  '\0');
        std::vector<std::pair<char, std::string>> changes;
        for (std::size_t i = 0; i + 1 < status.size(); i += 2) changes.emplace_back(status[i].at(0), status[i + 1]);
        if (changes.size() > filter.max_files_changed) {
            ++result.stats.excluded_too_many_files;
            continue;
        }

        std::set<std::string> touched;
        std::vector<Sample> commit_files, commit_functions;
        for (const auto& [kind, path] : changes) {
            touched.insert(path);
            if (kind != 'M' || !has_php_extension(path)) continue;
            const auto diff = parse_unified_diff(
                git.run({"diff", "-U0", "--no-color", "--no-renames", "--no-ext-diff", parent, sha, "--", path}));
            if (filter.drop_delete_only && diff.delete_only()) continue;
            auto code = git.run({"cat-file", "blob", parent + ":" + path});
            if (code.empty()) continue;
            const auto origin = repo_name + "@" + sha + ":" + path;

            std::vector<php::FunctionSpan> spans;
            try {
                spans = php::extract_functions(code);
            } catch (const SourceError&) {
                ++result.stats.parse_failures;
            }
            std::vector<IntervalTree::Interval> ivs;
            for (std::size_t i = 0; i < spans.size(); ++i) ivs.push_back({spans[i].start_line, spans[i].end_line, i});
            const IntervalTree tree(std::move(ivs));
            std::vector<bool> hit(spans.size(), false);
            for (auto line : diff.removed) {
                for (auto i : tree.stab(line)) hit[i] = true;
            }
            for (auto a : diff.insert_after) {
                const auto lo = tree.stab(a), hi = tree.stab(a + 1);
                std::vector<std::size_t> both;
                std::set_intersection(lo.begin(), lo.end(), hi.begin(), hi.end(), std::back_inserter(both));
                for (auto i : both) hit[i] = true;
            }
            for (std::size_t i = 0; i < spans.size(); ++i) {
                if (spans[i].body.empty()) continue;
                commit_functions.push_back(make_sample(spans[i].body, Granularity::Function,
                                                       hit[i] ? label : Label::Safe,
                                                       {ProvenanceKind::GitMined, origin + "#" + spans[i].name}));
            }
            commit_files.push_back(make_sample(std::move(code), Granularity::File, label,
                                               {ProvenanceKind::GitMined, origin}));
        }
        if (commit_files.empty()) {
            ++result.stats.excluded_no_usable_change;
            continue;
        }
        ++result.stats.used;

        std::size_t negatives = 0;
        for (const auto& path : split(git.run({"ls-tree", "-r", "-z", "--name-only", parent}), '\0')) {
            if (path.empty() || touched.contains(path) || !has_php_extension(path)) continue;
            if (filter.max_negatives_per_commit && negatives >= *filter.max_negatives_per_commit) break;
            auto code = git.run({"cat-file", "blob", parent + ":" + path});
            if (code.empty()) continue;
            commit_files.push_back(make_sample(std::move(code), Granularity::File, Label::Safe,
                                               {ProvenanceKind::GitMined, repo_name + "@" + sha + ":" + path}));
            ++negatives;
        }
        for (auto& s : commit_files) files.add(std::move(s));
        for (auto& s : commit_functions) functions.add(std::move(s));
    }
    result.files = files.take();
    result.functions = functions.take();
    return result;
}

}  // namespace phpvd::corpus
