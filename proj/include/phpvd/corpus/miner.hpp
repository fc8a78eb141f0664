// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "phpvd/corpus/label.hpp"
#include "phpvd/corpus/sample.hpp"

namespace phpvd::corpus {

/// Commit-message keywords per vulnerability class.
struct KeywordSet {
    std::vector<std::pair<Label, std::string>> entries;  // lowercase keywords

    static KeywordSet defaults();
    /// "label,keyword" per line, '#' comments. Throws FormatError.
    static KeywordSet parse(std::string_view text);
    static KeywordSet load(const std::filesystem::path& path);

    /// Classes whose keywords occur in `message` (case-insensitive, the
    /// keyword must not be glued to letters or digits on either side).
    std::vector<Label> match(std::string_view message) const;
};

struct CommitFilter {
    KeywordSet keywords = KeywordSet::defaults();
    std::size_t max_files_changed = 20;
    bool drop_delete_only = true;
    bool multi_label_exclude = true;
    /// Cap on Safe file negatives per commit (untouched PHP files); none = all.
    std::optional<std::size_t> max_negatives_per_commit;
};

struct MineStats {
    std::size_t commits_scanned = 0;
    std::size_t merges_skipped = 0;
    std::size_t matched = 0;
    std::size_t excluded_multi_label = 0;
    std::size_t excluded_too_many_files = 0;
    std::size_t excluded_no_usable_change = 0;  // only added/deleted/delete-only PHP changes
    std::size_t used = 0;
    std::size_t parse_failures = 0;
};

struct MineResult {
    std::vector<Sample> files;
    std::vector<Sample> functions;
    MineStats stats;
    /// No commit produced a sample. Not an error.
    bool no_matches() const noexcept { return files.empty() && functions.empty(); }
};

/// Patched old-side lines of one file's unified diff (-U0).
struct FileDiff {
    std::vector<std::size_t> removed;              // old lines deleted or replaced
    std::vector<std::size_t> insert_after;         // old line a for every "-a,0" hunk
    bool adds_lines = false;

    bool delete_only() const noexcept { return !adds_lines; }
};

FileDiff parse_unified_diff(std::string_view diff);

/// Walks the history of `repo` oldest first. For every non-merge commit whose
/// message names exactly one class and which changes at most
/// max_files_changed files, the pre-patch (first parent) version of every
/// modified PHP file becomes an Unsafe file sample; its functions that
/// contain a patched line become Unsafe function samples and the rest Safe
/// ones; untouched PHP files of the parent tree become Safe file samples.
/// Added, deleted and delete-only files are ignored. Samples are
/// deduplicated by id; on a label conflict the Unsafe label wins.
/// Throws GitError when git fails.
MineResult mine_repo(const std::filesystem::path& repo, const CommitFilter& filter = {});

}  // namespace phpvd::corpus
