// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>

namespace phpvd::php {

/// PHP function names that survive abstraction verbatim (sinks, sanitizers
/// and a few sources). Names are stored lowercase.
class KeepList {
public:
    /// The shipped defaults.
    KeepList();
    explicit KeepList(std::set<std::string> names);

    /// Plain text, one name per line, '#' starts a comment.
    static KeepList parse(std::string_view text);
    static KeepList load(const std::filesystem::path& path);
    std::string serialize() const;

    bool contains(std::string_view name) const;
    const std::set<std::string>& names() const noexcept { return names_; }

    bool operator==(const KeepList&) const = default;

private:
    std::set<std::string> names_;
};

}  // namespace phpvd::php
