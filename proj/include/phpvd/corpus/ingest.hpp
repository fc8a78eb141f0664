// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "phpvd/corpus/label.hpp"
#include "phpvd/corpus/sample.hpp"
#include "phpvd/php/keep_list.hpp"

namespace phpvd::corpus {

/// "path,label" lines; an optional "path,label" header and blank lines are
/// skipped. Throws FormatError on a bad line or a repeated path.
std::map<std::string, Label> parse_manifest(std::string_view text);
std::map<std::string, Label> load_manifest(const std::filesystem::path& path);

/// Hash of the normalized file-level token surfaces. Two files that differ
/// only in comments, whitespace, HTML or abstracted names share a key.
/// Falls back to the raw text when the code does not lex.
std::string normalized_key(std::string_view code, const php::KeepList& keep = php::KeepList());

/// Reads every .php file under `dir` (recursive, case-insensitive extension),
/// labels it from the manifest and drops files whose normalized_key was seen
/// earlier in path order. Throws ManifestMismatch when a file has no label or
/// a manifest entry has no file.
std::vector<Sample> ingest_synthetic(const std::filesystem::path& dir,
                                     const std::filesystem::path& manifest,
                                     const php::KeepList& keep = php::KeepList());

/// Regular .php files under dir, sorted, symlinks not followed.
std::vector<std::filesystem::path> find_php_files(const std::filesystem::path& dir);

bool has_php_extension(const std::filesystem::path& p);

}  // namespace phpvd::corpus
