// SPDX-License-Identifier: Apache-2.0
#include "phpvd/php/keep_list.hpp"

#include <sstream>

#include "phpvd/common/error.hpp"
#include "phpvd/common/process.hpp"
#include "phpvd/php/token.hpp"

namespace phpvd::php {

namespace {

const std::set<std::string>& default_names() {
    static const std::set<std::string> kDefaults = {
        "echo",
        // sinks
        "query", "exec", "system", "shell_exec", "passthru", "popen", "proc_open",
        "mysql_query", "mysqli_query", "pg_query", "sqlite_query", "mysqli_multi_query",
        "prepare", "execute", "get_results", "get_var", "get_row",
        "print_r", "printf", "vprintf", "var_dump", "update_option", "header",
        // sanitizers
        "strip_tags", "htmlspecialchars", "htmlentities", "intval", "floatval",
        "addslashes", "mysql_real_escape_string", "mysqli_real_escape_string",
        "pg_escape_string", "escapeshellarg", "escapeshellcmd", "esc_html",
        "esc_attr", "esc_sql", "esc_url", "sanitize_text_field", "filter_var",
        "urlencode", "rawurlencode", "is_numeric", "settype",
        // common transformers
        "json_encode", "http_build_query", "sprintf", "implode", "trim",
        "urldecode", "base64_decode", "str_replace", "strtolower", "stripslashes",
        "strlen", "explode",
        // database plumbing
        "mysqli_connect", "mysqli_error", "mysqli_connect_error",
    };
    return kDefaults;
}

}  // namespace

KeepList::KeepList() : names_(default_names()) {}

KeepList::KeepList(std::set<std::string> names) {
    for (const auto& n : names) names_.insert(to_lower(n));
    if (names_.empty()) throw FormatError("keep list must not be empty");
}

KeepList KeepList::parse(std::string_view text) {
    std::set<std::string> names;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        names.insert(line.substr(b, e - b + 1));
    }
    return KeepList(std::move(names));
}

KeepList KeepList::load(const std::filesystem::path& path) { return parse(read_file(path)); }

std::string KeepList::serialize() const {
    std::string out;
    for (const auto& n : names_) {
        out += n;
        out += '\n';
    }
    return out;
}

bool KeepList::contains(std::string_view name) const { return names_.contains(to_lower(name)); }

}  // namespace phpvd::php
