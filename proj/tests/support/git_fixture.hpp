// SPDX-License-Identifier: Apache-2.0
// A small git history with five fix commits and the samples mining must
// produce from it.
#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "phpvd/common/process.hpp"
#include "phpvd/corpus/label.hpp"

namespace testing_support {

namespace git_fixture_detail {

inline void git(const std::filesystem::path& repo, std::vector<std::string> args) {
    std::vector<std::string> argv{"git", "-C", repo.string(), "-c", "user.name=Fixture", "-c",
                                  "user.email=fixture@example.invalid", "-c", "commit.gpgsign=false"};
    argv.insert(argv.end(), args.begin(), args.end());
    const auto r = phpvd::run_process(argv);
    if (r.exit_code != 0) throw std::runtime_error("git fixture: " + r.err);
}

inline void commit(const std::filesystem::path& repo, const std::string& message) {
    git(repo, {"add", "-A"});
    git(repo, {"commit", "-q", "-m", message});
}

inline std::string bulk_name(int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "bulk/%02d.php", i);
    return buf;
}

inline std::string bulk_code(int i, bool patched) {
    return "<?php\necho \"page " + std::to_string(i) + "\";\n" + (patched ? "// escaped\n" : "");
}

}  // namespace git_fixture_detail

struct ExpectedSample {
    phpvd::Label label;
    std::string path;  // file path, or path#function for function samples
    std::string code;

    auto key() const { return std::tie(path, label, code); }
    bool operator<(const ExpectedSample& o) const { return key() < o.key(); }
    bool operator==(const ExpectedSample& o) const { return key() == o.key(); }
};

struct MiningFixture {
    std::vector<ExpectedSample> files;
    std::vector<ExpectedSample> functions;
};

inline const char* kFileA0 =
    "<?php\n"
    "function f($x) {\n"
    "    $q = $_GET['q'];\n"
    "    echo $q;\n"
    "}\n"
    "function g() {\n"
    "    return 1;\n"
    "}\n";
inline const char* kFileA1 =
    "<?php\n"
    "function f($x) {\n"
    "    $q = $_GET['q'];\n"
    "    echo htmlspecialchars($q);\n"
    "}\n"
    "function g() {\n"
    "    return 1;\n"
    "}\n";
inline const char* kFileB0 =
    "<?php\n"
    "function h($db) {\n"
    "    $id = $_GET['id'];\n"
    "    mysqli_query($db, \"SELECT * FROM t WHERE id=\" . $id);\n"
    "}\n"
    "function k() {\n"
    "    return 2;\n"
    "}\n";
inline const char* kFileB1 =
    "<?php\n"
    "function h($db) {\n"
    "    $id = $_GET['id'];\n"
    "    $id = intval($id);\n"
    "    mysqli_query($db, \"SELECT * FROM t WHERE id=\" . $id);\n"
    "}\n"
    "function k() {\n"
    "    return 2;\n"
    "}\n";
inline const char* kFileC = "<?php\necho \"static\";\necho \"debug\";\n";
inline const char* kFileD = "<?php\n$x = 1;\necho $x;\n";

/// Root commit plus five fix commits:
///   1 "Fix XSS in greeting"            a.php line 4 replaced inside f
///   2 "Prevent SQL injection in lookup" pure insertion inside h (b.php)
///   3 "Fix XSS across templates"        touches 25 files (over the cap)
///   4 "Remove XSS debug output"         delete-only change to c.php
///   5 "Fix XSS and SQL injection in d"  two vulnerability classes
/// Only commits 1 and 2 yield samples.
inline MiningFixture build_mining_fixture(const std::filesystem::path& repo) {
    using namespace git_fixture_detail;
    using phpvd::Label;
    using phpvd::write_file;
    std::filesystem::create_directories(repo / "lib");
    std::filesystem::create_directories(repo / "bulk");
    git(repo, {"init", "-q"});

    write_file(repo / "a.php", kFileA0);
    write_file(repo / "b.php", kFileB0);
    write_file(repo / "c.php", kFileC);
    write_file(repo / "lib/d.php", kFileD);
    write_file(repo / "README.md", "fixture\n");
    for (int i = 1; i <= 25; ++i) write_file(repo / bulk_name(i), bulk_code(i, false));
    commit(repo, "Initial import");

    write_file(repo / "a.php", kFileA1);
    commit(repo, "Fix XSS in greeting");

    write_file(repo / "b.php", kFileB1);
    commit(repo, "Prevent SQL injection in lookup");

    for (int i = 1; i <= 25; ++i) write_file(repo / bulk_name(i), bulk_code(i, true));
    commit(repo, "Fix XSS across templates");

    write_file(repo / "c.php", "<?php\necho \"static\";\n");
    commit(repo, "Remove XSS debug output");

    write_file(repo / "lib/d.php", "<?php\n$x = (int) 1;\necho $x;\n");
    commit(repo, "Fix XSS and SQL injection in d");

    MiningFixture m;
    m.files.push_back({Label::XSS, "a.php", kFileA0});
    m.files.push_back({Label::SQLi, "b.php", kFileB0});  // Safe negative in commit 1, Unsafe wins
    m.files.push_back({Label::Safe, "a.php", kFileA1});  // negative of commit 2
    m.files.push_back({Label::Safe, "c.php", kFileC});
    m.files.push_back({Label::Safe, "lib/d.php", kFileD});
    for (int i = 1; i <= 25; ++i) m.files.push_back({Label::Safe, bulk_name(i), bulk_code(i, false)});

    m.functions.push_back({Label::XSS, "a.php#f", "function f($x) {\n    $q = $_GET['q'];\n    echo $q;\n}"});
    m.functions.push_back({Label::Safe, "a.php#g", "function g() {\n    return 1;\n}"});
    m.functions.push_back({Label::SQLi, "b.php#h",
                           "function h($db) {\n    $id = $_GET['id'];\n    mysqli_query($db, \"SELECT * FROM t WHERE id=\" . $id);\n}"});
    m.functions.push_back({Label::Safe, "b.php#k", "function k() {\n    return 2;\n}"});
    std::sort(m.files.begin(), m.files.end());
    std::sort(m.functions.begin(), m.functions.end());
    return m;
}

}  // namespace testing_support
