// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <string>
#include <vector>

#include "phpvd/common/error.hpp"
#include "phpvd/corpus/miner.hpp"
#include "support/git_fixture.hpp"
#include "support/mined.hpp"
#include "support/temp_dir.hpp"

using namespace phpvd;
using namespace phpvd::corpus;

TEST_CASE("keyword matching is case-insensitive and word-bounded") {
    const auto k = KeywordSet::defaults();
    CHECK(k.match("Fix XSS in search box") == std::vector<Label>{Label::XSS});
    CHECK(k.match("prevent SQL Injection") == std::vector<Label>{Label::SQLi});
    CHECK(k.match("block OS command injection") == std::vector<Label>{Label::OSCI});
    CHECK(k.match("fix xss and sqli").size() == 2);
    CHECK(k.match("rename xssfilter helper").empty());
    CHECK(k.match("update readme").empty());
}

TEST_CASE("keyword files") {
    const auto k = KeywordSet::parse("# comment\nXSS, Cross-Site\n\nOSCI,popen abuse\n");
    REQUIRE(k.entries.size() == 2);
    CHECK(k.entries[0] == std::pair<Label, std::string>{Label::XSS, "cross-site"});
    CHECK(k.match("Stop popen abuse") == std::vector<Label>{Label::OSCI});
    CHECK_THROWS_AS(KeywordSet::parse("XSS\n"), FormatError);
    CHECK_THROWS_AS(KeywordSet::parse("Safe,ok\n"), FormatError);
    CHECK_THROWS_AS(KeywordSet::parse("# nothing\n"), FormatError);
}

TEST_CASE("unified diff hunks") {
    const auto d = parse_unified_diff(
        "diff --git a/x.php b/x.php\n"
        "--- a/x.php\n+++ b/x.php\n"
        "@@ -4 +4 @@ function f()\n-old\n+new\n"
        "@@ -9,2 +9,0 @@\n-a\n-b\n"
        "@@ -12,0 +11,3 @@\n+x\n+y\n+z\n");
    CHECK(d.removed == std::vector<std::size_t>{4, 9, 10});
    CHECK(d.insert_after == std::vector<std::size_t>{12});
    CHECK(d.adds_lines);
    CHECK_FALSE(d.delete_only());

    const auto del = parse_unified_diff("@@ -3,2 +2,0 @@\n-a\n-b\n");
    CHECK(del.delete_only());
    CHECK_THROWS_AS(parse_unified_diff("@@ nonsense @@\n"), GitError);
}

TEST_CASE("mining the fixture history") {
    TempDir dir;
    const auto repo = dir.path() / "fixture-repo";
    const auto want = testing_support::build_mining_fixture(repo);
    const auto r = mine_repo(repo);

    CHECK(r.stats.commits_scanned == 6);
    CHECK(r.stats.matched == 5);
    CHECK(r.stats.used == 2);
    CHECK(r.stats.excluded_too_many_files == 1);
    CHECK(r.stats.excluded_no_usable_change == 1);
    CHECK(r.stats.excluded_multi_label == 1);
    CHECK(r.stats.parse_failures == 0);

    const auto files = testing_support::comparable(r.files);
    const auto functions = testing_support::comparable(r.functions);
    CHECK(files.size() == 30);
    CHECK(files == want.files);
    CHECK(functions == want.functions);
    for (const auto& s : r.files) {
        CHECK(s.granularity == Granularity::File);
        CHECK(s.provenance.kind == ProvenanceKind::GitMined);
        CHECK(s.provenance.origin.starts_with("fixture-repo@"));
    }
}

TEST_CASE("negative cap and non-repositories") {
    TempDir dir;
    const auto repo = dir.path() / "r";
    testing_support::build_mining_fixture(repo);
    CommitFilter f;
    f.max_negatives_per_commit = 2;
    const auto r = mine_repo(repo, f);
    // Commit 1: a.php plus two negatives; commit 2: b.php (already present) plus two.
    std::size_t safe = 0;
    for (const auto& s : r.files) safe += s.label == Label::Safe ? 1 : 0;
    CHECK(r.files.size() - safe == 2);
    CHECK(safe <= 4);

    CHECK_THROWS_AS(mine_repo(dir.path() / "missing"), GitError);
}
