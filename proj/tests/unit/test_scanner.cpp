// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <json.hpp>

#include <fstream>
#include <set>
#include <string>

#include "phpvd/common/error.hpp"
#include "phpvd/common/process.hpp"
#include "phpvd/corpus/synthetic.hpp"
#include "phpvd/model/checkpoint.hpp"
#include "phpvd/model/featurizer.hpp"
#include "phpvd/scanner/scanner.hpp"
#include "support/small_model.hpp"
#include "support/temp_dir.hpp"

using namespace phpvd;
using namespace phpvd::scanner;

namespace {

model::Model small_model(Granularity g, std::uint64_t seed) {
    const auto samples = corpus::generate_synthetic(2, seed, g);
    php::KeepList keep;
    auto vocab = model::build_vocabulary(samples, g, keep);
    const auto arch = testing_support::small_arch(g, vocab.size());
    return model::Model{model::ModelParams::init(arch, seed), std::move(vocab), keep};
}

// Counts lines the way wc -l does, plus an unterminated last line.
std::size_t wc_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text) n += c == '\n';
    if (!text.empty() && text.back() != '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("line counting") {
    CHECK(count_loc_text("") == 0);
    CHECK(count_loc_text("a\nb\n") == 2);
    CHECK(count_loc_text("a\nb") == 2);
    CHECK(count_loc_text("\n\n\n") == 3);
    std::string text;
    for (int i = 0; i < 47; ++i) text += i % 5 == 0 ? "\n" : "line " + std::to_string(i) + "\n";
    CHECK(count_loc_text(text) == wc_lines(text));
    CHECK(count_loc_text(text) == 47);

    TempDir dir;
    write_file(dir.path() / "f.php", text);
    CHECK(count_loc(dir.path() / "f.php") == 47);
    CHECK_THROWS_AS(count_loc(dir.path() / "none.php"), IoError);
}

TEST_CASE("perf derived fields") {
    PerfReport p;
    p.loc = 200;
    p.php_files = 4;
    p.processing_seconds = 0.5;
    p.inference_seconds = 1.5;
    CHECK(p.total_seconds() == 2.0);
    CHECK(p.time_per_loc() == 2.0 / 200.0);
    CHECK(p.time_per_file() == 0.5);
    CHECK(PerfReport{}.time_per_loc() == 0.0);
}

TEST_CASE("report ordering and formats") {
    ScanResult r;
    Finding late;
    late.path = "a.php";
    late.granularity = Granularity::Function;
    late.function = "late";
    late.start_line = 30;
    late.end_line = 40;
    late.label = Label::SQLi;
    late.probabilities = {0.1, 0.1, 0.7, 0.1};
    late.file_label = Label::SQLi;
    Finding early = late;
    early.function = "early";
    early.start_line = 3;
    early.end_line = 9;
    Finding other = late;
    other.path = "0.php";
    r.findings = {late, early, other};
    r.perf.loc = 10;
    r.perf.php_files = 2;

    const auto text = report(r, ReportFormat::Text);
    const auto p0 = text.find("0.php"), pe = text.find("early"), pl = text.rfind("late");
    CHECK(p0 < pe);
    CHECK(pe < pl);

    const auto j = nlohmann::json::parse(report(r, ReportFormat::Json));
    REQUIRE(j["findings"].size() == 3);
    CHECK(j["findings"][1]["function"] == "early");
    CHECK(j["findings"][1]["start_line"] == 3);
    CHECK(j["findings"][0]["label"] == "SQLi");
    CHECK(j["perf"]["loc"] == 10);
    CHECK(nlohmann::json::parse(j.dump()) == j);

    const ScanResult empty;
    const auto t = report(empty, ReportFormat::Text);
    CHECK(t.starts_with("path\tgranularity"));
    CHECK(t.find("size_bytes") != std::string::npos);
    CHECK(nlohmann::json::parse(report(empty, ReportFormat::Json))["findings"].empty());
}

TEST_CASE("scan layering, skips and timing") {
    const auto file_model = small_model(Granularity::File, 1);
    const auto func_model = small_model(Granularity::Function, 2);
    TempDir dir;
    const auto samples = corpus::generate_synthetic(2, 9, Granularity::File);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        write_file(dir.path() / ("src/f" + std::to_string(i) + ".php"), samples[i].code);
    }
    write_file(dir.path() / "broken.PHP", "<?php\n$s = 'never closed;\n");
    write_file(dir.path() / "notes.txt", "not php\n");

    std::size_t cfgs = 0;
    ScanOptions opts;
    opts.threads = 2;
    opts.on_cfg = [&](const std::string&, const cfg::Cfg&) { ++cfgs; };
    const auto r = scan(dir.path(), file_model, func_model, opts);

    CHECK(r.perf.php_files == samples.size() + 1);
    CHECK(r.files_scanned + r.skipped.size() == r.perf.php_files);
    REQUIRE(r.skipped.size() == 1);
    CHECK(r.skipped[0].path == "broken.PHP");
    CHECK(cfgs == r.files_scanned);

    std::size_t loc = 0;
    for (const auto& s : samples) loc += wc_lines(s.code);
    loc += 2;
    CHECK(r.perf.loc == loc);

    const std::set<std::string> flagged(r.flagged.begin(), r.flagged.end());
    for (const auto& f : r.findings) {
        CHECK(is_unsafe(f.label));
        CHECK(flagged.contains(f.path));
        CHECK(f.start_line >= 1);
        CHECK(f.start_line <= f.end_line);
    }
    CHECK(r.perf.processing_seconds >= 0.0);
    CHECK(r.perf.inference_seconds >= 0.0);
    CHECK(r.perf.total_seconds() <= r.wall_seconds);
    CHECK(r.perf.time_per_file() == r.perf.total_seconds() / static_cast<double>(r.perf.php_files));

    const auto again = scan(dir.path(), file_model, func_model);
    CHECK(again.findings == r.findings);
    CHECK(again.flagged == r.flagged);
}

TEST_CASE("scan argument errors") {
    const auto file_model = small_model(Granularity::File, 1);
    const auto func_model = small_model(Granularity::Function, 2);
    TempDir dir;
    write_file(dir.path() / "a.php", "<?php\necho 1;\n");
    CHECK_THROWS_AS(scan(dir.path(), func_model, file_model), ConfigMismatch);
    CHECK_THROWS_AS(scan(dir.path(), dir.path() / "x.ckpt", dir.path() / "y.ckpt"), MissingCheckpoint);
}

TEST_CASE("fixture file line count agrees with a wc-style count") {
    const auto path = std::filesystem::path(PHPVD_FIXTURE_DIR) / "scan_project/lib/inflector.php";
    const auto text = read_file(path);
    CHECK(wc_lines(text) == 47);
    CHECK(count_loc(path) == 47);
}
