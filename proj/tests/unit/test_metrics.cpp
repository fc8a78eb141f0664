// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "phpvd/common/error.hpp"
#include "phpvd/metrics/confusion.hpp"
#include "support/count_rows.hpp"

using namespace phpvd;
using namespace phpvd::metrics;
using testing_support::from_binary_counts;

namespace {

ConfusionReport report_for(std::size_t tn, std::size_t fn, std::size_t tp, std::size_t fp) {
    const auto v = from_binary_counts(tn, fn, tp, fp);
    return confusion(v.truth, v.pred);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream in(line);
    std::string cell;
    while (std::getline(in, cell, ',')) out.push_back(cell);
    return out;
}

}  // namespace

TEST_CASE("file-level git row") {
    const auto r = report_for(240, 32, 241, 33);
    CHECK(r.tn == 240);
    CHECK(r.fn == 32);
    CHECK(r.tp == 241);
    CHECK(r.fp == 33);
    CHECK(std::abs(r.precision() - 87.96) <= 0.01);
    CHECK(std::abs(r.recall() - 88.28) <= 0.01);
    CHECK(std::abs(r.f1() - 88.12) <= 0.01);
    CHECK(std::abs(r.accuracy() - 88.10) <= 0.01);
}

TEST_CASE("function-level SARD row") {
    const auto r = report_for(277, 0, 149, 16);
    CHECK(std::abs(r.accuracy() - 96.38) <= 0.01);
    CHECK(std::abs(r.precision() - 90.30) <= 0.01);
    CHECK(r.recall() == 100.0);
    CHECK(std::abs(r.f1() - 94.90) <= 0.01);
}

TEST_CASE("within-Unsafe confusion is a binary hit but a multiclass miss") {
    const std::vector<Label> truth{Label::XSS, Label::SQLi};
    const std::vector<Label> pred{Label::SQLi, Label::SQLi};
    const auto r = confusion(truth, pred);
    CHECK(r.tp == 2);
    CHECK(r.accuracy() == 100.0);
    CHECK(r.multiclass_accuracy() == 50.0);
    CHECK(r.matrix[1][2] == 1);
    CHECK(r.matrix[2][2] == 1);
}

TEST_CASE("perfect balanced predictions") {
    std::vector<Label> truth;
    for (auto l : kAllLabels) truth.insert(truth.end(), 5, l);
    const auto r = confusion(truth, truth);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) CHECK(r.matrix[i][j] == (i == j ? 5u : 0u));
    }
    CHECK(r.f1() == 100.0);
    CHECK(r.multiclass_accuracy() == 100.0);
}

TEST_CASE("count conservation and zero denominators") {
    const auto v = from_binary_counts(7, 3, 0, 0);
    const auto r = confusion(v.truth, v.pred);
    CHECK(r.total() == v.truth.size());
    CHECK(r.precision() == 0.0);
    CHECK(r.recall() == 0.0);
    CHECK(r.f1() == 0.0);
    CHECK(format_percent(r.precision()) == "0.00");
}

TEST_CASE("swapping equal-label pairs leaves the report unchanged") {
    auto v = from_binary_counts(10, 4, 9, 3);
    const auto before = confusion(v.truth, v.pred);
    std::swap(v.truth[0], v.truth[1]);
    std::swap(v.pred[0], v.pred[1]);
    std::swap(v.truth[11], v.truth[20]);
    std::swap(v.pred[11], v.pred[20]);
    CHECK(confusion(v.truth, v.pred) == before);
}

TEST_CASE("F1 never exceeds the larger of precision and recall") {
    for (std::size_t tp = 0; tp < 6; ++tp) {
        for (std::size_t fp = 0; fp < 6; ++fp) {
            for (std::size_t fn = 0; fn < 6; ++fn) {
                const auto r = report_for(2, fn, tp, fp);
                CHECK(r.f1() >= 0.0);
                CHECK(r.f1() <= std::max(r.precision(), r.recall()) + 1e-12);
            }
        }
    }
}

TEST_CASE("length checks") {
    const std::vector<Label> a{Label::Safe}, b{Label::Safe, Label::XSS}, none;
    CHECK_THROWS_AS(confusion(a, b), LengthMismatch);
    CHECK_THROWS_AS(confusion(none, none), LengthMismatch);
    CHECK_THROWS_AS(per_class_correct(a, b), LengthMismatch);
}

TEST_CASE("per-class correct fractions") {
    std::vector<Label> truth(10, Label::XSS);
    std::vector<Label> pred(6, Label::XSS);
    pred.insert(pred.end(), 3, Label::SQLi);
    pred.push_back(Label::Safe);
    const auto pc = per_class_correct(truth, pred);
    REQUIRE(pc[1].has_value());
    CHECK(*pc[1] == doctest::Approx(0.6));
    CHECK_FALSE(pc[0].has_value());
    CHECK_FALSE(pc[2].has_value());

    std::vector<Label> mixed;
    for (auto l : kAllLabels) mixed.insert(mixed.end(), 3, l);
    const std::vector<Label> always_safe(mixed.size(), Label::Safe);
    const auto s = per_class_correct(mixed, always_safe);
    CHECK(*s[0] == 1.0);
    CHECK(*s[1] == 0.0);
    CHECK(*s[3] == 0.0);
    const auto perfect = per_class_correct(mixed, mixed);
    for (const auto& p : perfect) CHECK(*p == 1.0);
}

TEST_CASE("rendered tables") {
    const std::vector<NamedReport> rows{{"File-A GIT", report_for(240, 32, 241, 33)}};
    const auto csv = render_csv(rows);
    std::stringstream in(csv);
    std::string header, row, extra;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "name,TN,FN,TP,FP,Accuracy,Precision,Recall,F1,MulticlassAccuracy");
    const auto cells = split_csv(row);
    REQUIRE(cells.size() == 10);
    CHECK(cells[0] == "File-A GIT");
    CHECK(cells[1] == "240");
    CHECK(cells[4] == "33");
    CHECK(cells[6] == "87.96");
    CHECK(cells[7] == "88.28");
    CHECK(cells[8] == "88.12");
    CHECK_FALSE(std::getline(in, extra));

    const auto text = render_text(rows);
    CHECK(text.find("87.96") != std::string::npos);
    CHECK(text.find("File-A GIT") != std::string::npos);
    CHECK(format_percent(100.0) == "100.00");
}
