// SPDX-License-Identifier: Apache-2.0
#include "phpvd/metrics/confusion.hpp"

#include <cstdio>
#include <iomanip>
#include <sstream>

#include "phpvd/common/error.hpp"

namespace phpvd::metrics {

namespace {

double pct(double num, double den) noexcept { return den == 0.0 ? 0.0 : 100.0 * num / den; }

void check_lengths(std::span<const Label> truth, std::span<const Label> pred) {
    if (truth.size() != pred.size()) {
        throw LengthMismatch("truth has " + std::to_string(truth.size()) + " labels, pred has " +
                             std::to_string(pred.size()));
    }
    if (truth.empty()) throw LengthMismatch("no labels");
}

}  // namespace

double ConfusionReport::accuracy() const noexcept {
    return pct(static_cast<double>(tn + tp), static_cast<double>(total()));
}

double ConfusionReport::multiclass_accuracy() const noexcept {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < kNumLabels; ++i) hits += matrix[i][i];
    return pct(static_cast<double>(hits), static_cast<double>(total()));
}

double ConfusionReport::precision() const noexcept {
    return pct(static_cast<double>(tp), static_cast<double>(tp + fp));
}

double ConfusionReport::recall() const noexcept {
    return pct(static_cast<double>(tp), static_cast<double>(tp + fn));
}

double ConfusionReport::f1() const noexcept {
    const double p = precision(), r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

ConfusionReport confusion(std::span<const Label> truth, std::span<const Label> pred) {
    check_lengths(truth, pred);
    ConfusionReport rep;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++rep.matrix[index_of(truth[i])][index_of(pred[i])];
        const bool t = is_unsafe(truth[i]), p = is_unsafe(pred[i]);
        if (t && p) ++rep.tp;
        else if (t) ++rep.fn;
        else if (p) ++rep.fp;
        else ++rep.tn;
    }
    return rep;
}

std::array<std::optional<double>, kNumLabels> per_class_correct(std::span<const Label> truth,
                                                                std::span<const Label> pred) {
    check_lengths(truth, pred);
    std::array<std::size_t, kNumLabels> seen{}, hit{};
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++seen[index_of(truth[i])];
        if (truth[i] == pred[i]) ++hit[index_of(truth[i])];
    }
    std::array<std::optional<double>, kNumLabels> out;
    for (std::size_t c = 0; c < kNumLabels; ++c) {
        if (seen[c]) out[c] = static_cast<double>(hit[c]) / static_cast<double>(seen[c]);
    }
    return out;
}

std::string format_percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string render_csv(std::span<const NamedReport> reports) {
    std::string out = "name,TN,FN,TP,FP,Accuracy,Precision,Recall,F1,MulticlassAccuracy\n";
    for (const auto& [name, r] : reports) {
        out += name + "," + std::to_string(r.tn) + "," + std::to_string(r.fn) + "," + std::to_string(r.tp) +
               "," + std::to_string(r.fp) + "," + format_percent(r.accuracy()) + "," +
               format_percent(r.precision()) + "," + format_percent(r.recall()) + "," +
               format_percent(r.f1()) + "," + format_percent(r.multiclass_accuracy()) + "\n";
    }
    return out;
}

std::string render_text(std::span<const NamedReport> reports) {
    std::ostringstream os;
    os << std::left << std::setw(16) << "name" << std::right;
    for (const char* h : {"TN", "FN", "TP", "FP"}) os << std::setw(8) << h;
    for (const char* h : {"Acc", "Prec", "Recall", "F1", "MC-Acc"}) os << std::setw(9) << h;
    os << "\n";
    for (const auto& [name, r] : reports) {
        os << std::left << std::setw(16) << name << std::right;
        for (auto v : {r.tn, r.fn, r.tp, r.fp}) os << std::setw(8) << v;
        for (double v : {r.accuracy(), r.precision(), r.recall(), r.f1(), r.multiclass_accuracy()}) {
            os << std::setw(9) << format_percent(v);
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace phpvd::metrics
