// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phpvd/corpus/label.hpp"

namespace phpvd::metrics {

/// Multiclass counts plus the binary Safe / Unsafe view. A prediction of the
/// wrong Unsafe class for an Unsafe sample still counts as a binary TP.
struct ConfusionReport {
    std::array<std::array<std::size_t, kNumLabels>, kNumLabels> matrix{};  // [truth][pred]
    std::size_t tn = 0, fn = 0, tp = 0, fp = 0;

    std::size_t total() const noexcept { return tn + fn + tp + fp; }

    // Percentages in [0, 100]; 0 when the denominator is 0.
    double accuracy() const noexcept;
    double multiclass_accuracy() const noexcept;
    double precision() const noexcept;
    double recall() const noexcept;
    double f1() const noexcept;

    bool operator==(const ConfusionReport&) const = default;
};

/// Throws LengthMismatch when sizes differ or the input is empty.
ConfusionReport confusion(std::span<const Label> truth, std::span<const Label> pred);

/// Fraction of exact-class hits per class; nullopt for classes absent from truth.
std::array<std::optional<double>, kNumLabels> per_class_correct(std::span<const Label> truth,
                                                                std::span<const Label> pred);

using NamedReport = std::pair<std::string, ConfusionReport>;

/// Header "name,TN,FN,TP,FP,Accuracy,Precision,Recall,F1,MulticlassAccuracy"
/// then one row per report; percentages with two decimals.
std::string render_csv(std::span<const NamedReport> reports);

/// Fixed-width text version of the same table.
std::string render_text(std::span<const NamedReport> reports);

/// "12.34" style formatting used by both renderers.
std::string format_percent(double v);

}  // namespace phpvd::metrics
