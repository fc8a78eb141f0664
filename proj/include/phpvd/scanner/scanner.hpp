// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "phpvd/cfg/cfg.hpp"
#include "phpvd/common/granularity.hpp"
#include "phpvd/corpus/label.hpp"
#include "phpvd/model/checkpoint.hpp"

namespace phpvd::scanner {

struct Finding {
    std::string path;  // relative to the scanned directory, '/' separated
    Granularity granularity = Granularity::File;
    std::string function;  // empty for file-level findings
    std::size_t start_line = 0;
    std::size_t end_line = 0;
    Label label = Label::Safe;
    std::array<double, kNumLabels> probabilities{};
    Label file_label = Label::Safe;  // stage-1 verdict that triggered stage 2

    bool operator==(const Finding&) const = default;
};

struct PerfReport {
    std::uintmax_t size_bytes = 0;  // every regular file under the directory
    std::size_t php_files = 0;
    std::size_t loc = 0;
    double processing_seconds = 0.0;  // lex + normalize + CFG
    double inference_seconds = 0.0;   // forward passes

    double total_seconds() const noexcept { return processing_seconds + inference_seconds; }
    double time_per_loc() const noexcept { return loc ? total_seconds() / static_cast<double>(loc) : 0.0; }
    double time_per_file() const noexcept {
        return php_files ? total_seconds() / static_cast<double>(php_files) : 0.0;
    }
    bool operator==(const PerfReport&) const = default;
};

struct Skip {
    std::string path;
    std::string reason;
};

struct ScanResult {
    std::vector<Finding> findings;  // sorted by (path, start_line)
    PerfReport perf;
    std::vector<std::string> flagged;  // stage-1 Unsafe files, sorted
    std::vector<Skip> skipped;
    std::size_t files_scanned = 0;
    std::size_t functions_classified = 0;
    double wall_seconds = 0.0;
};

struct ScanOptions {
    std::size_t threads = 1;
    /// Called with (relative path, CFG) for every file-level graph built.
    std::function<void(const std::string&, const cfg::Cfg&)> on_cfg;
};

/// Physical lines: the number of '\n' plus one for a non-empty final line
/// without a newline. Throws IoError.
std::size_t count_loc(const std::filesystem::path& file);
std::size_t count_loc_text(std::string_view text);

/// Stage 1 runs the file-level model on every PHP file; stage 2 runs the
/// function-level model on the functions of flagged files. Throws
/// ConfigMismatch when the models have the wrong granularities.
ScanResult scan(const std::filesystem::path& dir, const model::Model& file_model, const model::Model& func_model,
                const ScanOptions& options = {});

/// Loads both checkpoints first (MissingCheckpoint aborts).
ScanResult scan(const std::filesystem::path& dir, const std::filesystem::path& file_ckpt,
                const std::filesystem::path& func_ckpt, const ScanOptions& options = {});

enum class ReportFormat { Text, Json };

std::string report(const ScanResult& r, ReportFormat format);

}  // namespace phpvd::scanner
