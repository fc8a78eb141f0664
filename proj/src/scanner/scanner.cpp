// SPDX-License-Identifier: Apache-2.0
#include "phpvd/scanner/scanner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <optional>
#include <thread>

#include <json.hpp>

#include "phpvd/common/error.hpp"
#include "phpvd/common/process.hpp"
#include "phpvd/corpus/ingest.hpp"
#include "phpvd/model/network.hpp"
#include "phpvd/model/predictor.hpp"
#include "phpvd/php/functions.hpp"

namespace phpvd::scanner {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

void sort_findings(std::vector<Finding>& findings) {
    std::stable_sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
        return std::tie(a.path, a.start_line) < std::tie(b.path, b.start_line);
    });
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs job(i) for i in [0, n) on up to `threads` workers.
template <typename Job>
void parallel_for(std::size_t n, std::size_t threads, Job job) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (auto i = next++; i < n; i = next++) job(i);
    };
    const auto k = std::max<std::size_t>(1, std::min(threads, n));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < k; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
}

struct FileWork {
    std::string rel;
    std::string source;
    std::optional<model::Features> features;
    std::string error;
};

model::Prediction infer(const model::Model& m, const model::Features& f) {
    const tensor::NoGrad no_grad;
    return model::from_logits(model::forward(m.params, f, false).data());
}

std::string percent(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", p);
    return buf;
}

}  // namespace

std::size_t count_loc_text(std::string_view text) {
    const auto n = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
    return n + (!text.empty() && text.back() != '\n' ? 1 : 0);
}

std::size_t count_loc(const fs::path& file) { return count_loc_text(read_file(file)); }

ScanResult scan(const fs::path& dir, const model::Model& file_model, const model::Model& func_model,
                const ScanOptions& options) {
    const auto wall0 = Clock::now();
    if (file_model.arch().granularity != Granularity::File) throw ConfigMismatch("stage-1 model must be file-level");
    if (func_model.arch().granularity != Granularity::Function) {
        throw ConfigMismatch("stage-2 model must be function-level");
    }
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());

    ScanResult r;
    for (auto it = fs::recursive_directory_iterator(dir, fs::directory_options::none);
         it != fs::recursive_directory_iterator(); ++it) {
        if (it->is_symlink()) {
            if (it->is_directory()) it.disable_recursion_pending();
            continue;
        }
        if (it->is_regular_file()) r.perf.size_bytes += it->file_size();
    }

    std::vector<FileWork> files;
    for (const auto& p : corpus::find_php_files(dir)) {
        FileWork w;
        w.rel = p.lexically_relative(dir).generic_string();
        w.source = read_file(p);
        r.perf.loc += count_loc_text(w.source);
        files.push_back(std::move(w));
    }
    r.perf.php_files = files.size();

    // Stage 1.
    const auto f1 = file_model.featurizer();
    auto t0 = Clock::now();
    parallel_for(files.size(), options.threads, [&](std::size_t i) {
        try {
            files[i].features = f1(files[i].source);
        } catch (const LexError& e) {
            files[i].error = e.what();
        }
    });
    r.perf.processing_seconds += seconds_since(t0);

    std::vector<std::pair<std::size_t, model::Prediction>> flagged;
    t0 = Clock::now();
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (!files[i].features) continue;
        const auto p = infer(file_model, *files[i].features);
        if (is_unsafe(p.label)) flagged.emplace_back(i, p);
    }
    r.perf.inference_seconds += seconds_since(t0);

    for (const auto& w : files) {
        if (!w.features) {
            r.skipped.push_back({w.rel, w.error});
            continue;
        }
        ++r.files_scanned;
        if (options.on_cfg) options.on_cfg(w.rel, w.features->graph);
    }

    // Stage 2.
    struct FuncWork {
        std::size_t file;
        php::FunctionSpan span;
        std::optional<model::Features> features;
    };
    std::vector<FuncWork> funcs;
    std::vector<std::size_t> no_functions;
    const auto f2 = func_model.featurizer();
    t0 = Clock::now();
    for (const auto& [i, pred] : flagged) {
        r.flagged.push_back(files[i].rel);
        std::vector<php::FunctionSpan> spans;
        try {
            spans = php::extract_functions(files[i].source);
        } catch (const SourceError&) {
        }
        std::erase_if(spans, [](const php::FunctionSpan& s) { return s.body.empty(); });
        if (spans.empty()) no_functions.push_back(i);
        for (auto& s : spans) funcs.push_back({i, std::move(s), std::nullopt});
    }
    parallel_for(funcs.size(), options.threads, [&](std::size_t k) {
        try {
            funcs[k].features = f2(funcs[k].span.body);
        } catch (const LexError&) {
        }
    });
    r.perf.processing_seconds += seconds_since(t0);

    auto file_pred = [&](std::size_t i) -> const model::Prediction& {
        return std::find_if(flagged.begin(), flagged.end(), [&](const auto& fp) { return fp.first == i; })->second;
    };
    t0 = Clock::now();
    for (const auto& fw : funcs) {
        if (!fw.features) continue;
        ++r.functions_classified;
        const auto p = infer(func_model, *fw.features);
        if (!is_unsafe(p.label)) continue;
        Finding f;
        f.path = files[fw.file].rel;
        f.granularity = Granularity::Function;
        f.function = fw.span.name;
        f.start_line = fw.span.start_line;
        f.end_line = fw.span.end_line;
        f.label = p.label;
        f.probabilities = p.probabilities;
        f.file_label = file_pred(fw.file).label;
        r.findings.push_back(std::move(f));
    }
    r.perf.inference_seconds += seconds_since(t0);

    for (auto i : no_functions) {
        const auto& p = file_pred(i);
        Finding f;
        f.path = files[i].rel;
        f.granularity = Granularity::File;
        f.start_line = 1;
        f.end_line = std::max<std::size_t>(1, count_loc_text(files[i].source));
        f.label = p.label;
        f.probabilities = p.probabilities;
        f.file_label = p.label;
        r.findings.push_back(std::move(f));
    }
    sort_findings(r.findings);
    r.wall_seconds = seconds_since(wall0);
    return r;
}

ScanResult scan(const fs::path& dir, const fs::path& file_ckpt, const fs::path& func_ckpt,
                const ScanOptions& options) {
    const auto file_model = model::load_checkpoint(file_ckpt);
    const auto func_model = model::load_checkpoint(func_ckpt);
    return scan(dir, file_model, func_model, options);
}

std::string report(const ScanResult& r, ReportFormat format) {
    const auto& p = r.perf;
    auto findings = r.findings;
    sort_findings(findings);
    if (format == ReportFormat::Json) {
        nlohmann::ordered_json j;
        j["findings"] = nlohmann::json::array();
        for (const auto& f : findings) {
            nlohmann::ordered_json o;
            o["path"] = f.path;
            o["granularity"] = std::string(to_string(f.granularity));
            o["function"] = f.function;
            o["start_line"] = f.start_line;
            o["end_line"] = f.end_line;
            o["label"] = std::string(to_string(f.label));
            o["probabilities"] = f.probabilities;
            o["file_label"] = std::string(to_string(f.file_label));
            j["findings"].push_back(std::move(o));
        }
        j["flagged"] = r.flagged;
        j["skipped"] = nlohmann::json::array();
        for (const auto& s : r.skipped) j["skipped"].push_back({{"path", s.path}, {"reason", s.reason}});
        j["files_scanned"] = r.files_scanned;
        j["functions_classified"] = r.functions_classified;
        j["perf"] = {{"size_bytes", p.size_bytes},
                     {"php_files", p.php_files},
                     {"loc", p.loc},
                     {"processing_seconds", p.processing_seconds},
                     {"inference_seconds", p.inference_seconds},
                     {"time_per_loc", p.time_per_loc()},
                     {"time_per_file", p.time_per_file()}};
        return j.dump(2) + "\n";
    }
    std::string out = "path\tgranularity\tfunction\tlines\tlabel\tconfidence\n";
    for (const auto& f : findings) {
        out += f.path + "\t" + std::string(to_string(f.granularity)) + "\t" + (f.function.empty() ? "-" : f.function) +
               "\t" + std::to_string(f.start_line) + "-" + std::to_string(f.end_line) + "\t" +
               std::string(to_string(f.label)) + "\t" + percent(f.probabilities[index_of(f.label)]) + "\n";
    }
    for (const auto& s : r.skipped) out += "skipped\t" + s.path + "\t" + s.reason + "\n";
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "\nsize_bytes\tphp_files\tloc\tprocessing_s\tinference_s\ttime_per_loc_s\ttime_per_file_s\n"
                  "%ju\t%zu\t%zu\t%.6f\t%.6f\t%.9f\t%.6f\n",
                  p.size_bytes, p.php_files, p.loc, p.processing_seconds, p.inference_seconds, p.time_per_loc(),
                  p.time_per_file());
    return out + buf;
}

}  // namespace phpvd::scanner
