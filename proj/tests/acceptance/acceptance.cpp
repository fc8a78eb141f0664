// SPDX-License-Identifier: Apache-2.0
// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails. Pass criterion numbers to run a subset.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "phpvd/common/process.hpp"
#include "phpvd/corpus/miner.hpp"
#include "phpvd/corpus/synthetic.hpp"
#include "phpvd/metrics/confusion.hpp"
#include "phpvd/model/checkpoint.hpp"
#include "phpvd/model/network.hpp"
#include "phpvd/model/trainer.hpp"
#include "phpvd/scanner/scanner.hpp"
#include "phpvd/tensor/graph_ops.hpp"
#include "phpvd/tensor/gru.hpp"
#include "support/git_fixture.hpp"
#include "support/gradient_suite.hpp"
#include "support/mined.hpp"
#include "support/oracles.hpp"
#include "support/count_rows.hpp"
#include "support/small_model.hpp"
#include "support/temp_dir.hpp"

#ifndef PHPVD_FIXTURE_DIR
#error "PHPVD_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace fs = std::filesystem;
using namespace phpvd;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

bool same_bits(const tensor::Tensor& a, const tensor::Tensor& b) {
    return a.numel() == b.numel() && std::memcmp(a.data().data(), b.data().data(), a.numel() * sizeof(double)) == 0;
}

// Shared between the overfit run and the layered scan.
struct State {
    TempDir dir;
    fs::path file_ckpt;
};

Outcome metric_arithmetic() {
    const auto t0 = Clock::now();
    struct Row {
        const char* name;
        std::size_t tn, fn, tp, fp;
        double precision, recall, f1;
    };
    const Row rows[] = {{"File-A GIT", 240, 32, 241, 33, 87.96, 88.28, 88.12},
                        {"Func-S SARD#", 277, 0, 149, 16, 90.30, 100.0, 94.90}};
    bool ok = true;
    std::string detail;
    for (const auto& r : rows) {
        const auto v = testing_support::from_binary_counts(r.tn, r.fn, r.tp, r.fp);
        const auto c = metrics::confusion(v.truth, v.pred);
        ok = ok && c.tn == r.tn && c.fn == r.fn && c.tp == r.tp && c.fp == r.fp;
        ok = ok && std::abs(c.precision() - r.precision) <= 0.01 && std::abs(c.recall() - r.recall) <= 0.01 &&
             std::abs(c.f1() - r.f1) <= 0.01;
        detail += fmt("%s P/R/F1 %.2f/%.2f/%.2f; ", r.name, c.precision(), c.recall(), c.f1());
    }
    const double s = seconds_since(t0);
    return {ok && s < 1.0, detail + fmt("%.4fs", s)};
}

Outcome gradient_suite() {
    const auto t0 = Clock::now();
    const auto results = gradcheck::run_gradient_suite();
    std::map<std::string, std::pair<int, double>> per_op;
    for (const auto& r : results) {
        auto& [n, worst] = per_op[r.op];
        ++n;
        worst = std::max(worst, r.error);
    }
    bool ok = per_op.size() == 8;
    double worst_all = 0.0;
    for (const auto& [op, v] : per_op) {
        ok = ok && v.first >= 5 && v.second <= 1e-4;
        worst_all = std::max(worst_all, v.second);
    }
    const double s = seconds_since(t0);
    return {ok && s < 60.0, fmt("%zu ops, %zu cases, worst rel err %.2e, %.2fs", per_op.size(), results.size(),
                                worst_all, s)};
}

Outcome gcn_hand_oracle() {
    std::vector<double> eye(9, 0.0);
    eye[0] = eye[4] = eye[8] = 1.0;
    const auto I = tensor::Tensor::matrix(3, 3, eye);
    const std::vector<tensor::Edge> path{{0, 1}, {1, 2}};
    const auto out = tensor::gcn_conv(I, path, tensor::GcnLayerParams{I}, false);
    const double r6 = 1.0 / std::sqrt(6.0);
    const double want[3][3] = {{0.5, r6, 0.0}, {r6, 1.0 / 3.0, r6}, {0.0, r6, 0.5}};
    double worst = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) worst = std::max(worst, std::abs(out.at(i, j) - want[i][j]));
    }
    return {worst <= 1e-12, fmt("max abs diff %.2e", worst)};
}

Outcome gru_oracle() {
    Rng rng(4242);
    double worst = 0.0;
    for (const auto& [H, D] : std::vector<std::pair<std::size_t, std::size_t>>{{2, 3}, {5, 5}, {100, 100}}) {
        const auto p = oracle::random_gru(rng, H, D);
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<double> x(D), h(H);
            for (auto& v : x) v = rng.uniform(-1, 1);
            for (auto& v : h) v = rng.uniform(-1, 1);
            const auto got = tensor::gru_cell(tensor::Tensor::vector(x), tensor::Tensor::vector(h), p);
            const auto want = oracle::gru_cell(x, h, p);
            for (std::size_t i = 0; i < H; ++i) worst = std::max(worst, std::abs(got.at(i) - want[i]));
        }
    }
    return {worst <= 1e-12, fmt("(2,3) (5,5) (100,100): max abs diff %.2e", worst)};
}

Outcome permutation_invariance() {
    const auto t0 = Clock::now();
    const std::size_t V = 60;
    const auto arch = model::ArchitectureConfig::for_granularity(Granularity::Function, V);
    const auto params = model::ModelParams::init(arch, 5);
    Rng rng(99);
    double worst = 0.0;
    for (int g = 0; g < 20; ++g) {
        model::Features f;
        f.seq.granularity = Granularity::Function;
        f.seq.ids.assign(arch.seq_len, 0);
        f.seq.true_len = 5 + rng.below(arch.seq_len - 5);
        for (std::size_t i = 0; i < f.seq.true_len; ++i) f.seq.ids[i] = static_cast<php::TokenId>(1 + rng.below(V - 1));
        const auto n = 1 + rng.below(40);
        f.graph.ids.resize(n * cfg::kNodeLength);
        for (auto& id : f.graph.ids) id = static_cast<php::TokenId>(rng.below(V));
        for (std::size_t i = 0; i < n; ++i) f.graph.lines.push_back(i + 1);
        std::set<cfg::Edge> edges;
        const auto m = rng.below(2 * n + 1);
        for (std::size_t e = 0; e < m && n > 1; ++e) {
            const auto a = rng.below(n), b = rng.below(n);
            if (a != b) edges.emplace(a, b);
        }
        f.graph.edges.assign(edges.begin(), edges.end());
        const auto moved = testing_support::permuted(f, testing_support::random_permutation(rng, n));
        const auto a = model::forward(params, f), b = model::forward(params, moved);
        for (std::size_t k = 0; k < 4; ++k) worst = std::max(worst, std::abs(a.at(k) - b.at(k)));
    }
    return {worst <= 1e-9, fmt("20 graphs, max logit diff %.2e, %.1fs", worst, seconds_since(t0))};
}

Outcome overfit(State& st) {
    const auto t0 = Clock::now();
    const auto corpus = corpus::generate_synthetic(15, 7, Granularity::File);
    model::TrainConfig tc;
    tc.epochs = 150;
    tc.batch_size = 64;
    tc.adam.lr = 1e-3;
    tc.seed = 1;
    std::size_t first_hit = 0;
    const auto trained = model::train_model(corpus, corpus,
                                            model::ArchitectureConfig::for_granularity(Granularity::File, 0),
                                            php::KeepList(), tc, [&](const model::EpochRecord& r) {
                                                if (first_hit == 0 && r.train_acc >= 0.95) first_hit = r.epoch;
                                            });
    const double s = seconds_since(t0);
    st.file_ckpt = st.dir.path() / "file.ckpt";
    model::save_checkpoint(trained.model, st.file_ckpt);

    const auto examples = model::make_examples(corpus, trained.model.featurizer(), 1);
    const auto eval = model::evaluate(trained.model.params, examples, 64);
    const bool ok = corpus.size() == 60 && first_hit > 0 && eval.accuracy >= 0.95 && s <= 600.0 && !trained.diverged;
    return {ok, fmt("60 samples, train acc >= 0.95 first at epoch %zu, best-model acc %.3f, %.0fs", first_hit,
                    eval.accuracy, s)};
}

Outcome mining() {
    TempDir dir;
    const auto repo = dir.path() / "fixture-repo";
    const auto want = testing_support::build_mining_fixture(repo);
    const auto r = corpus::mine_repo(repo);
    const auto files = testing_support::comparable(r.files);
    const auto functions = testing_support::comparable(r.functions);

    // The last three commits are the over-cap, delete-only and dual-keyword ones.
    const auto log = run_process({"git", "-C", repo.string(), "log", "-3", "--format=%H"});
    bool excluded_silent = log.exit_code == 0;
    for (std::size_t pos = 0; pos + 40 <= log.out.size(); pos += 41) {
        const auto sha = log.out.substr(pos, 40);
        for (const auto* set : {&r.files, &r.functions}) {
            for (const auto& s : *set) excluded_silent = excluded_silent && s.provenance.origin.find(sha) == std::string::npos;
        }
    }
    const auto& st = r.stats;
    const bool ok = files == want.files && functions == want.functions && excluded_silent && st.used == 2 &&
                    st.excluded_too_many_files == 1 && st.excluded_no_usable_change == 1 && st.excluded_multi_label == 1;
    return {ok, fmt("%zu/%zu file samples, %zu/%zu function samples match; 3 excluded commits contribute nothing: %s",
                    files.size(), want.files.size(), functions.size(), want.functions.size(),
                    excluded_silent ? "yes" : "no")};
}

Outcome determinism() {
    const auto t0 = Clock::now();
    const auto corpus = corpus::generate_synthetic(2, 21, Granularity::File);
    model::TrainConfig tc;
    tc.epochs = 3;
    tc.batch_size = 4;
    tc.adam.lr = 1e-3;
    tc.seed = 8;
    tc.threads = 1;
    const auto arch = model::ArchitectureConfig::for_granularity(Granularity::File, 0);
    const auto a = model::train_model(corpus, corpus, arch, php::KeepList(), tc);
    const auto b = model::train_model(corpus, corpus, arch, php::KeepList(), tc);
    const bool logs = model::render_log_csv(a.log) == model::render_log_csv(b.log);
    const bool ckpt = model::serialize_checkpoint(a.model) == model::serialize_checkpoint(b.model);
    return {logs && ckpt, fmt("logs identical: %s, checkpoints bitwise identical: %s, %.1fs", logs ? "yes" : "no",
                              ckpt ? "yes" : "no", seconds_since(t0))};
}

Outcome layered_scan(const State& st) {
    if (st.file_ckpt.empty() || !fs::exists(st.file_ckpt)) return {false, "needs the overfit model (criterion 6)"};
    const auto t0 = Clock::now();
    const auto fn_corpus = corpus::generate_synthetic(15, 7, Granularity::Function);
    model::TrainConfig tc;
    tc.epochs = 40;
    tc.adam.lr = 1e-3;
    tc.seed = 1;
    const auto fn = model::train_model(fn_corpus, fn_corpus,
                                       model::ArchitectureConfig::for_granularity(Granularity::Function, 0),
                                       php::KeepList(), tc);
    const auto func_ckpt = st.dir.path() / "func.ckpt";
    model::save_checkpoint(fn.model, func_ckpt);

    const fs::path project = fs::path(PHPVD_FIXTURE_DIR) / "scan_project";
    scanner::ScanOptions opts;
    opts.threads = 2;
    const auto r = scanner::scan(project, st.file_ckpt, func_ckpt, opts);

    const std::set<std::string> flagged(r.flagged.begin(), r.flagged.end());
    const bool planted = flagged.contains("plugins/payment/cp_ppp_data_source.php") &&
                         flagged.contains("plugins/sports/class-sp-settings-events.php");
    bool subset = true;
    for (const auto& f : r.findings) subset = subset && flagged.contains(f.path) && is_unsafe(f.label);

    // Independent recount of the project.
    std::size_t php = 0, loc = 0;
    std::uintmax_t bytes = 0;
    for (const auto& e : fs::recursive_directory_iterator(project)) {
        if (!e.is_regular_file()) continue;
        bytes += e.file_size();
        if (e.path().extension() != ".php") continue;
        ++php;
        const auto text = read_file(e.path());
        loc += static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
        if (!text.empty() && text.back() != '\n') ++loc;
    }
    const auto& p = r.perf;
    const double total = p.processing_seconds + p.inference_seconds;
    const bool perf = p.php_files == php && p.php_files == 22 && p.loc == loc && p.size_bytes == bytes &&
                      p.total_seconds() == total && p.time_per_loc() == total / static_cast<double>(loc) &&
                      p.time_per_file() == total / static_cast<double>(php) && total <= r.wall_seconds &&
                      r.files_scanned + r.skipped.size() == php;
    return {planted && subset && perf,
            fmt("%zu flagged incl. both planted: %s, %zu findings all in flagged files: %s, perf recomputes: %s "
                "(%zu files, %zu LoC), %.0fs",
                r.flagged.size(), planted ? "yes" : "no", r.findings.size(), subset ? "yes" : "no",
                perf ? "yes" : "no", php, loc, seconds_since(t0))};
}

Outcome checkpoint_round_trip(const State& st) {
    TempDir dir;
    std::vector<model::Model> models;
    if (!st.file_ckpt.empty() && fs::exists(st.file_ckpt)) models.push_back(model::load_checkpoint(st.file_ckpt));
    for (const auto g : {Granularity::File, Granularity::Function}) {
        const auto samples = corpus::generate_synthetic(3, 77, g);
        auto vocab = model::build_vocabulary(samples, g, php::KeepList());
        const auto arch = model::ArchitectureConfig::for_granularity(g, vocab.size());
        models.push_back(model::Model{model::ModelParams::init(arch, 3), std::move(vocab), php::KeepList()});
    }
    std::size_t compared = 0;
    bool ok = true;
    for (std::size_t m = 0; m < models.size(); ++m) {
        const auto path = dir.path() / ("m" + std::to_string(m) + ".ckpt");
        model::save_checkpoint(models[m], path);
        const auto back = model::load_checkpoint(path);
        const auto g = models[m].arch().granularity;
        const auto inputs = corpus::generate_synthetic(3, 1000 + m, g);  // 12 units, first 10 used
        const auto fa = models[m].featurizer(), fb = back.featurizer();
        for (std::size_t i = 0; i < 10; ++i) {
            ok = ok && same_bits(model::forward(models[m].params, fa(inputs[i].code)),
                                 model::forward(back.params, fb(inputs[i].code)));
            ++compared;
        }
    }
    return {ok && compared >= 20, fmt("%zu models x 10 inputs, %zu logit vectors bitwise equal: %s", models.size(),
                                           compared, ok ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    State st;
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"metric arithmetic", metric_arithmetic},
        {"gradient suite", gradient_suite},
        {"gcn hand oracle", gcn_hand_oracle},
        {"gru oracle", gru_oracle},
        {"permutation invariance", permutation_invariance},
        {"overfit capacity", [&] { return overfit(st); }},
        {"mining soundness", mining},
        {"determinism", determinism},
        {"layered scan", [&] { return layered_scan(st); }},
        {"checkpoint round trip", [&] { return checkpoint_round_trip(st); }},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int n = static_cast<int>(i + 1);
        if (!only.empty() && !only.contains(n)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("criterion %2d %-24s %s  %s\n", n, criteria[i].first, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
