// SPDX-License-Identifier: Apache-2.0
// phpvd command line: corpus building, training, evaluation and scanning.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phpvd/cfg/cfg.hpp"
#include "phpvd/common/error.hpp"
#include "phpvd/common/process.hpp"
#include "phpvd/corpus/ingest.hpp"
#include "phpvd/corpus/miner.hpp"
#include "phpvd/corpus/review.hpp"
#include "phpvd/corpus/split.hpp"
#include "phpvd/corpus/stats.hpp"
#include "phpvd/corpus/synthetic.hpp"
#include "phpvd/metrics/confusion.hpp"
#include "phpvd/model/checkpoint.hpp"
#include "phpvd/model/predictor.hpp"
#include "phpvd/model/trainer.hpp"
#include "phpvd/php/functions.hpp"
#include "phpvd/scanner/scanner.hpp"

namespace fs = std::filesystem;
using namespace phpvd;

namespace {

Granularity granularity_arg(const std::string& s) { return parse_granularity(s); }

php::KeepList keep_arg(const std::string& path) { return path.empty() ? php::KeepList() : php::KeepList::load(path); }

std::vector<corpus::Sample> of_granularity(std::vector<corpus::Sample> samples, Granularity g) {
    std::erase_if(samples, [g](const corpus::Sample& s) { return s.granularity != g; });
    return samples;
}

std::array<double, 3> parse_fractions(const std::string& s) {
    std::array<double, 3> f{};
    std::stringstream in(s);
    std::string part;
    std::size_t i = 0;
    while (std::getline(in, part, ',')) {
        if (i == 3) throw FormatError("--frac takes three values");
        f[i++] = std::stod(part);
    }
    if (i != 3) throw FormatError("--frac takes three values");
    return f;
}

void print_prediction(const std::string& what, const model::Prediction& p) {
    std::printf("%s\t%s", what.c_str(), std::string(to_string(p.label)).c_str());
    for (auto l : kAllLabels) std::printf("\t%s=%.6f", std::string(to_string(l)).c_str(), p.probabilities[index_of(l)]);
    std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phpvd: hybrid GRU + GCN vulnerability detection for PHP"};
    app.require_subcommand(1);
    int exit_code = 0;

    // corpus
    auto* corpus_cmd = app.add_subcommand("corpus", "build and inspect datasets");
    corpus_cmd->require_subcommand(1);

    std::string gen_out, gen_gran = "file";
    std::size_t gen_n = 100;
    std::uint64_t gen_seed = 0;
    auto* gen = corpus_cmd->add_subcommand("gen", "generate synthetic labelled samples");
    gen->add_option("--n", gen_n, "samples per class")->required();
    gen->add_option("--seed", gen_seed)->required();
    gen->add_option("--out", gen_out)->required();
    gen->add_option("--granularity", gen_gran)->check(CLI::IsMember({"file", "function"}));
    gen->callback([&] {
        const auto samples = corpus::generate_synthetic(gen_n, gen_seed, granularity_arg(gen_gran));
        corpus::write_jsonl(gen_out, samples);
        std::printf("wrote %zu samples to %s\n", samples.size(), gen_out.c_str());
    });

    std::string mine_repo_path, mine_out, mine_keywords;
    std::size_t mine_max_files = 20;
    auto* mine = corpus_cmd->add_subcommand("mine", "mine labelled samples from a git history");
    mine->add_option("--repo", mine_repo_path)->required();
    mine->add_option("--out", mine_out)->required();
    mine->add_option("--max-files", mine_max_files);
    mine->add_option("--keywords", mine_keywords, "label,keyword per line");
    mine->callback([&] {
        corpus::CommitFilter filter;
        filter.max_files_changed = mine_max_files;
        if (!mine_keywords.empty()) filter.keywords = corpus::KeywordSet::load(mine_keywords);
        const auto r = corpus::mine_repo(mine_repo_path, filter);
        auto all = r.files;
        all.insert(all.end(), r.functions.begin(), r.functions.end());
        corpus::write_jsonl(mine_out, all);
        const auto& s = r.stats;
        std::printf("commits %zu, matched %zu, used %zu, excluded: multi-label %zu, too many files %zu, "
                    "no usable change %zu, merges %zu\n",
                    s.commits_scanned, s.matched, s.used, s.excluded_multi_label, s.excluded_too_many_files,
                    s.excluded_no_usable_change, s.merges_skipped);
        if (r.no_matches()) std::printf("no matching commits\n");
        std::printf("wrote %zu file and %zu function samples to %s\n", r.files.size(), r.functions.size(),
                    mine_out.c_str());
    });

    std::string split_in, split_out_dir = ".", split_frac = "0.8,0.1,0.1", split_gran;
    std::uint64_t split_seed = 0;
    auto* split_cmd = corpus_cmd->add_subcommand("split", "stratified train/val/test split");
    split_cmd->add_option("--in", split_in)->required();
    split_cmd->add_option("--seed", split_seed)->required();
    split_cmd->add_option("--frac", split_frac);
    split_cmd->add_option("--out-dir", split_out_dir);
    split_cmd->add_option("--granularity", split_gran)->check(CLI::IsMember({"file", "function"}));
    split_cmd->callback([&] {
        auto samples = corpus::read_jsonl(split_in);
        if (!split_gran.empty()) samples = of_granularity(std::move(samples), granularity_arg(split_gran));
        corpus::SplitSpec spec;
        spec.fractions = parse_fractions(split_frac);
        spec.seed = split_seed;
        const auto sp = corpus::split(samples, spec);
        fs::create_directories(split_out_dir);
        corpus::write_jsonl(fs::path(split_out_dir) / "train.jsonl", sp.train);
        corpus::write_jsonl(fs::path(split_out_dir) / "val.jsonl", sp.val);
        corpus::write_jsonl(fs::path(split_out_dir) / "test.jsonl", sp.test);
        std::printf("train %zu, val %zu, test %zu\n", sp.train.size(), sp.val.size(), sp.test.size());
    });

    std::string ingest_dir, ingest_manifest, ingest_out, ingest_keep;
    auto* ingest = corpus_cmd->add_subcommand("ingest", "ingest a labelled directory of PHP files");
    ingest->add_option("--dir", ingest_dir)->required();
    ingest->add_option("--manifest", ingest_manifest)->required();
    ingest->add_option("--out", ingest_out)->required();
    ingest->add_option("--keep-list", ingest_keep);
    ingest->callback([&] {
        const auto samples = corpus::ingest_synthetic(ingest_dir, ingest_manifest, keep_arg(ingest_keep));
        corpus::write_jsonl(ingest_out, samples);
        std::printf("wrote %zu samples to %s\n", samples.size(), ingest_out.c_str());
    });

    std::string stats_in, stats_manifest;
    auto* stats = corpus_cmd->add_subcommand("stats", "per-class sample counts");
    stats->add_option("--in", stats_in);
    stats->add_option("--manifest", stats_manifest);
    stats->callback([&] {
        if (stats_in.empty() == stats_manifest.empty()) throw CLI::ValidationError("give exactly one of --in, --manifest");
        const auto s = stats_in.empty() ? corpus::manifest_stats(corpus::load_manifest(stats_manifest))
                                        : corpus::dataset_stats(corpus::read_jsonl(stats_in));
        std::fputs(corpus::render_stats(s).c_str(), stdout);
    });

    std::string review_in, review_out;
    double review_fraction = 0.1;
    std::uint64_t review_seed = 0;
    auto* review = corpus_cmd->add_subcommand("review", "sample Unsafe items for manual review");
    review->add_option("--in", review_in)->required();
    review->add_option("--out", review_out)->required();
    review->add_option("--fraction", review_fraction);
    review->add_option("--seed", review_seed);
    review->callback([&] {
        const auto sel = corpus::select_for_review(corpus::read_jsonl(review_in), review_fraction, review_seed);
        write_file(review_out, corpus::render_review_sheet(sel));
        std::printf("%zu samples selected\n", sel.size());
    });

    std::string tally_sheet;
    auto* tally = corpus_cmd->add_subcommand("review-tally", "count verdicts in a review sheet");
    tally->add_option("--sheet", tally_sheet)->required();
    tally->callback([&] {
        const auto t = corpus::tally_review(read_file(tally_sheet));
        std::printf("confirmed %zu, rejected %zu, pending %zu\n", t.confirmed, t.rejected, t.pending);
        for (const auto& id : t.rejected_ids) std::printf("rejected %s\n", id.c_str());
    });

    // model
    auto* model_cmd = app.add_subcommand("model", "train, evaluate and apply classifiers");
    model_cmd->require_subcommand(1);

    std::string train_corpus, train_gran = "file", train_out, train_log, train_keep, train_frac = "0.8,0.1,0.1";
    model::TrainConfig tc;
    bool quiet = false;
    auto* train_cmd = model_cmd->add_subcommand("train", "train a model on a JSONL corpus");
    train_cmd->add_option("--corpus", train_corpus)->required();
    train_cmd->add_option("--granularity", train_gran)->check(CLI::IsMember({"file", "function"}));
    train_cmd->add_option("--out", train_out)->required();
    train_cmd->add_option("--seed", tc.seed);
    train_cmd->add_option("--epochs", tc.epochs);
    train_cmd->add_option("--batch-size", tc.batch_size);
    train_cmd->add_option("--lr", tc.adam.lr);
    train_cmd->add_option("--threads", tc.threads, "featurization workers");
    train_cmd->add_flag("--class-weights", tc.class_weights);
    train_cmd->add_option("--frac", train_frac, "train,val,test fractions");
    train_cmd->add_option("--log", train_log, "per-epoch CSV log");
    train_cmd->add_option("--keep-list", train_keep);
    train_cmd->add_flag("--quiet", quiet);
    train_cmd->callback([&] {
        const auto g = granularity_arg(train_gran);
        const auto samples = of_granularity(corpus::read_jsonl(train_corpus), g);
        corpus::SplitSpec spec;
        spec.fractions = parse_fractions(train_frac);
        spec.seed = tc.seed;
        const auto sp = corpus::split(samples, spec);
        const auto keep = keep_arg(train_keep);
        auto trained = model::train_model(sp.train, sp.val, model::ArchitectureConfig::for_granularity(g, 0), keep, tc,
                                          [&](const model::EpochRecord& r) {
                                              if (quiet) return;
                                              std::fprintf(stderr,
                                                           "epoch %zu train_loss %.6f val_loss %.6f lr %.3g "
                                                           "train_acc %.4f val_acc %.4f\n",
                                                           r.epoch, r.train_loss, r.val_loss, r.lr, r.train_acc,
                                                           r.val_acc);
                                          });
        model::save_checkpoint(trained.model, train_out);
        if (!train_log.empty()) write_file(train_log, model::render_log_csv(trained.log));
        if (trained.diverged) std::fprintf(stderr, "training diverged; kept the best earlier epoch\n");
        std::printf("best epoch %zu, checkpoint %s\n", trained.best_epoch, train_out.c_str());
        const auto f = trained.model.featurizer();
        const auto test = model::make_examples(sp.test, f, tc.threads);
        if (!test.empty()) {
            const auto ev = model::evaluate(trained.model.params, test, tc.batch_size);
            std::vector<Label> truth;
            for (const auto& e : test) truth.push_back(e.label);
            const metrics::NamedReport rep{"test", metrics::confusion(truth, ev.predictions)};
            std::fputs(metrics::render_text(std::span(&rep, 1)).c_str(), stdout);
        }
    });

    std::string predict_ckpt, predict_in;
    auto* predict_cmd = model_cmd->add_subcommand("predict", "classify a PHP file (or each function in it)");
    predict_cmd->add_option("--ckpt", predict_ckpt)->required();
    predict_cmd->add_option("--in", predict_in)->required();
    predict_cmd->callback([&] {
        const auto m = model::load_checkpoint(predict_ckpt);
        std::vector<fs::path> inputs;
        if (fs::is_directory(predict_in)) {
            inputs = corpus::find_php_files(predict_in);
        } else {
            inputs.emplace_back(predict_in);
        }
        for (const auto& p : inputs) {
            const auto code = read_file(p);
            try {
                if (m.arch().granularity == Granularity::File) {
                    print_prediction(p.string(), model::predict(m, code));
                    continue;
                }
                const auto fns = php::extract_functions(code);
                if (fns.empty()) {
                    print_prediction(p.string(), model::predict(m, code));
                    continue;
                }
                for (const auto& fn : fns) {
                    print_prediction(p.string() + ":" + fn.name + ":" + std::to_string(fn.start_line),
                                     model::predict(m, fn.body));
                }
            } catch (const SourceError& e) {
                throw Error(p.string() + ": " + e.what());
            }
        }
    });

    std::string eval_ckpt, eval_corpus, eval_name = "eval";
    bool eval_csv = false;
    std::size_t eval_batch = 64;
    auto* eval_cmd = model_cmd->add_subcommand("eval", "confusion metrics on a labelled corpus");
    eval_cmd->add_option("--ckpt", eval_ckpt)->required();
    eval_cmd->add_option("--corpus", eval_corpus)->required();
    eval_cmd->add_option("--name", eval_name);
    eval_cmd->add_option("--batch-size", eval_batch);
    eval_cmd->add_flag("--csv", eval_csv);
    eval_cmd->callback([&] {
        const auto m = model::load_checkpoint(eval_ckpt);
        const auto samples = of_granularity(corpus::read_jsonl(eval_corpus), m.arch().granularity);
        std::size_t dropped = 0;
        const auto ex = model::make_examples(samples, m.featurizer(), 1, &dropped);
        const auto ev = model::evaluate(m.params, ex, eval_batch);
        std::vector<Label> truth;
        for (const auto& e : ex) truth.push_back(e.label);
        const metrics::NamedReport rep{eval_name, metrics::confusion(truth, ev.predictions)};
        std::fputs((eval_csv ? metrics::render_csv(std::span(&rep, 1)) : metrics::render_text(std::span(&rep, 1))).c_str(),
                   stdout);
        const auto pc = metrics::per_class_correct(truth, ev.predictions);
        for (auto l : kAllLabels) {
            const auto& v = pc[index_of(l)];
            std::printf("correct %s: %s\n", std::string(to_string(l)).c_str(),
                        v ? metrics::format_percent(*v * 100.0).c_str() : "n/a");
        }
        if (dropped) std::printf("skipped %zu samples that failed to lex\n", dropped);
    });

    // scan
    std::string scan_dir, scan_file_ckpt, scan_func_ckpt;
    bool scan_json = false, scan_dump_cfg = false;
    std::size_t scan_threads = 1;
    auto* scan_cmd = app.add_subcommand("scan", "layered file -> function scan of a project");
    scan_cmd->add_option("--dir", scan_dir)->required();
    scan_cmd->add_option("--file-model", scan_file_ckpt)->required();
    scan_cmd->add_option("--func-model", scan_func_ckpt)->required();
    scan_cmd->add_flag("--json", scan_json);
    scan_cmd->add_flag("--dump-cfg", scan_dump_cfg, "print each file's CFG to stderr");
    scan_cmd->add_option("--threads", scan_threads);
    scan_cmd->callback([&] {
        scanner::ScanOptions opt;
        opt.threads = scan_threads;
        if (scan_dump_cfg) {
            opt.on_cfg = [](const std::string& path, const cfg::Cfg& g) {
                std::fprintf(stderr, "# %s\n%s", path.c_str(), cfg::dump(g).c_str());
            };
        }
        const auto r = scanner::scan(scan_dir, scan_file_ckpt, scan_func_ckpt, opt);
        std::fputs(scanner::report(r, scan_json ? scanner::ReportFormat::Json : scanner::ReportFormat::Text).c_str(),
                   stdout);
        exit_code = r.findings.empty() ? 0 : 1;
    });

    // cfg
    std::string cfg_in, cfg_gran = "file";
    auto* cfg_cmd = app.add_subcommand("cfg", "print the control-flow graph of a PHP file");
    cfg_cmd->add_option("--in", cfg_in)->required();
    cfg_cmd->add_option("--granularity", cfg_gran)->check(CLI::IsMember({"file", "function"}));
    cfg_cmd->callback([&] {
        const auto code = read_file(cfg_in);
        const auto g = granularity_arg(cfg_gran);
        const auto vocab = php::Vocabulary::build(std::vector<std::vector<std::string>>{
            model::normalized_surfaces(code, g, php::KeepList())});
        const auto graph = cfg::build_cfg(code, g, vocab);
        std::fputs(cfg::dump(graph).c_str(), stdout);
        const auto st = cfg::cfg_stats(graph);
        std::fprintf(stderr, "nodes %zu, edges %zu, max out-degree %zu\n", st.nodes, st.edges, st.max_out_degree);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return exit_code;
}
