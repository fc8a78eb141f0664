// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "phpvd/common/error.hpp"
#include "phpvd/corpus/synthetic.hpp"
#include "phpvd/model/checkpoint.hpp"
#include "phpvd/model/network.hpp"
#include "phpvd/model/predictor.hpp"
#include "phpvd/model/trainer.hpp"
#include "phpvd/tensor/ops.hpp"
#include "support/small_model.hpp"
#include "support/temp_dir.hpp"

using namespace phpvd;
using namespace phpvd::model;
using testing_support::permuted;
using testing_support::small_arch;

namespace {

struct Fixture {
    std::vector<corpus::Sample> samples = corpus::generate_synthetic(3, 5, Granularity::File);
    php::KeepList keep;
    php::Vocabulary vocab = build_vocabulary(samples, Granularity::File, keep);
    ArchitectureConfig arch = small_arch(Granularity::File, vocab.size());
    Model model{ModelParams::init(arch, 9), vocab, keep};
    Featurizer featurizer = model.featurizer();
};

bool bitwise_equal(const tensor::Tensor& a, const tensor::Tensor& b) {
    return a.numel() == b.numel() && std::memcmp(a.data().data(), b.data().data(), a.numel() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("default architecture sizes") {
    const auto arch = ArchitectureConfig::for_granularity(Granularity::Function, 50);
    CHECK(arch.gru_output_dim() == 600);
    CHECK(arch.fc_input_dim() == 4600);
    CHECK(arch.seq_len == 200);
    CHECK(ArchitectureConfig::for_granularity(Granularity::File, 50).seq_len == 3000);
    // Hand count: GRU 2*(3*100*100 + 3*100*100 + 600) + 2*2*(3*100*200 + 3*100*100 + 600),
    // GCN 2000*2000 + 2000*4000 + 4000*4000, pools 4001 + 8001 + 8001,
    // head 4600*1000+1000 + 1000*500+500 + 500*4+4, embeddings 2*50*100.
    const std::size_t want = 121200 + 362400 + 28000000 + 20003 + 5103504 + 10000;
    CHECK(ModelParams::init(arch, 1).parameter_count() == want);
}

TEST_CASE("architecture validation and json round trip") {
    auto arch = ArchitectureConfig::for_granularity(Granularity::File, 10);
    CHECK_NOTHROW(arch.validate());
    CHECK(ArchitectureConfig::from_json(arch.to_json()) == arch);
    CHECK(ArchitectureConfig::from_json(arch.to_json()).hash() == arch.hash());
    auto bad = arch;
    bad.gcn_dims.front() = 7;
    CHECK_THROWS_AS(bad.validate(), ConfigMismatch);
    bad = arch;
    bad.fc_dims.back() = 3;
    CHECK_THROWS_AS(bad.validate(), ConfigMismatch);
}

TEST_CASE("initialization is seeded") {
    const auto arch = small_arch(Granularity::Function, 30);
    const auto a = ModelParams::init(arch, 4), b = ModelParams::init(arch, 4), c = ModelParams::init(arch, 5);
    const auto na = a.named(), nb = b.named(), nc = c.named();
    REQUIRE(na.size() == nb.size());
    bool any_diff = false;
    for (std::size_t i = 0; i < na.size(); ++i) {
        CHECK(na[i].first == nb[i].first);
        CHECK(bitwise_equal(na[i].second, nb[i].second));
        any_diff = any_diff || !bitwise_equal(na[i].second, nc[i].second);
    }
    CHECK(any_diff);
    CHECK(na.front().first == "embed.token");
}

TEST_CASE("forward shape and inference determinism") {
    Fixture fx;
    for (const auto& s : fx.samples) {
        const auto f = fx.featurizer(s.code);
        const auto a = forward(fx.model.params, f);
        const auto b = forward(fx.model.params, f);
        REQUIRE(a.numel() == 4);
        CHECK(bitwise_equal(a, b));
    }
}

TEST_CASE("batched forward equals per-sample forward") {
    Fixture fx;
    std::vector<Features> feats;
    for (const auto& s : fx.samples) feats.push_back(fx.featurizer(s.code));
    std::vector<const Features*> ptrs;
    for (const auto& f : feats) ptrs.push_back(&f);
    const auto batch = forward_batch(fx.model.params, ptrs, false);
    for (std::size_t b = 0; b < feats.size(); ++b) {
        const auto one = forward(fx.model.params, feats[b]);
        for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(batch.at(b, k) - one.at(k)) <= 1e-12);
    }
}

TEST_CASE("training mode applies dropout") {
    Fixture fx;
    const auto f = fx.featurizer(fx.samples[5].code);
    Rng rng(1);
    const auto eval = forward(fx.model.params, f);
    bool differs = false;
    for (int i = 0; i < 5 && !differs; ++i) {
        const auto train = forward(fx.model.params, f, true, &rng);
        differs = !bitwise_equal(eval, train);
    }
    CHECK(differs);
    CHECK_THROWS(forward(fx.model.params, f, true, nullptr));
}

TEST_CASE("logits are invariant to CFG node order") {
    Fixture fx;
    Rng rng(13);
    for (const auto& s : fx.samples) {
        const auto f = fx.featurizer(s.code);
        const auto base = forward(fx.model.params, f);
        const auto g = permuted(f, testing_support::random_permutation(rng, f.graph.node_count()));
        const auto moved = forward(fx.model.params, g);
        for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(base.at(k) - moved.at(k)) <= 1e-9);
    }
}

TEST_CASE("features are checked against the model") {
    Fixture fx;
    const auto f = fx.featurizer(fx.samples[0].code);
    CHECK_NOTHROW(check_features(fx.arch, fx.vocab.version(), f));
    CHECK_THROWS_AS(check_features(fx.arch, "v1-other", f), ConfigMismatch);
    auto fn_arch = fx.arch;
    fn_arch.granularity = Granularity::Function;
    CHECK_THROWS_AS(check_features(fn_arch, fx.vocab.version(), f), ConfigMismatch);

    const Featurizer fn(fx.vocab, fx.keep, Granularity::Function, 200);
    const auto g = fn("$a = 1;\necho $a;\n");
    CHECK_THROWS_AS(forward(fx.model.params, g), ConfigMismatch);
}

TEST_CASE("featurizer falls back to a single node on parse errors") {
    Fixture fx;
    const auto ok = fx.featurizer("<?php\n$a = $_GET['x'];\necho $a;\n");
    CHECK_FALSE(ok.cfg_fallback);
    CHECK(ok.seq.ids.size() == 3000);
    const auto broken = fx.featurizer("<?php\nif ($a { echo 1; }\n");
    CHECK(broken.cfg_fallback);
    CHECK(broken.graph.node_count() == 1);
    CHECK(broken.graph.edges.empty());
    CHECK_THROWS_AS(fx.featurizer("<?php\n$s = 'unterminated;\n"), LexError);
}

TEST_CASE("featurize_all keeps order and reports failures") {
    Fixture fx;
    auto samples = fx.samples;
    samples.insert(samples.begin() + 2, corpus::make_sample("<?php\n$s = \"open;\n", Granularity::File, Label::Safe, {}));
    std::vector<std::size_t> dropped, kept;
    const auto one = featurize_all(samples, fx.featurizer, 1, &dropped, &kept);
    const auto many = featurize_all(samples, fx.featurizer, 4);
    CHECK(dropped == std::vector<std::size_t>{2});
    REQUIRE(one.size() == samples.size() - 1);
    REQUIRE(many.size() == one.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].seq == many[i].seq);
        CHECK(one[i].graph == many[i].graph);
        CHECK(one[i].seq == fx.featurizer(samples[kept[i]].code).seq);
    }
}

TEST_CASE("checkpoint round trip is bitwise") {
    Fixture fx;
    TempDir dir;
    const auto path = dir.path() / "m.ckpt";
    save_checkpoint(fx.model, path);
    const auto back = load_checkpoint(path);
    CHECK(back.arch() == fx.arch);
    CHECK(back.vocab == fx.vocab);
    CHECK(back.vocab.version() == fx.vocab.version());
    CHECK(serialize_checkpoint(back) == serialize_checkpoint(fx.model));
    const auto bf = back.featurizer();
    for (const auto& s : fx.samples) {
        CHECK(bitwise_equal(forward(fx.model.params, fx.featurizer(s.code)), forward(back.params, bf(s.code))));
    }
}

TEST_CASE("checkpoint errors") {
    Fixture fx;
    TempDir dir;
    CHECK_THROWS_AS(load_checkpoint(dir.path() / "absent.ckpt"), MissingCheckpoint);
    const auto bytes = serialize_checkpoint(fx.model);
    CHECK_THROWS_AS(parse_checkpoint(bytes.substr(0, bytes.size() - 9)), CheckpointFormatError);
    CHECK_THROWS_AS(parse_checkpoint("PHPVDCK0" + bytes.substr(8)), CheckpointFormatError);
    CHECK_THROWS_AS(parse_checkpoint(bytes + "x"), CheckpointFormatError);
    CHECK_THROWS_AS(parse_checkpoint(""), CheckpointFormatError);
}

TEST_CASE("predictions from logits") {
    const std::vector<double> flat{0, 0, 0, 0};
    const auto p = from_logits(flat);
    CHECK(p.label == Label::Safe);
    for (double v : p.probabilities) CHECK(v == 0.25);

    const std::vector<double> tie{0, 3, 3, 1};
    CHECK(from_logits(tie).label == Label::XSS);

    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> l(4);
        for (auto& v : l) v = rng.uniform(-20, 20);
        const auto a = from_logits(l);
        double s = 0.0;
        for (double v : a.probabilities) s += v;
        CHECK(std::abs(s - 1.0) <= 1e-12);
        const double c = rng.uniform(0.01, 100), shift = rng.uniform(-50, 50);
        std::vector<double> m(4);
        for (std::size_t k = 0; k < 4; ++k) m[k] = c * l[k] + shift;
        CHECK(from_logits(m).label == a.label);
    }
}

TEST_CASE("one optimizer step lowers the loss of its batch") {
    Fixture fx;
    const auto examples = make_examples(fx.samples, fx.featurizer, 1);
    REQUIRE(examples.size() == fx.samples.size());
    TrainConfig tc;
    tc.epochs = 1;
    tc.batch_size = examples.size();
    tc.adam.lr = 1e-3;
    tc.seed = 3;
    const auto before = evaluate(ModelParams::init(fx.arch, tc.seed), examples, 64);
    const auto r = train(fx.arch, fx.vocab.version(), examples, examples, tc);
    const auto after = evaluate(r.params, examples, 64);
    CHECK(after.loss < before.loss);
    REQUIRE(r.log.size() == 1);
    CHECK(r.log[0].val_loss == doctest::Approx(after.loss).epsilon(1e-12));
}

TEST_CASE("repeated steps on one batch decrease the loss at the default rate") {
    Fixture fx;
    const auto examples = make_examples(fx.samples, fx.featurizer, 1);
    TrainConfig tc;
    tc.batch_size = examples.size();
    tc.seed = 3;
    auto params = ModelParams::init(fx.arch, tc.seed);
    double last = evaluate(params, examples, 64).loss;
    for (int step = 0; step < 5; ++step) {
        tc.epochs = static_cast<std::size_t>(step + 1);
        const auto r = train(fx.arch, fx.vocab.version(), examples, examples, tc);
        // Best-val checkpoint only equals the last step while the loss keeps falling.
        CHECK(r.best_epoch == r.log.size());
        const double now = evaluate(r.params, examples, 64).loss;
        CHECK(now < last);
        last = now;
    }
}

TEST_CASE("training is reproducible for a seed") {
    Fixture fx;
    const auto examples = make_examples(fx.samples, fx.featurizer, 1);
    TrainConfig tc;
    tc.epochs = 3;
    tc.batch_size = 4;
    tc.adam.lr = 1e-3;
    tc.seed = 11;
    const auto a = train(fx.arch, fx.vocab.version(), examples, examples, tc);
    const auto b = train(fx.arch, fx.vocab.version(), examples, examples, tc);
    CHECK(render_log_csv(a.log) == render_log_csv(b.log));
    const auto na = a.params.named(), nb = b.params.named();
    for (std::size_t i = 0; i < na.size(); ++i) CHECK(bitwise_equal(na[i].second, nb[i].second));
    CHECK(render_log_csv(a.log).starts_with("epoch,train_loss,val_loss,lr,train_acc,val_acc\n"));
}

TEST_CASE("class weights are inverse frequency") {
    Fixture fx;
    auto examples = make_examples(fx.samples, fx.featurizer, 1);
    examples.resize(5);  // 3 Safe, 2 XSS
    const auto w = class_weights(examples, 4);
    CHECK(w[0] == doctest::Approx(5.0 / 12.0));
    CHECK(w[1] == doctest::Approx(5.0 / 8.0));
    CHECK(w[2] == 0.0);
    CHECK(w[3] == 0.0);
}

TEST_CASE("predict on raw code uses the model's preprocessing") {
    Fixture fx;
    const auto& code = fx.samples[4].code;
    const auto a = predict(fx.model, code);
    const auto b = predict(fx.model, fx.featurizer(code));
    CHECK(a.label == b.label);
    CHECK(a.probabilities == b.probabilities);
}
