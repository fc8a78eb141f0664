// SPDX-License-Identifier: Apache-2.0
#include "phpvd/model/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "phpvd/common/error.hpp"
#include "phpvd/model/network.hpp"
#include "phpvd/tensor/ops.hpp"
#include "phpvd/tensor/optim.hpp"

namespace phpvd::model {

using tensor::Tensor;

namespace {

constexpr std::uint64_t kShuffleStream = 0x5eed0001;
constexpr std::uint64_t kDropoutStream = 0x5eed0002;

std::size_t argmax_row(std::span<const double> row) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < row.size(); ++i) {
        if (row[i] > row[best]) best = i;
    }
    return best;
}

struct BatchView {
    std::vector<const Features*> features;
    std::vector<std::size_t> labels;
};

BatchView gather(std::span<const Example> examples, std::span<const std::size_t> order) {
    BatchView b;
    for (auto i : order) {
        b.features.push_back(&examples[i].features);
        b.labels.push_back(index_of(examples[i].label));
    }
    return b;
}

std::size_t count_correct(const Tensor& logits, std::span<const std::size_t> labels,
                          std::vector<Label>* predictions = nullptr) {
    const auto c = logits.size(1);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < labels.size(); ++r) {
        const auto p = argmax_row(logits.data().subspan(r * c, c));
        if (p == labels[r]) ++correct;
        if (predictions) predictions->push_back(label_from_index(p));
    }
    return correct;
}

}  // namespace

std::vector<double> class_weights(std::span<const Example> examples, std::size_t classes) {
    std::vector<double> counts(classes, 0.0);
    for (const auto& e : examples) counts.at(index_of(e.label)) += 1.0;
    std::vector<double> w(classes, 0.0);
    for (std::size_t c = 0; c < classes; ++c) {
        if (counts[c] > 0) w[c] = static_cast<double>(examples.size()) / (static_cast<double>(classes) * counts[c]);
    }
    return w;
}

EvalResult evaluate(const ModelParams& params, std::span<const Example> examples, std::size_t batch_size,
                    std::span<const double> weights) {
    if (examples.empty()) throw EmptyCorpus("evaluate on an empty set");
    if (batch_size == 0) throw ConfigMismatch("batch size must be at least 1");
    const tensor::NoGrad no_grad;
    EvalResult r;
    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
        const auto n = std::min(batch_size, order.size() - start);
        const auto b = gather(examples, std::span(order).subspan(start, n));
        const auto logits = forward_batch(params, b.features, false);
        loss_sum += tensor::cross_entropy(logits, b.labels, weights).item() * static_cast<double>(n);
        correct += count_correct(logits, b.labels, &r.predictions);
    }
    r.loss = loss_sum / static_cast<double>(examples.size());
    r.accuracy = static_cast<double>(correct) / static_cast<double>(examples.size());
    return r;
}

TrainResult train(const ArchitectureConfig& arch, const std::string& vocab_version,
                  std::span<const Example> train_set, std::span<const Example> val_set, const TrainConfig& tc,
                  const EpochCallback& on_epoch) {
    arch.validate();
    tc.validate();
    if (train_set.empty()) throw EmptyCorpus("empty training split");
    if (val_set.empty()) throw EmptyCorpus("empty validation split");
    for (const auto& e : train_set) check_features(arch, vocab_version, e.features);
    for (const auto& e : val_set) check_features(arch, vocab_version, e.features);

    const auto classes = arch.fc_dims.back();
    std::vector<double> weights;
    if (tc.class_weights) weights = class_weights(train_set, classes);

    auto params = ModelParams::init(arch, tc.seed);
    tensor::Adam adam(params.tensors(), tc.adam);
    tensor::PlateauScheduler scheduler(tc.scheduler);
    Rng shuffle_rng(tc.seed ^ kShuffleStream);
    Rng dropout_rng(tc.seed ^ kDropoutStream);

    TrainResult result;
    bool have_best = false;
    double best_val = 0.0;
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 1; epoch <= tc.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        EpochRecord rec;
        rec.epoch = epoch;
        rec.lr = adam.lr();
        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
            const auto n = std::min(tc.batch_size, order.size() - start);
            const auto b = gather(train_set, std::span(order).subspan(start, n));
            adam.zero_grad();
            const auto logits = forward_batch(params, b.features, true, &dropout_rng);
            auto loss = tensor::cross_entropy(logits, b.labels, weights);
            const double l = loss.item();
            if (!std::isfinite(l)) {
                result.diverged = true;
                break;
            }
            loss.backward();
            adam.step();
            loss_sum += l * static_cast<double>(n);
            correct += count_correct(logits, b.labels);
        }
        if (result.diverged) break;
        rec.train_loss = loss_sum / static_cast<double>(train_set.size());
        rec.train_acc = static_cast<double>(correct) / static_cast<double>(train_set.size());
        const auto val = evaluate(params, val_set, tc.batch_size, weights);
        rec.val_loss = val.loss;
        rec.val_acc = val.accuracy;
        if (!std::isfinite(rec.val_loss)) {
            result.diverged = true;
            break;
        }
        if (!have_best || rec.val_loss < best_val) {
            have_best = true;
            best_val = rec.val_loss;
            result.params = params.clone();
            result.best_epoch = epoch;
        }
        adam.set_lr(scheduler.step(rec.val_loss, adam.lr()));
        result.log.push_back(rec);
        if (on_epoch) on_epoch(rec);
    }
    if (!have_best) throw DivergenceDetected("training diverged before the first epoch completed");
    result.params.set_requires_grad(false);
    return result;
}

std::string render_log_csv(std::span<const EpochRecord> log) {
    std::string out = "epoch,train_loss,val_loss,lr,train_acc,val_acc\n";
    char buf[256];
    for (const auto& r : log) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.epoch, r.train_loss, r.val_loss, r.lr,
                      r.train_acc, r.val_acc);
        out += buf;
    }
    return out;
}

std::vector<Example> make_examples(std::span<const corpus::Sample> samples, const Featurizer& f,
                                   std::size_t threads, std::size_t* dropped) {
    std::vector<std::size_t> kept;
    auto feats = featurize_all(samples, f, threads, nullptr, &kept);
    std::vector<Example> out;
    out.reserve(feats.size());
    for (std::size_t i = 0; i < feats.size(); ++i) out.push_back({std::move(feats[i]), samples[kept[i]].label});
    if (dropped) *dropped = samples.size() - kept.size();
    return out;
}

TrainedModel train_model(std::span<const corpus::Sample> train_samples, std::span<const corpus::Sample> val_samples,
                         ArchitectureConfig arch, const php::KeepList& keep, const TrainConfig& tc,
                         const EpochCallback& on_epoch) {
    for (const auto& s : train_samples) {
        if (s.granularity != arch.granularity) throw ConfigMismatch("training sample granularity differs from model");
    }
    auto vocab = build_vocabulary(train_samples, arch.granularity, keep);
    arch.vocab_size = vocab.size();
    const Featurizer f(vocab, keep, arch.granularity, arch.seq_len);
    std::size_t dropped_train = 0, dropped_val = 0;
    const auto train_ex = make_examples(train_samples, f, tc.threads, &dropped_train);
    const auto val_ex = make_examples(val_samples, f, tc.threads, &dropped_val);
    auto r = train(arch, vocab.version(), train_ex, val_ex, tc, on_epoch);
    return TrainedModel{Model{std::move(r.params), std::move(vocab), keep}, std::move(r.log), r.best_epoch,
                        r.diverged, dropped_train + dropped_val};
}

}  // namespace phpvd::model
