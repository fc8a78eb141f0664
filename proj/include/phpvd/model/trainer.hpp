// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "phpvd/corpus/label.hpp"
#include "phpvd/corpus/sample.hpp"
#include "phpvd/model/checkpoint.hpp"
#include "phpvd/model/config.hpp"
#include "phpvd/model/featurizer.hpp"
#include "phpvd/model/params.hpp"

namespace phpvd::model {

struct Example {
    Features features;
    Label label = Label::Safe;
};

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
    double lr = 0.0;  // rate used during the epoch
    double train_acc = 0.0;
    double val_acc = 0.0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

struct TrainResult {
    ModelParams params;  // lowest validation loss seen
    std::vector<EpochRecord> log;
    std::size_t best_epoch = 0;
    bool diverged = false;
};

struct EvalResult {
    double loss = 0.0;
    double accuracy = 0.0;
    std::vector<Label> predictions;
};

/// Inverse-frequency weights N / (classes * n_c); absent classes get 0.
std::vector<double> class_weights(std::span<const Example> examples, std::size_t classes);

/// Batched inference-mode loss and accuracy.
EvalResult evaluate(const ModelParams& params, std::span<const Example> examples, std::size_t batch_size,
                    std::span<const double> weights = {});

/// Mini-batch Adam on mean cross-entropy with reduce-on-plateau on the
/// validation loss. Each epoch visits the training set once in a seeded
/// shuffled order. A non-finite training loss stops training and returns the
/// best parameters so far (DivergenceDetected if there are none yet).
TrainResult train(const ArchitectureConfig& arch, const std::string& vocab_version,
                  std::span<const Example> train_set, std::span<const Example> val_set, const TrainConfig& tc,
                  const EpochCallback& on_epoch = {});

/// "epoch,train_loss,val_loss,lr,train_acc,val_acc" rows.
std::string render_log_csv(std::span<const EpochRecord> log);

struct TrainedModel {
    Model model;
    std::vector<EpochRecord> log;
    std::size_t best_epoch = 0;
    bool diverged = false;
    std::size_t dropped = 0;  // samples that failed to lex
};

/// Builds the vocabulary from `train_samples`, featurizes both splits and
/// trains. `arch.vocab_size` is overwritten with the vocabulary size.
TrainedModel train_model(std::span<const corpus::Sample> train_samples, std::span<const corpus::Sample> val_samples,
                         ArchitectureConfig arch, const php::KeepList& keep, const TrainConfig& tc,
                         const EpochCallback& on_epoch = {});

/// Featurizes labelled samples, dropping those that fail to lex.
std::vector<Example> make_examples(std::span<const corpus::Sample> samples, const Featurizer& f,
                                   std::size_t threads, std::size_t* dropped = nullptr);

}  // namespace phpvd::model
