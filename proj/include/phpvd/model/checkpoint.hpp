// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "phpvd/model/featurizer.hpp"
#include "phpvd/model/params.hpp"
#include "phpvd/php/keep_list.hpp"
#include "phpvd/php/vocabulary.hpp"

namespace phpvd::model {

/// A trained network together with the preprocessing it was trained with.
struct Model {
    ModelParams params;
    php::Vocabulary vocab;
    php::KeepList keep;

    const ArchitectureConfig& arch() const noexcept { return params.arch; }
    Featurizer featurizer() const { return Featurizer(vocab, keep, arch().granularity, arch().seq_len); }
};

/// Binary layout (little-endian):
///   "PHPVDCK1" u32 version
///   str arch_json, str arch_hash, str vocab_version, str vocab, str keep_list
///   u64 tensor count, then per tensor: str name, u32 ndim, u64 dims..., f64 data...
/// where str is a u64 byte length followed by the bytes.
std::string serialize_checkpoint(const Model& m);

/// Throws CheckpointFormatError on any inconsistency, including a tensor
/// whose name or shape differs from what the architecture implies.
Model parse_checkpoint(std::string_view bytes);

void save_checkpoint(const Model& m, const std::filesystem::path& path);

/// Throws MissingCheckpoint when the file does not exist.
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace phpvd::model
