// SPDX-License-Identifier: Apache-2.0
#include "phpvd/model/config.hpp"

#include <json.hpp>

#include "phpvd/common/error.hpp"
#include "phpvd/common/hash.hpp"
#include "phpvd/php/encode.hpp"

namespace phpvd::model {

using nlohmann::json;

ArchitectureConfig ArchitectureConfig::for_granularity(Granularity g, std::size_t vocab_size) {
    ArchitectureConfig c;
    c.granularity = g;
    c.vocab_size = vocab_size;
    c.seq_len = php::sequence_length(g);
    return c;
}

void ArchitectureConfig::validate() const {
    auto fail = [](const std::string& what) { throw ConfigMismatch("architecture: " + what); };
    if (vocab_size < 2) fail("vocabulary must hold at least PAD and UNK");
    if (seq_len == 0 || cfg_node_len == 0 || embed_dim == 0) fail("zero length");
    if (gru_layers == 0 || gru_hidden == 0) fail("empty GRU");
    if (gcn_dims.size() < 2) fail("need at least one GCN layer");
    if (gcn_dims.front() != cfg_node_len * embed_dim) fail("GCN input width must be cfg_node_len * embed_dim");
    if (fc_dims.empty() || fc_dims.back() != 4) fail("the head must end in 4 classes");
    if (fc_dropout < 0.0 || fc_dropout >= 1.0 || gru_dropout < 0.0 || gru_dropout >= 1.0) fail("dropout out of range");
}

std::string ArchitectureConfig::to_json() const {
    json j;
    j["granularity"] = std::string(to_string(granularity));
    j["vocab_size"] = vocab_size;
    j["seq_len"] = seq_len;
    j["cfg_node_len"] = cfg_node_len;
    j["embed_dim"] = embed_dim;
    j["gru_layers"] = gru_layers;
    j["gru_hidden"] = gru_hidden;
    j["gru_dropout"] = gru_dropout;
    j["gcn_dims"] = gcn_dims;
    j["gcn_symmetric"] = gcn_symmetric;
    j["fc_dims"] = fc_dims;
    j["fc_dropout"] = fc_dropout;
    return j.dump();
}

ArchitectureConfig ArchitectureConfig::from_json(const std::string& text) {
    try {
        const auto j = json::parse(text);
        ArchitectureConfig c;
        c.granularity = parse_granularity(j.at("granularity").get<std::string>());
        c.vocab_size = j.at("vocab_size");
        c.seq_len = j.at("seq_len");
        c.cfg_node_len = j.at("cfg_node_len");
        c.embed_dim = j.at("embed_dim");
        c.gru_layers = j.at("gru_layers");
        c.gru_hidden = j.at("gru_hidden");
        c.gru_dropout = j.at("gru_dropout");
        c.gcn_dims = j.at("gcn_dims").get<std::vector<std::size_t>>();
        c.gcn_symmetric = j.at("gcn_symmetric");
        c.fc_dims = j.at("fc_dims").get<std::vector<std::size_t>>();
        c.fc_dropout = j.at("fc_dropout");
        return c;
    } catch (const json::exception& e) {
        throw ConfigMismatch(std::string("bad architecture JSON: ") + e.what());
    }
}

std::string ArchitectureConfig::hash() const { return to_hex(fnv1a64(to_json())); }

void TrainConfig::validate() const {
    if (batch_size == 0) throw ConfigMismatch("batch_size must be >= 1");
    if (epochs == 0) throw ConfigMismatch("epochs must be >= 1");
    if (!(adam.lr > 0.0)) throw ConfigMismatch("lr must be positive");
}

}  // namespace phpvd::model
