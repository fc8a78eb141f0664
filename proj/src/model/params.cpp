// SPDX-License-Identifier: Apache-2.0
#include "phpvd/model/params.hpp"

#include <cmath>

#include "phpvd/common/rng.hpp"

namespace phpvd::model {

using tensor::Tensor;

namespace {

enum class Init { Weight, Bias, Embedding };

struct Slot {
    std::string name;
    Tensor* t;
    tensor::Shape shape;
    Init init;
    std::size_t fan_in;
};

// One list drives naming, shapes and init order.
std::vector<Slot> slots(ModelParams& p) {
    const auto& a = p.arch;
    std::vector<Slot> s;
    const auto V = a.vocab_size, E = a.embed_dim, H = a.gru_hidden;
    s.push_back({"embed.token", &p.token_embed, {V, E}, Init::Embedding, 0});
    s.push_back({"embed.node", &p.node_embed, {V, E}, Init::Embedding, 0});
    p.gru.resize(a.gru_layers);
    for (std::size_t l = 0; l < a.gru_layers; ++l) {
        const auto D = l == 0 ? E : 2 * H;
        for (int dir = 0; dir < 2; ++dir) {
            auto& g = dir == 0 ? p.gru[l].first : p.gru[l].second;
            g.direction = dir == 0 ? tensor::Direction::Forward : tensor::Direction::Backward;
            const auto prefix = "gru.l" + std::to_string(l) + (dir == 0 ? ".fwd." : ".bwd.");
            s.push_back({prefix + "W_ir", &g.W_ir, {H, D}, Init::Weight, D});
            s.push_back({prefix + "W_iz", &g.W_iz, {H, D}, Init::Weight, D});
            s.push_back({prefix + "W_in", &g.W_in, {H, D}, Init::Weight, D});
            s.push_back({prefix + "W_hr", &g.W_hr, {H, H}, Init::Weight, H});
            s.push_back({prefix + "W_hz", &g.W_hz, {H, H}, Init::Weight, H});
            s.push_back({prefix + "W_hn", &g.W_hn, {H, H}, Init::Weight, H});
            s.push_back({prefix + "b_ir", &g.b_ir, {H}, Init::Bias, 0});
            s.push_back({prefix + "b_iz", &g.b_iz, {H}, Init::Bias, 0});
            s.push_back({prefix + "b_in", &g.b_in, {H}, Init::Bias, 0});
            s.push_back({prefix + "b_hr", &g.b_hr, {H}, Init::Bias, 0});
            s.push_back({prefix + "b_hz", &g.b_hz, {H}, Init::Bias, 0});
            s.push_back({prefix + "b_hn", &g.b_hn, {H}, Init::Bias, 0});
        }
    }
    const auto layers = a.gcn_dims.size() - 1;
    p.gcn.resize(layers);
    p.pool.resize(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        const auto din = a.gcn_dims[l], dout = a.gcn_dims[l + 1];
        s.push_back({"gcn.l" + std::to_string(l) + ".Theta", &p.gcn[l].Theta, {din, dout}, Init::Weight, din});
        s.push_back({"pool.l" + std::to_string(l) + ".w", &p.pool[l].w, {2 * dout}, Init::Weight, 2 * dout});
        s.push_back({"pool.l" + std::to_string(l) + ".b", &p.pool[l].b, {1}, Init::Bias, 0});
    }
    p.fc.resize(a.fc_dims.size());
    std::size_t in = a.fc_input_dim();
    for (std::size_t l = 0; l < a.fc_dims.size(); ++l) {
        const auto out = a.fc_dims[l];
        s.push_back({"fc.l" + std::to_string(l) + ".W", &p.fc[l].W, {out, in}, Init::Weight, in});
        s.push_back({"fc.l" + std::to_string(l) + ".b", &p.fc[l].b, {out}, Init::Bias, 0});
        in = out;
    }
    return s;
}

}  // namespace

ModelParams ModelParams::init(const ArchitectureConfig& arch, std::uint64_t seed) {
    arch.validate();
    ModelParams p;
    p.arch = arch;
    Rng rng(seed);
    for (auto& s : slots(p)) {
        std::vector<double> data(tensor::numel(s.shape), 0.0);
        if (s.init == Init::Weight) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(s.fan_in));
            for (auto& v : data) v = rng.uniform(-bound, bound);
        } else if (s.init == Init::Embedding) {
            for (auto& v : data) v = 0.1 * rng.normal();
        }
        *s.t = Tensor(s.shape, std::move(data), true);
    }
    return p;
}

ModelParams ModelParams::shaped(const ArchitectureConfig& arch) {
    arch.validate();
    ModelParams p;
    p.arch = arch;
    for (auto& s : slots(p)) *s.t = Tensor::zeros(s.shape, true);
    return p;
}

std::vector<std::pair<std::string, Tensor>> ModelParams::named() const {
    // slots() only needs to write layer containers; work on a shallow copy.
    ModelParams copy = *this;
    std::vector<std::pair<std::string, Tensor>> out;
    for (auto& s : slots(copy)) out.emplace_back(s.name, *s.t);
    return out;
}

std::vector<Tensor> ModelParams::tensors() const {
    std::vector<Tensor> out;
    for (auto& [name, t] : named()) out.push_back(t);
    return out;
}

std::size_t ModelParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors()) n += t.numel();
    return n;
}

ModelParams ModelParams::clone() const {
    ModelParams copy = *this;
    for (auto& s : slots(copy)) *s.t = s.t->clone();
    return copy;
}

void ModelParams::set_requires_grad(bool on) {
    for (auto& t : tensors()) t.set_requires_grad(on);
}

}  // namespace phpvd::model
