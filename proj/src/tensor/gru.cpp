// SPDX-License-Identifier: Apache-2.0
#include "phpvd/tensor/gru.hpp"

#include <Eigen/Core>
#include <cmath>

#include "phpvd/common/error.hpp"
#include "phpvd/tensor/ops.hpp"

namespace phpvd::tensor {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
using CMapMat = Eigen::Map<const RowMat>;
using MapMat = Eigen::Map<RowMat>;

// Three H-row blocks stacked into one 3H-row matrix.
RowMat stack3(const Tensor& a, const Tensor& b, const Tensor& c) {
    const auto h = static_cast<Eigen::Index>(a.rows());
    const auto w = static_cast<Eigen::Index>(a.cols());
    RowMat m(3 * h, w);
    m.middleRows(0, h) = CMapMat(a.data().data(), h, w);
    m.middleRows(h, h) = CMapMat(b.data().data(), h, w);
    m.middleRows(2 * h, h) = CMapMat(c.data().data(), h, w);
    return m;
}

void add_block(detail::Node& p, const RowMat& g, Eigen::Index block, Eigen::Index h) {
    if (!p.requires_grad) return;
    auto& dst = p.ensure_grad();
    MapMat(dst.data(), h, g.cols()) += g.middleRows(block * h, h);
}

double sigm(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

void GruLayerParams::validate() const {
    const auto H = W_hr.rows();
    const auto D = W_ir.cols();
    auto check = [](bool ok) {
        if (!ok) throw ShapeMismatch("inconsistent GRU layer parameters");
    };
    for (const auto* w : {&W_ir, &W_iz, &W_in}) check(w->dim() == 2 && w->rows() == H && w->cols() == D);
    for (const auto* w : {&W_hr, &W_hz, &W_hn}) check(w->dim() == 2 && w->rows() == H && w->cols() == H);
    for (const auto* b : {&b_ir, &b_iz, &b_in, &b_hr, &b_hz, &b_hn}) check(b->numel() == H);
}

Tensor gru_sequence(const Tensor& x, const GruLayerParams& p, const std::optional<Tensor>& h0) {
    p.validate();
    const auto H = static_cast<Eigen::Index>(p.hidden_size());
    const auto D = static_cast<Eigen::Index>(p.input_size());
    if (x.dim() != 2 || static_cast<Eigen::Index>(x.size(1)) != D) {
        throw ShapeMismatch("gru input " + shape_string(x.shape()) + " vs D_in " + std::to_string(D));
    }
    if (h0 && static_cast<Eigen::Index>(h0->numel()) != H) throw ShapeMismatch("gru h0 length");
    const auto T = static_cast<Eigen::Index>(x.size(0));
    const bool reverse = p.direction == Direction::Backward;

    RowMat Wi = stack3(p.W_ir, p.W_iz, p.W_in);
    RowMat Wh = stack3(p.W_hr, p.W_hz, p.W_hn);
    Vec bi(3 * H), bh(3 * H);
    bi << Eigen::Map<const Vec>(p.b_ir.data().data(), H), Eigen::Map<const Vec>(p.b_iz.data().data(), H),
        Eigen::Map<const Vec>(p.b_in.data().data(), H);
    bh << Eigen::Map<const Vec>(p.b_hr.data().data(), H), Eigen::Map<const Vec>(p.b_hz.data().data(), H),
        Eigen::Map<const Vec>(p.b_hn.data().data(), H);

    const CMapMat X(x.data().data(), T, D);
    RowMat GI = X * Wi.transpose();
    GI.rowwise() += bi.transpose();

    RowMat R(T, H), Z(T, H), N(T, H), GHN(T, H), Hprev(T, H);
    std::vector<double> out(static_cast<std::size_t>(T * H));
    MapMat Out(out.data(), T, H);
    Vec h = h0 ? Vec(Eigen::Map<const Vec>(h0->data().data(), H)) : Vec::Zero(H);
    Vec gh(3 * H);
    for (Eigen::Index s = 0; s < T; ++s) {
        const auto t = reverse ? T - 1 - s : s;
        gh.noalias() = Wh * h;
        gh += bh;
        Hprev.row(t) = h.transpose();
        for (Eigen::Index k = 0; k < H; ++k) {
            const double r = sigm(GI(t, k) + gh(k));
            const double z = sigm(GI(t, H + k) + gh(H + k));
            const double n = std::tanh(GI(t, 2 * H + k) + r * gh(2 * H + k));
            R(t, k) = r;
            Z(t, k) = z;
            N(t, k) = n;
            GHN(t, k) = gh(2 * H + k);
            h(k) = (1.0 - z) * n + z * h(k);
        }
        Out.row(t) = h.transpose();
    }

    std::vector<Tensor> parents{x,      p.W_ir, p.W_iz, p.W_in, p.W_hr, p.W_hz, p.W_hn,
                                p.b_ir, p.b_iz, p.b_in, p.b_hr, p.b_hz, p.b_hn};
    if (h0) parents.push_back(*h0);

    auto backward = [=, Wi = std::move(Wi), Wh = std::move(Wh), R = std::move(R), Z = std::move(Z),
                     N = std::move(N), GHN = std::move(GHN),
                     Hprev = std::move(Hprev)](detail::Node& self) {
        const CMapMat gout(self.grad.data(), T, H);
        RowMat dGI(T, 3 * H), dGH(T, 3 * H);
        Vec dh = Vec::Zero(H);
        for (Eigen::Index s = T - 1; s >= 0; --s) {
            const auto t = reverse ? T - 1 - s : s;
            dh += gout.row(t).transpose();
            for (Eigen::Index k = 0; k < H; ++k) {
                const double r = R(t, k), z = Z(t, k), n = N(t, k);
                const double dn = dh(k) * (1.0 - z);
                const double dz = dh(k) * (Hprev(t, k) - n);
                const double dan = dn * (1.0 - n * n);
                const double dr = dan * GHN(t, k);
                const double dar = dr * r * (1.0 - r);
                const double daz = dz * z * (1.0 - z);
                dGI(t, k) = dar;
                dGI(t, H + k) = daz;
                dGI(t, 2 * H + k) = dan;
                dGH(t, k) = dar;
                dGH(t, H + k) = daz;
                dGH(t, 2 * H + k) = dan * r;
                dh(k) *= z;
            }
            dh.noalias() += Wh.transpose() * dGH.row(t).transpose();
        }
        auto& px = *self.parents[0];
        if (px.requires_grad) {
            auto& g = px.ensure_grad();
            MapMat(g.data(), T, D).noalias() += dGI * Wi;
        }
        const CMapMat Xs(px.data.data(), T, D);
        const RowMat dWi = dGI.transpose() * Xs;
        const RowMat dWh = dGH.transpose() * Hprev;
        for (Eigen::Index b = 0; b < 3; ++b) {
            add_block(*self.parents[1 + b], dWi, b, H);
            add_block(*self.parents[4 + b], dWh, b, H);
        }
        const RowMat dbi = dGI.colwise().sum().transpose();
        const RowMat dbh = dGH.colwise().sum().transpose();
        for (Eigen::Index b = 0; b < 3; ++b) {
            add_block(*self.parents[7 + b], dbi, b, H);
            add_block(*self.parents[10 + b], dbh, b, H);
        }
        if (self.parents.size() > 13 && self.parents[13]->requires_grad) {
            auto& g = self.parents[13]->ensure_grad();
            Eigen::Map<Vec>(g.data(), H) += dh;
        }
    };
    return Tensor::make_result({static_cast<std::size_t>(T), static_cast<std::size_t>(H)}, std::move(out),
                               parents, std::move(backward));
}

Tensor gru_cell(const Tensor& x, const Tensor& h_prev, const GruLayerParams& p) {
    if (x.numel() != p.input_size() || h_prev.numel() != p.hidden_size()) {
        throw ShapeMismatch("gru_cell: x " + shape_string(x.shape()) + ", h " + shape_string(h_prev.shape()));
    }
    GruLayerParams forward = p;
    forward.direction = Direction::Forward;
    const auto out = gru_sequence(reshape(x, {1, x.numel()}), forward, h_prev);
    return reshape(out, {p.hidden_size()});
}

Tensor gru_forward(const Tensor& x, const std::vector<GruLayerPair>& layers, double dropout_p,
                   bool training, Rng* rng) {
    if (layers.empty()) throw ShapeMismatch("gru_forward: no layers");
    const auto H = layers.front().first.hidden_size();
    const auto width = 2 * layers.size() * H;
    if (x.dim() != 2) throw ShapeMismatch("gru_forward: input must be T x D");
    const auto T = x.size(0);
    if (T == 0) return Tensor::zeros({width});

    Tensor in = x;
    Tensor finals;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& [fp, bp] = layers[l];
        const auto f = gru_sequence(in, fp);
        const auto b = gru_sequence(in, bp);
        const auto pair = concat_cols(slice_rows(f, T - 1, 1), slice_rows(b, 0, 1));
        finals = finals.defined() ? concat_cols(finals, pair) : pair;
        in = concat_cols(f, b);
        if (training && dropout_p > 0.0 && l + 1 < layers.size()) {
            if (rng == nullptr) throw ShapeMismatch("gru_forward: dropout needs an rng");
            in = dropout(in, dropout_p, true, *rng);
        }
    }
    return reshape(finals, {width});
}

}  // namespace phpvd::tensor
