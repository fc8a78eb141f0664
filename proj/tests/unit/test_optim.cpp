// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <vector>

#include "phpvd/tensor/ops.hpp"
#include "phpvd/tensor/optim.hpp"

using namespace phpvd::tensor;

TEST_CASE("adam with a zero gradient leaves everything at rest") {
    std::vector<double> w{1.0, -2.0};
    const std::vector<double> g{0.0, 0.0};
    AdamState st;
    adam_step(w, g, st, AdamConfig{});
    CHECK(w == std::vector<double>{1.0, -2.0});
    CHECK(st.m == std::vector<double>{0.0, 0.0});
    CHECK(st.v == std::vector<double>{0.0, 0.0});
    adam_step(w, {}, st, AdamConfig{});
    CHECK(w == std::vector<double>{1.0, -2.0});
}

TEST_CASE("adam first step moves by lr against the gradient sign") {
    std::vector<double> w{0.0, 0.0};
    const std::vector<double> g{3.0, -0.01};
    AdamState st;
    AdamConfig cfg;
    cfg.lr = 0.01;
    cfg.eps = 1e-12;
    adam_step(w, g, st, cfg);
    CHECK(w[0] == doctest::Approx(-0.01).epsilon(1e-9));
    CHECK(w[1] == doctest::Approx(0.01).epsilon(1e-7));
}

TEST_CASE("adam on w^2 matches a scalar oracle for three steps") {
    AdamConfig cfg;
    cfg.lr = 0.1;
    // Oracle.
    double w = 1.0, m = 0.0, v = 0.0;
    std::vector<double> want;
    for (int t = 1; t <= 3; ++t) {
        const double g = 2.0 * w;
        m = 0.9 * m + 0.1 * g;
        v = 0.999 * v + 0.001 * g * g;
        const double mh = m / (1.0 - std::pow(0.9, t));
        const double vh = v / (1.0 - std::pow(0.999, t));
        w -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
        want.push_back(w);
    }
    // Through the tape and the optimizer object.
    auto param = Tensor::vector({1.0}, true);
    Adam opt({param}, cfg);
    for (int t = 0; t < 3; ++t) {
        opt.zero_grad();
        sum(mul(param, param)).backward();
        opt.step();
        CHECK(std::abs(param.at(0) - want[static_cast<std::size_t>(t)]) <= 1e-12);
    }
    CHECK(opt.states()[0].t == 3);
}

TEST_CASE("plateau scheduler") {
    SUBCASE("strictly decreasing losses keep the rate") {
        PlateauScheduler s;
        double lr = 1e-3;
        for (int i = 0; i < 30; ++i) lr = s.step(1.0 - 0.01 * i, lr);
        CHECK(lr == 1e-3);
    }
    SUBCASE("ten flat epochs after the best reduce the rate tenfold") {
        PlateauScheduler s;
        double lr = 1e-3;
        lr = s.step(0.5, lr);
        for (int i = 0; i < 9; ++i) {
            lr = s.step(0.5, lr);
            CHECK(lr == 1e-3);
        }
        lr = s.step(0.5, lr);
        CHECK(lr == doctest::Approx(1e-4).epsilon(1e-12));
        CHECK(s.bad_epochs() == 0);
    }
    SUBCASE("improvements below the threshold count as flat") {
        PlateauScheduler s;
        double lr = 1.0;
        lr = s.step(1.0, lr);
        for (int i = 1; i <= 10; ++i) lr = s.step(1.0 - 5e-6 * i, lr);
        CHECK(lr == doctest::Approx(0.1));
    }
    SUBCASE("the rate never drops below min_lr") {
        PlateauConfig cfg;
        cfg.patience = 1;
        PlateauScheduler s(cfg);
        double lr = 1e-8;
        for (int i = 0; i < 5; ++i) lr = s.step(1.0, lr);
        CHECK(lr == 1e-8);
    }
}
