// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

#include "endd/error.hpp"
#include "endd/optim.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace endd::optim;

namespace {

// Textbook Adam written from the published update rule, kept independent of
// the folded-step form in optim.cpp.
struct ReferenceAdam {
    double m = 0.0, v = 0.0;
    int t = 0;
    double step(double x, double g, double lr) {
        ++t;
        m = 0.9 * m + 0.1 * g;
        v = 0.999 * v + 0.001 * g * g;
        const double m_hat = m / (1.0 - std::pow(0.9, t));
        const double v_hat = v / (1.0 - std::pow(0.999, t));
        return x - lr * m_hat / (std::sqrt(v_hat) + 1e-8);
    }
};

} // namespace

TEST_CASE("adam: zero gradient leaves parameters and moments alone") {
    std::vector<double> p{1.0, -2.0};
    const std::vector<double> g{0.0, 0.0};
    AdamState s(2);
    adam_step(p, g, s, 0.1);
    CHECK(p == std::vector<double>{1.0, -2.0});
    CHECK(s.m == std::vector<double>{0.0, 0.0});
    CHECK(s.v == std::vector<double>{0.0, 0.0});
    CHECK(s.t == 1);
}

TEST_CASE("adam: first bias-corrected step") {
    std::vector<double> p{0.0};
    const std::vector<double> g{2.0};
    AdamState s(1);
    adam_step(p, g, s, 0.1);
    CHECK(std::abs(p[0] - (-0.1 * 2.0 / (2.0 + 1e-8))) < 1e-15);
    CHECK(std::abs(p[0] + 0.0999999995) < 1e-15);
}

TEST_CASE("adam: five-step trajectory matches the reference on a quadratic") {
    // f(x) = 0.5 * 3 * (x - 1)^2
    std::vector<double> p{4.0};
    AdamState s(1);
    ReferenceAdam ref;
    double x_ref = 4.0;
    for (int i = 0; i < 5; ++i) {
        const std::vector<double> g{3.0 * (p[0] - 1.0)};
        adam_step(p, g, s, 0.05);
        x_ref = ref.step(x_ref, 3.0 * (x_ref - 1.0), 0.05);
        CHECK(std::abs(p[0] - x_ref) < 1e-12);
    }
}

TEST_CASE("adam: scale invariance at t=1 with tiny epsilon") {
    AdamHyper h;
    h.eps = 1e-16;
    std::vector<double> a{0.0, 0.0, 0.0};
    std::vector<double> b{0.0, 0.0, 0.0};
    const std::vector<double> g{0.3, -1.7, 4e-3};
    std::vector<double> g1000(g);
    for (double& v : g1000) {
        v *= 1000.0;
    }
    AdamState sa(3, h), sb(3, h);
    adam_step(a, g, sa, 0.01);
    adam_step(b, g1000, sb, 0.01);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(a[i] - b[i]) / std::abs(a[i]) < 1e-6);
    }
}

TEST_CASE("adam: shape and learning-rate errors") {
    std::vector<double> p{0.0, 1.0};
    const std::vector<double> g{1.0};
    AdamState s(2);
    CHECK_THROWS_AS(adam_step(p, g, s, 0.1), endd::ShapeError);
    const std::vector<double> g2{1.0, 1.0};
    CHECK_THROWS_AS(adam_step(p, g2, s, 0.0), endd::DomainError);
}

TEST_CASE("adam: model overload walks every parameter") {
    endd::Rng rng(1);
    const std::size_t dims[] = {2, 3, 2};
    auto model = endd::make_mlp(dims, rng);
    auto before = model;
    auto grads = endd::Gradients::zeros_like(model);
    grads.bias[1][1] = 1.0;
    AdamState s(model.parameter_count());
    adam_step(model, grads, s, 0.1);
    CHECK(model.layers[0] == before.layers[0]);
    CHECK(model.layers[1].weight == before.layers[1].weight);
    CHECK(model.layers[1].bias[0] == before.layers[1].bias[0]);
    CHECK(model.layers[1].bias[1] == doctest::Approx(before.layers[1].bias[1] - 0.1));
}

TEST_CASE("one-cycle learning rate") {
    const LrSchedule s{1e-3, 30, 45};
    CHECK(one_cycle_lr(0, s) == doctest::Approx(1e-4).epsilon(1e-14));
    CHECK(one_cycle_lr(15, s) == doctest::Approx(1e-3).epsilon(1e-14));
    CHECK(one_cycle_lr(30, s) == doctest::Approx(1e-5).epsilon(1e-14));
    CHECK(one_cycle_lr(44, s) == doctest::Approx(1e-5).epsilon(1e-14));
    for (int e = 0; e < 45; ++e) {
        CHECK(one_cycle_lr(e, s) > 0.0);
    }
    // Continuity: the linear pieces meet at the boundaries.
    for (const LrSchedule& sched : {s, LrSchedule{2e-3, 7, 20}}) {
        const double half = sched.cycle_len / 2.0;
        const double cycle = sched.cycle_len;
        CHECK(std::abs(one_cycle_lr(half - 1e-12, sched) - one_cycle_lr(half, sched)) < 1e-12);
        CHECK(std::abs(one_cycle_lr(cycle - 1e-12, sched) - one_cycle_lr(cycle, sched)) < 1e-12);
    }
    // Cycle longer than training (150-epoch cycle with 100 epochs) is defined.
    const LrSchedule long_cycle{1e-3, 150, 100};
    CHECK(one_cycle_lr(99, long_cycle) > 0.0);
}

TEST_CASE("annealed temperature") {
    const TemperatureSchedule s{10.0, 60, 90, true};
    CHECK(annealed_temperature(0, s) == 10.0);
    CHECK(annealed_temperature(29, s) == 10.0);
    CHECK(annealed_temperature(30, s) == 10.0);
    CHECK(annealed_temperature(45, s) == doctest::Approx(5.5).epsilon(1e-15));
    CHECK(annealed_temperature(60, s) == 1.0);
    CHECK(annealed_temperature(75, s) == 1.0);
    double prev = 10.0;
    for (int e = 0; e < 90; ++e) {
        const double t = annealed_temperature(e, s);
        CHECK(t <= prev);
        CHECK(t >= 1.0);
        CHECK(t <= 10.0);
        prev = t;
    }
    const TemperatureSchedule fixed{2.5, 60, 90, false};
    for (int e = 0; e < 90; ++e) {
        CHECK(annealed_temperature(e, fixed) == 2.5);
    }
}
