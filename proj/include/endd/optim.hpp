// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "endd/net.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace endd::optim {

struct AdamHyper {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam moment accumulators over a flat parameter vector.
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t t = 0;
    AdamHyper hyper;

    AdamState() = default;
    explicit AdamState(std::size_t n, AdamHyper h = {}) : m(n, 0.0), v(n, 0.0), hyper(h) {}
};

/// One bias-corrected Adam update of `params` in place. Throws ShapeError
/// when sizes differ and DomainError when lr <= 0.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr);

/// Same update applied to every weight and bias of `model`, in layer order.
/// `state` must have been sized with model.parameter_count().
void adam_step(Mlp& model, const Gradients& grads, AdamState& state, double lr);

/// 1-cycle learning-rate policy, piecewise linear in the epoch.
struct LrSchedule {
    double peak_lr = 1e-3; // eta_0
    int cycle_len = 30;
    int total_epochs = 45;
};

/// eta0/10 -> eta0 over [0, C/2), eta0 -> eta0/100 over [C/2, C), eta0/100 after.
/// Accepts fractional epochs; the pieces join continuously.
double one_cycle_lr(double epoch, const LrSchedule& sched);

struct TemperatureSchedule {
    double t0 = 10.0;
    int cycle_len = 60;
    int total_epochs = 90;
    bool annealed = true;
};

/// Temperature for `epoch`: T0 for the first half-cycle, then linear down to
/// 1 at the end of the cycle, then 1. Constant T0 when not annealed.
double annealed_temperature(int epoch, const TemperatureSchedule& sched);

} // namespace endd::optim
