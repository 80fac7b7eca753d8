// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

#include "endd/optim.hpp"

#include "endd/error.hpp"

#include <cmath>

namespace endd::optim {
namespace {

void update(double* p, const double* g, double* m, double* v, std::size_t n, const AdamHyper& h,
            double step, double bc2) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g[i];
        v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g[i] * g[i];
        p[i] -= step * m[i] / (std::sqrt(v[i] / bc2) + h.eps);
    }
}

void check_lr(double lr) {
    if (!(lr > 0.0) || !std::isfinite(lr)) {
        throw DomainError("adam_step: learning rate must be finite and > 0");
    }
}

} // namespace

// step = lr / (1 - beta1^t) folds the first-moment bias correction in.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr) {
    check_lr(lr);
    if (params.size() != grads.size() || state.m.size() != params.size() ||
        state.v.size() != params.size()) {
        throw ShapeError("adam_step: parameter, gradient and state sizes differ");
    }
    state.t += 1;
    const double t = static_cast<double>(state.t);
    const double bc1 = 1.0 - std::pow(state.hyper.beta1, t);
    const double bc2 = 1.0 - std::pow(state.hyper.beta2, t);
    update(params.data(), grads.data(), state.m.data(), state.v.data(), params.size(), state.hyper,
           lr / bc1, bc2);
}

void adam_step(Mlp& model, const Gradients& grads, AdamState& state, double lr) {
    check_lr(lr);
    if (state.m.size() != model.parameter_count() || state.v.size() != model.parameter_count() ||
        grads.weight.size() != model.layers.size() || grads.bias.size() != model.layers.size()) {
        throw ShapeError("adam_step: state or gradients do not match the model");
    }
    state.t += 1;
    const double t = static_cast<double>(state.t);
    const double step = lr / (1.0 - std::pow(state.hyper.beta1, t));
    const double bc2 = 1.0 - std::pow(state.hyper.beta2, t);
    std::size_t offset = 0;
    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        auto w = model.layers[li].weight.values();
        const auto gw = grads.weight[li].values();
        if (gw.size() != w.size() || grads.bias[li].size() != model.layers[li].bias.size()) {
            throw ShapeError("adam_step: gradient layer " + std::to_string(li) + " has wrong shape");
        }
        update(w.data(), gw.data(), state.m.data() + offset, state.v.data() + offset, w.size(),
               state.hyper, step, bc2);
        offset += w.size();
        auto& b = model.layers[li].bias;
        update(b.data(), grads.bias[li].data(), state.m.data() + offset, state.v.data() + offset,
               b.size(), state.hyper, step, bc2);
        offset += b.size();
    }
}

double one_cycle_lr(double epoch, const LrSchedule& sched) {
    const double peak = sched.peak_lr;
    const double start = peak / 10.0;
    const double floor = peak / 100.0;
    const double cycle = static_cast<double>(sched.cycle_len);
    const double half = cycle / 2.0;
    const double e = epoch;
    if (e < half) {
        return start + (peak - start) * (e / half);
    }
    if (e < cycle) {
        return peak + (floor - peak) * ((e - half) / half);
    }
    return floor;
}

double annealed_temperature(int epoch, const TemperatureSchedule& sched) {
    if (!sched.annealed) {
        return sched.t0;
    }
    const double half = static_cast<double>(sched.cycle_len) / 2.0;
    const double e = static_cast<double>(epoch);
    if (e < half) {
        return sched.t0;
    }
    if (epoch < sched.cycle_len) {
        return sched.t0 + (1.0 - sched.t0) * ((e - half) / half);
    }
    return 1.0;
}

} // namespace endd::optim
