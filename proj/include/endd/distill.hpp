// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "endd/ensemble.hpp"
#include "endd/optim.hpp"
#include "endd/train.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace endd::distill {

using train::train_dnn;

enum class Mode { end, end2 };

std::string_view to_string(Mode mode);
/// Accepts "end" and "end2"; throws ConfigError otherwise.
Mode parse_mode(std::string_view text);

struct DistillConfig {
    Mode mode = Mode::end2;
    double t_fixed = 2.5; // EnD temperature
    double t0 = 10.0;     // EnD^2 initial temperature
    /// Unset means the per-mode default: annealed for EnD^2, fixed for EnD.
    std::optional<bool> annealed;
    double gamma = 1e-4;  // central smoothing
    train::TrainConfig train;
    std::uint64_t seed = 0;

    bool is_annealed() const { return annealed.value_or(mode == Mode::end2); }
    /// Temperature schedule implied by mode, temperatures and the annealing flag.
    optim::TemperatureSchedule temperature_schedule() const;
    /// Throws ConfigError on out-of-range values.
    void validate() const;
};

struct LossAndGrad {
    double loss = 0.0;
    std::vector<double> grad; // dL/dlogits
};

/// T^2 KL(q || softmax(student/T)) with q the mean of the tempered member
/// softmaxes. `member_logits` is M x K.
LossAndGrad end_loss(std::span<const double> student_logits, const Matrix& member_logits, double temperature);

/// Per-input EnD^2 loss and its gradient with respect to the student logits:
/// members are tempered at T, centrally smoothed with gamma, and the student
/// concentration is exp(z / T). At T = 1 this is the plain Dirichlet NLL.
LossAndGrad end2_loss(std::span<const double> student_logits, const Matrix& member_logits,
                      double temperature, double gamma);

/// Trains a fresh student on the transfer set: EnD (mode end) or EnD^2 (mode
/// end2). Auxiliary rows are treated exactly like in-domain rows.
Mlp train_distilled(const ensemble::TransferSet& transfer, const DistillConfig& cfg,
                    std::vector<train::EpochStats>* log = nullptr);

} // namespace endd::distill
