// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "endd/data.hpp"
#include "endd/net.hpp"
#include "endd/optim.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace endd::train {

/// Shared minibatch training settings.
struct TrainConfig {
    std::vector<std::size_t> hidden = {64, 64};
    int epochs = 60;
    int cycle_len = 40;
    double peak_lr = 1e-2;
    double keep_prob = 0.9;
    std::size_t batch_size = 128;
};

struct EpochStats {
    int epoch = 0;
    double lr = 0.0;
    double temperature = 1.0;
    double mean_loss = 0.0;
};

/// Per-epoch log rendered as `epoch,lr,T,mean_loss` CSV.
std::string epoch_log_csv(std::span<const EpochStats> log);

/// Loss over one minibatch. `rows` are indices into the training inputs;
/// `grad` must receive dL/dlogits with the batch mean already applied.
using BatchLoss = std::function<double(std::span<const std::size_t> rows, const Matrix& logits,
                                       Matrix& grad, double temperature)>;

/// Temperature in effect for an epoch; 1 for plain supervised training.
using TemperatureFn = std::function<double(int epoch)>;

/// Minibatch Adam + 1-cycle loop with inverted dropout. Shuffling and dropout
/// draw from generators derived from `seed`, so the result is a pure function
/// of its arguments.
Mlp train_loop(Mlp model, const Matrix& inputs, const TrainConfig& cfg, std::uint64_t seed,
               const BatchLoss& loss, const TemperatureFn& temperature,
               std::vector<EpochStats>* log = nullptr);

/// Fresh He-initialised network for the configured architecture.
Mlp init_model(std::size_t input_dim, std::size_t num_classes, const TrainConfig& cfg,
               std::uint64_t seed);

/// Maximum-likelihood classifier on hard labels. Throws ConfigError when the
/// dataset is empty or unlabeled.
Mlp train_dnn(const data::Dataset2D& data, const TrainConfig& cfg, std::uint64_t seed,
              std::vector<EpochStats>* log = nullptr);

/// Validates ranges (epochs > 0, keep_prob in (0,1], ...). Throws ConfigError.
void validate(const TrainConfig& cfg);

} // namespace endd::train
