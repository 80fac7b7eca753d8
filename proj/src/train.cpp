// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

#include "endd/train.hpp"

#include "endd/error.hpp"
#include "endd/io.hpp"

#include <algorithm>
#include <numeric>

namespace endd::train {

void validate(const TrainConfig& cfg) {
    if (cfg.epochs <= 0) {
        throw ConfigError("training: epochs must be > 0");
    }
    if (cfg.cycle_len <= 0) {
        throw ConfigError("training: cycle_len must be > 0");
    }
    if (!(cfg.peak_lr > 0.0)) {
        throw ConfigError("training: peak learning rate must be > 0");
    }
    if (!(cfg.keep_prob > 0.0 && cfg.keep_prob <= 1.0)) {
        throw ConfigError("training: keep_prob must be in (0, 1]");
    }
    if (cfg.batch_size == 0) {
        throw ConfigError("training: batch_size must be > 0");
    }
    for (auto h : cfg.hidden) {
        if (h == 0) {
            throw ConfigError("training: hidden layer widths must be > 0");
        }
    }
}

std::string epoch_log_csv(std::span<const EpochStats> log) {
    std::string out = "epoch,lr,T,mean_loss\n";
    for (const auto& s : log) {
        out += std::to_string(s.epoch) + "," + io::format_double(s.lr) + "," +
               io::format_double(s.temperature) + "," + io::format_double(s.mean_loss) + "\n";
    }
    return out;
}

Mlp init_model(std::size_t input_dim, std::size_t num_classes, const TrainConfig& cfg,
               std::uint64_t seed) {
    std::vector<std::size_t> dims{input_dim};
    dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
    dims.push_back(num_classes);
    Rng rng(derive_seed(seed, "init"));
    return make_mlp(dims, rng);
}

Mlp train_loop(Mlp model, const Matrix& inputs, const TrainConfig& cfg, std::uint64_t seed,
               const BatchLoss& loss, const TemperatureFn& temperature,
               std::vector<EpochStats>* log) {
    validate(cfg);
    const std::size_t n = inputs.rows();
    if (n == 0) {
        throw ConfigError("training: empty training set");
    }
    model.validate();
    const std::size_t batch = std::min(cfg.batch_size, n);
    Rng shuffle_rng(derive_seed(seed, "shuffle"));
    Rng dropout_rng(derive_seed(seed, "dropout"));
    optim::AdamState adam(model.parameter_count());
    const optim::LrSchedule lr_sched{cfg.peak_lr, cfg.cycle_len, cfg.epochs};

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Matrix grad;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = optim::one_cycle_lr(epoch, lr_sched);
        const double t = temperature(epoch);
        // Fisher-Yates with our own generator keeps shuffles portable.
        for (std::size_t i = n; i > 1; --i) {
            std::swap(order[i - 1], order[shuffle_rng.below(i)]);
        }
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t stop = std::min(n, start + batch);
            const std::span<const std::size_t> rows(order.data() + start, stop - start);
            const Matrix x = inputs.gather_rows(rows);
            auto fwd = forward(model, x, TrainMode{cfg.keep_prob, &dropout_rng});
            grad = Matrix(fwd.logits.rows(), fwd.logits.cols());
            const double batch_loss = loss(rows, fwd.logits, grad, t);
            loss_sum += batch_loss * static_cast<double>(rows.size());
            const Gradients g = backward(model, fwd.trace, grad);
            optim::adam_step(model, g, adam, lr);
        }
        if (log != nullptr) {
            log->push_back({epoch, lr, t, loss_sum / static_cast<double>(n)});
        }
    }
    return model;
}

Mlp train_dnn(const data::Dataset2D& data, const TrainConfig& cfg, std::uint64_t seed,
              std::vector<EpochStats>* log) {
    if (data.size() == 0) {
        throw ConfigError("train_dnn: empty dataset");
    }
    if (!data.labeled() || data.num_classes < 2) {
        throw ConfigError("train_dnn: need labels and at least two classes");
    }
    Mlp model = init_model(data.points.cols(), static_cast<std::size_t>(data.num_classes), cfg, seed);
    std::vector<int> batch_labels;
    const BatchLoss ce = [&](std::span<const std::size_t> rows, const Matrix& logits, Matrix& grad,
                             double) {
        batch_labels.resize(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            batch_labels[i] = data.labels[rows[i]];
        }
        return cross_entropy(logits, batch_labels, &grad);
    };
    return train_loop(std::move(model), data.points, cfg, seed, ce, [](int) { return 1.0; }, log);
}

} // namespace endd::train
